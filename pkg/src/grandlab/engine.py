"""Vectorised decoding engine for Monte Carlo runs.

The reference decoders in :mod:`grandlab.decode` walk the pattern stream one
query at a time.  Here the stream is materialised once per (parities,
offsets) key as a padded ``(N, T)`` array of slot indices, grown on demand
from cached partition tables.  Membership checks run block-wise with numpy:
a pattern's syndrome is the XOR of the column syndromes at its slots.  Results are identical to the
reference decoders (same order, same query counts).
"""
from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import LinearCode
from .decode import DecodeResult, Tuning, sed, word_offsets
from .gf2 import BitVec
from .patterngen import (
    Parity,
    TuningOffsets,
    enumerate_bases,
    level1_compositions,
    parity_partitions,
    segment_caps,
)
from .segmentation import Segmentation, segment_constraints

FIRST_BLOCK = 32
MAX_BLOCK = 4096


@lru_cache(maxsize=8192)
def _parts_array(w: int, parity: Parity, p_max: int) -> np.ndarray:
    """Partitions of ``w`` as a read-only ``(count, t)`` array, 1-based, 0-padded."""
    parts = list(parity_partitions(w, parity, p_max))
    t = max((len(x) for x in parts), default=0)
    out = np.zeros((len(parts), t), dtype=np.int16)
    i = 0
    # the stream is ordered by part count, so rows of equal length are contiguous
    for size, grp in itertools.groupby(parts, key=len):
        grp = list(grp)
        if size:
            out[i:i + len(grp), :size] = np.array(grp, dtype=np.int16)
        i += len(grp)
    out.flags.writeable = False
    return out


def _product(blocks: list[np.ndarray], starts: list[int], sentinel: int) -> np.ndarray:
    """Cartesian product of per-segment partition arrays as slot rows.

    Row order matches ``itertools.product`` (last segment varies fastest).
    """
    counts = [b.shape[0] for b in blocks]
    idx = np.indices(counts).reshape(len(blocks), -1)
    cols = []
    for j, (b, st) in enumerate(zip(blocks, starts)):
        if b.shape[1]:
            sub = b[idx[j]].astype(np.int32)
            cols.append(np.where(sub > 0, sub + (st - 1), sentinel))
    return np.hstack(cols) if cols else np.full((idx.shape[1], 0), sentinel)


def _plain_units(n: int):
    for w in range(1, n * (n + 1) // 2 + 1):
        a = _parts_array(w, Parity.ANY, n).astype(np.int32)
        yield w, np.where(a > 0, a - 1, n)


def _segmented_units(lengths, parities, tau, n: int):
    p = len(lengths)
    caps = segment_caps(lengths)
    tau = tau if tau is not None else (0,) * p
    offsets = TuningOffsets(tuple(tau))
    starts = [0]
    for L in lengths[:-1]:
        starts.append(starts[-1] + L)
    bases = enumerate_bases(parities)
    empty = np.zeros((1, 0), dtype=np.int16)
    top = sum(c + t for c, t in zip(caps, tau))
    for w_L in range(1, top + 1):
        for vec in level1_compositions(w_L, parities, caps, offsets, bases):
            blocks = [
                _parts_array(vec.w[j] - tau[j], parities[j], lengths[j]) if vec.base.f[j] else empty
                for j in range(p)
            ]
            if any(b.shape[0] == 0 for b in blocks):
                continue
            yield w_L, _product(blocks, starts, n)


class _Schedule:
    """Lazily grown pattern table for one schedule key."""

    def __init__(self, units, n: int, max_weight: int | None = None):
        self._units = units
        self._n = n  # sentinel slot
        self._max_weight = max_weight
        self.slots = np.full((0, 1), n, dtype=np.int16)
        self.wl = np.zeros(0, dtype=np.int32)
        self.done = False

    def __len__(self):
        return len(self.wl)

    @property
    def nbytes(self) -> int:
        return self.slots.nbytes + self.wl.nbytes

    def grow(self, upto: int) -> None:
        if self.done or upto <= len(self):
            return
        # grow geometrically so repeated small requests stay cheap
        upto = max(upto, 2 * len(self))
        have = len(self)
        blocks, ws = [], []
        for w, rows in self._units:
            if self._max_weight is not None:
                rows = rows[np.count_nonzero(rows < self._n, axis=1) <= self._max_weight]
            if not len(rows):
                continue
            blocks.append(rows)
            ws.append(np.full(len(rows), w, dtype=np.int32))
            have += len(rows)
            if have >= upto:
                break
        else:
            self.done = True
        if not blocks:
            return
        t = max(self.slots.shape[1], max(b.shape[1] for b in blocks))
        padded = [self._pad(self.slots, t)] + [self._pad(b, t) for b in blocks]
        self.slots = np.vstack(padded).astype(np.int16, copy=False)
        self.wl = np.concatenate([self.wl] + ws)

    def _pad(self, a: np.ndarray, t: int) -> np.ndarray:
        if a.shape[1] == t:
            return a
        pad = np.full((a.shape[0], t - a.shape[1]), self._n, dtype=a.dtype)
        return np.hstack([a, pad])


@dataclass
class BatchDecoder:
    """Fast plain or segmented ORBGRAND for one code.

    ``seg=None`` selects plain ORBGRAND.  ``tuning`` may be a fixed
    :class:`TuningOffsets` or a per-word :class:`Tuning`.
    """

    code: LinearCode
    seg: Segmentation | None = None
    tuning: Tuning | TuningOffsets | None = None
    max_weight: int | None = None
    cache_bytes: int = 512 * 2**20

    def __post_init__(self):
        n = self.code.n
        cols = self.code.H.columns()
        if self.code.n - self.code.k > 64:
            raise ValueError("engine supports at most 64 parity checks")
        self._colsyn = np.array(cols + [0], dtype=np.uint64)
        self._cache: OrderedDict = OrderedDict()
        if self.seg is not None:
            if self.seg.n != n:
                raise ValueError("segmentation length differs from code length")
            self._seg_index = [np.array(s, dtype=np.int64) - 1 for s in self.seg.sets]
            member = np.zeros(n, dtype=np.int64)
            for j, s in enumerate(self._seg_index):
                member[s] = j
            self._member = member
            self._gov_masks = [
                np.array(self.seg.rows[j].bits(), dtype=bool) for j in self.seg.governed
            ]

    # -- schedule cache -------------------------------------------------------
    def _schedule(self, key) -> _Schedule:
        sch = self._cache.get(key)
        if sch is not None:
            self._cache.move_to_end(key)
            return sch
        n = self.code.n
        if self.seg is None:
            units = _plain_units(n)
        else:
            parities, tau = key
            units = _segmented_units(self.seg.lengths, parities, tau, n)
        sch = _Schedule(units, n, self.max_weight)
        self._cache[key] = sch
        return sch

    def _evict(self) -> None:
        total = sum(s.nbytes for s in self._cache.values())
        while total > self.cache_bytes and len(self._cache) > 1:
            _, old = self._cache.popitem(last=False)
            total -= old.nbytes

    # -- decoding -------------------------------------------------------------
    def _perm_and_key(self, r: np.ndarray, y: np.ndarray):
        order = np.argsort(np.abs(r), kind="stable")
        if self.seg is None:
            return order, None
        # local orders concatenated segment by segment
        perm = order[np.argsort(self._member[order], kind="stable")]
        bits = [int(np.count_nonzero(y[m]) & 1) for m in self._gov_masks]
        parities = segment_constraints(self.seg, bits)
        if isinstance(self.tuning, Tuning):
            tau = word_offsets(r, self.seg, parities, self.tuning).tau
        elif isinstance(self.tuning, TuningOffsets):
            tau = tuple(self.tuning.tau)
        else:
            tau = None
        if tau is not None and not any(tau):
            tau = None  # zero offsets share the untuned schedule
        return perm, (parities, tau)

    def decode(self, r, b: int) -> DecodeResult:
        res = self.decode_raw(r, b)
        q, slots_row, w = res
        r = np.asarray(r, dtype=float)
        y = r < 0
        if slots_row is None:
            return DecodeResult(None, q, True)
        e = np.zeros(self.code.n, dtype=bool)
        e[slots_row] = True
        c = BitVec.from_bits((y ^ e).astype(np.uint8).tolist())
        ev = BitVec.from_bits(e.astype(np.uint8).tolist())
        return DecodeResult(c, q, False, sed(r, c), w, ev)

    def decode_raw(self, r, b: int):
        """(queries, error coordinates or None, w_L) without building BitVecs."""
        if b < 1:
            raise ValueError("abandonment threshold b must be >= 1")
        r = np.asarray(r, dtype=float)
        n = self.code.n
        if r.shape != (n,):
            raise ValueError(f"expected {n} reliabilities, got shape {r.shape}")
        y = r < 0
        s0 = np.bitwise_xor.reduce(self._colsyn[:n][y]) if y.any() else np.uint64(0)
        if s0 == 0:
            return 0, np.zeros(0, dtype=np.int64), 0
        perm, key = self._perm_and_key(r, y)
        colperm = np.append(self._colsyn[perm], np.uint64(0))  # slot -> syndrome column
        sch = self._schedule(key)
        start = 0
        block = FIRST_BLOCK
        while start < b:
            stop = min(start + block, b)
            sch.grow(stop)
            stop = min(stop, len(sch))
            if stop <= start:
                break
            part = sch.slots[start:stop]
            syn = np.bitwise_xor.reduce(colperm[part], axis=1)
            hit = np.flatnonzero(syn == s0)
            if hit.size:
                i = start + int(hit[0])
                row = sch.slots[i]
                coords = perm[row[row < n]]
                self._evict()
                return i + 1, coords, int(sch.wl[i])
            start = stop
            block = min(2 * block, MAX_BLOCK)
        self._evict()
        return start, None, None
