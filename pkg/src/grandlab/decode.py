"""ORBGRAND and segmented ORBGRAND decoders, plus an exhaustive ML oracle.

Conventions: BPSK maps bit 0 to +1 and bit 1 to -1; the hard decision of
``r_i`` is 0 when ``r_i >= 0``.  Reliability ties are broken by ascending
coordinate.  Query 0 is the hard-decision check; every error pattern tested
against the full parity-check matrix costs one query.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .codes import LinearCode, codewords
from .gf2 import BitVec
from .patterngen import (
    Parity,
    TuningOffsets,
    distinct_partitions,
    enumerate_bases,
    level1_compositions,
    parity_partitions,
    segment_caps,
    tuning_offsets,
)
from .segmentation import Segmentation, segment_constraints, segment_syndrome


@dataclass(frozen=True)
class ReliabilityOrder:
    perm: tuple[int, ...]  # rank -> coordinate, 1-based
    local: tuple[tuple[int, ...], ...]  # per segment: local rank -> coordinate


@dataclass(frozen=True)
class DecodeResult:
    codeword: BitVec | None
    queries: int
    abandoned: bool
    sed: float | None = None
    w_l: int | None = None
    error: BitVec | None = None

    def to_record(self) -> dict:
        return {
            "codeword_hex": self.codeword.to_hex() if self.codeword is not None else None,
            "queries": self.queries,
            "abandoned": self.abandoned,
            "sed": self.sed,
            "w_l": self.w_l,
        }


@dataclass(frozen=True)
class Tuning:
    """Per-word sub-weight tuning: threshold ``eps``, normalisation ``rho``.

    ``sigma`` is the channel noise standard deviation used for the
    expected low-reliability count.
    """

    eps: float
    rho: float
    sigma: float

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.eps <= 0 or self.sigma <= 0:
            raise ValueError("eps and sigma must be positive")


def bpsk(c) -> np.ndarray:
    bits = c.to_array() if isinstance(c, BitVec) else np.asarray(c, dtype=np.uint8)
    return 1.0 - 2.0 * bits


def hard_decision(r) -> BitVec:
    r = np.asarray(r, dtype=float)
    return BitVec.from_bits((r < 0).astype(np.uint8).tolist())


def logistic_weight(z) -> int:
    """Sum of 1-based positions of the ones in ``z``."""
    bits = z.bits() if isinstance(z, BitVec) else list(z)
    return sum(i for i, b in enumerate(bits, start=1) if b)


def sed(r, c) -> float:
    r = np.asarray(r, dtype=float)
    x = bpsk(c)
    if r.shape != x.shape:
        raise ValueError("length mismatch")
    return float(np.sum((r - x) ** 2))


def reliability_order(r, seg: Segmentation | None = None) -> ReliabilityOrder:
    a = np.abs(np.asarray(r, dtype=float))
    perm = tuple(int(i) + 1 for i in np.argsort(a, kind="stable"))
    if seg is None:
        return ReliabilityOrder(perm, (perm,))
    where = {}
    for j, s in enumerate(seg.sets):
        for i in s:
            where[i] = j
    local: list[list[int]] = [[] for _ in seg.sets]
    for i in perm:
        local[where[i]].append(i)
    return ReliabilityOrder(perm, tuple(tuple(x) for x in local))


# --- pattern schedules --------------------------------------------------------
# Patterns are yielded as (w_L, slots) with 0-based slots; a slot indexes
# the concatenation of the per-segment local orders.

def plain_schedule(n: int, max_weight: int | None = None) -> Iterator[tuple[int, tuple[int, ...]]]:
    for w in range(1, n * (n + 1) // 2 + 1):
        for part in distinct_partitions(w, n):
            if max_weight is not None and len(part) > max_weight:
                continue
            yield w, tuple(i - 1 for i in part)


def segmented_schedule(
    lengths: Sequence[int],
    parities: Sequence[Parity],
    offsets: TuningOffsets | None = None,
    max_weight: int | None = None,
) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Two-level schedule: level-1 sub-weight vectors, level-2 partitions."""
    p = len(lengths)
    caps = segment_caps(lengths)
    tau = offsets.tau if offsets is not None else (0,) * p
    starts = [0]
    for L in lengths[:-1]:
        starts.append(starts[-1] + L)
    bases = enumerate_bases(parities)
    top = sum(c + t for c, t in zip(caps, tau))
    for w_L in range(1, top + 1):
        for vec in level1_compositions(w_L, parities, caps, offsets, bases):
            streams = []
            for j in range(p):
                if vec.base.f[j]:
                    streams.append(list(parity_partitions(vec.w[j] - tau[j], parities[j], lengths[j])))
                else:
                    streams.append([()])
            for combo in itertools.product(*streams):
                slots = tuple(starts[j] + i - 1 for j, part in enumerate(combo) for i in part)
                if not slots:
                    continue
                if max_weight is not None and len(slots) > max_weight:
                    continue
                yield w_L, slots


def _column_syndromes(code: LinearCode) -> list[int]:
    return code.H.columns()


def _run(code, r, perm: Sequence[int], schedule, b: int) -> DecodeResult:
    if b < 1:
        raise ValueError("abandonment threshold b must be >= 1")
    r = np.asarray(r, dtype=float)
    y = hard_decision(r)
    cols = _column_syndromes(code)
    s0 = 0
    for i in y.support():
        s0 ^= cols[i - 1]
    if s0 == 0:
        return DecodeResult(y, 0, False, sed(r, y), 0, BitVec.zeros(code.n))
    slot_cols = [cols[c - 1] for c in perm]
    q = 0
    for w, slots in schedule:
        q += 1
        s = s0
        for k in slots:
            s ^= slot_cols[k]
        if s == 0:
            e = BitVec.from_support((perm[k] for k in slots), code.n)
            c = y ^ e
            return DecodeResult(c, q, False, sed(r, c), w, e)
        if q >= b:
            return DecodeResult(None, q, True)
    return DecodeResult(None, q, True)


def orbgrand(code: LinearCode, r, b: int, max_weight: int | None = None) -> DecodeResult:
    """Plain ORBGRAND with abandonment after ``b`` queries."""
    order = reliability_order(r)
    return _run(code, r, order.perm, plain_schedule(code.n, max_weight), b)


def word_offsets(r, seg: Segmentation, parities, tuning: Tuning) -> TuningOffsets:
    a = np.abs(np.asarray(r, dtype=float))
    counts = [int(np.sum(a[np.array(s) - 1] < tuning.eps)) for s in seg.sets]
    return tuning_offsets(counts, tuning.eps, tuning.rho, tuning.sigma, seg.lengths, parities)


def segmented_orbgrand(
    code: LinearCode,
    seg: Segmentation,
    r,
    b: int,
    tuning: Tuning | TuningOffsets | None = None,
    max_weight: int | None = None,
) -> DecodeResult:
    """Segmented ORBGRAND; sub-patterns honour each governed segment's parity."""
    if seg.n != code.n:
        raise ValueError("segmentation length differs from code length")
    order = reliability_order(r, seg)
    y = hard_decision(r)
    parities = segment_constraints(seg, segment_syndrome(seg, y))
    if isinstance(tuning, Tuning):
        offsets = word_offsets(r, seg, parities, tuning)
    else:
        offsets = tuning
    perm = [c for loc in order.local for c in loc]
    sched = segmented_schedule(seg.lengths, parities, offsets, max_weight)
    return _run(code, r, perm, sched, b)


def ml_bruteforce(code: LinearCode, r) -> tuple[BitVec, float]:
    """Exhaustive minimum-SED codeword; ties go to the lexicographically first."""
    if code.k > 22:
        raise ValueError(f"k={code.k} too large for exhaustive ML")
    r = np.asarray(r, dtype=float)
    words = codewords(code)
    best = None
    for w in words:
        c = BitVec(w, code.n)
        d = sed(r, c)
        key = (d, c.bits())
        if best is None or key < best[0]:
            best = (key, c)
    return best[1], best[0][0]


def equidistant_sed_check(n: int, delta: float, w_L: int, rtol: float = 1e-9) -> float:
    """SED increase shared by every pattern of logistic weight ``w_L``.

    Reliabilities are placed at ``|r_(i)| = i * delta``; raises if two
    patterns of the same weight disagree beyond ``rtol``.
    """
    r = delta * np.arange(1, n + 1)
    y = hard_decision(r)
    base = sed(r, y)
    incs = []
    for part in distinct_partitions(w_L, n):
        z = BitVec.from_support(part, n)
        incs.append(sed(r, y ^ z) - base)
    if not incs:
        raise ValueError(f"no pattern of logistic weight {w_L} fits in length {n}")
    lo, hi = min(incs), max(incs)
    if hi - lo > rtol * max(abs(hi), 1e-300):
        raise ArithmeticError(f"SED increments differ: {lo} vs {hi}")
    return float(np.mean(incs))
