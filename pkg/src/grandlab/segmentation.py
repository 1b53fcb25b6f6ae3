"""Split the coordinates of a code into parity-governed segments.

A segment is either the support of a row-space vector of H (its parity is
read off the syndrome) or a residual set whose parity is unknown.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .gf2 import BitMatrix, BitVec, GF2Error, in_rowspace
from .patterngen import Parity


@dataclass(frozen=True)
class Segmentation:
    n: int
    sets: tuple[tuple[int, ...], ...]  # 1-based, ascending
    rows: tuple[BitVec | None, ...]  # governing row per segment, None if unconstrained

    def __post_init__(self):
        if len(self.sets) != len(self.rows):
            raise GF2Error("one row slot per segment expected")
        seen: set[int] = set()
        for s, r in zip(self.sets, self.rows):
            if not s:
                raise GF2Error("empty segment")
            if seen & set(s):
                raise GF2Error("segments overlap")
            seen |= set(s)
            if r is not None and r.support() != list(s):
                raise GF2Error("governing row support differs from segment")
        if seen != set(range(1, self.n + 1)):
            raise GF2Error("segments do not cover [1, n]")

    @property
    def p(self) -> int:
        return len(self.sets)

    @property
    def governed(self) -> list[int]:
        """0-based indices of segments with a governing row."""
        return [j for j, r in enumerate(self.rows) if r is not None]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sets)

    @classmethod
    def trivial(cls, n: int) -> "Segmentation":
        return cls(n, (tuple(range(1, n + 1)),), (None,))

    @classmethod
    def from_sets(cls, H: BitMatrix, sets: Sequence[Sequence[int]]) -> "Segmentation":
        """Explicit segments; each is governed iff its indicator lies in rowspace(H)."""
        n = H.ncols
        rows = []
        clean = []
        for s in sets:
            s = tuple(sorted(set(s)))
            v = BitVec.from_support(s, n)
            rows.append(v if in_rowspace(H, v) else None)
            clean.append(s)
        return cls(n, tuple(clean), tuple(rows))

    def governing_matrix(self) -> BitMatrix:
        return BitMatrix(tuple(r.word for r in self.rows if r is not None), self.n)

    def describe(self) -> str:
        lines = [f"segments p={self.p} governed={len(self.governed)} n={self.n}"]
        gi = 0
        for j, (s, r) in enumerate(zip(self.sets, self.rows), start=1):
            if r is None:
                kind = "unconstrained"
            else:
                gi += 1
                kind = f"row {gi}"
            lines.append(f"segment {j}: size={len(s)} {kind} indices={','.join(map(str, s))}")
        return "\n".join(lines)


def _subspace_within(H: BitMatrix, mask: int, order: Sequence[int] | None = None) -> list[int]:
    """Reduced basis of {v in rowspace(H) : supp(v) within mask}.

    Coordinates outside ``mask`` are eliminated first; the rows left over
    span the shortened space and are then reduced with pivots taken in
    ``order`` (default: left to right).
    """
    ncols = H.ncols
    if order is None:
        order = range(ncols)
    outside = [c for c in range(ncols) if not (mask >> c) & 1]
    inside = [c for c in order if (mask >> c) & 1]
    rows = [r for r in H.rows if r]
    top = 0
    for c in outside + inside:
        bit = 1 << c
        sel = next((i for i in range(top, len(rows)) if rows[i] & bit), None)
        if sel is None:
            continue
        rows[top], rows[sel] = rows[sel], rows[top]
        for i in range(len(rows)):
            if i != top and rows[i] & bit:
                rows[i] ^= rows[top]
        top += 1
    return [r for r in rows[:top] if not r & ~mask]


def _candidates(H: BitMatrix, mask: int, n_orders: int = 16, limit_enum: int = 10) -> list[int]:
    """Row-space vectors with support strictly inside ``mask``.

    Small shortened spaces are enumerated outright.  Larger ones are
    sampled: reduced bases under several column orders (fixed seed, so the
    result is deterministic) and pairwise sums within each basis.
    """
    basis = _subspace_within(H, mask)
    pool: set[int] = set()
    if len(basis) <= limit_enum:
        for bits in range(1, 1 << len(basis)):
            v = 0
            for i, b in enumerate(basis):
                if (bits >> i) & 1:
                    v ^= b
            pool.add(v)
    else:
        rng = random.Random(mask.bit_count() * 7919 + H.ncols)
        orders = [list(range(H.ncols)), list(range(H.ncols - 1, -1, -1))]
        for _ in range(n_orders):
            o = list(range(H.ncols))
            rng.shuffle(o)
            orders.append(o)
        fits = [r for r in H.rows if r and not r & ~mask]
        for o in orders:
            b = _subspace_within(H, mask, o) + fits
            pool.update(b)
            for x, y in itertools.combinations(b, 2):
                pool.add(x ^ y)
    pool.discard(0)
    pool.discard(mask)
    return sorted(v for v in pool if not v & ~mask)


def _score(pieces) -> tuple:
    governed = sum(1 for _, g in pieces if g)
    unconstrained = len(pieces) - governed
    sizes = [m.bit_count() for m, _ in pieces]
    return (-governed, unconstrained, sum(s * s for s in sizes), max(sizes))


def find_segments(H: BitMatrix, max_p: int = 3, beam: int = 24) -> Segmentation:
    """Disjoint parity-governed segments covering [1, n].

    Starting from the whole index set (governed if the all-ones vector is in
    the row space), pieces are split by row-space vectors whose support
    lies strictly inside them; a split of piece P by v yields supp(v) and
    P minus supp(v), i.e. a nested chain peeled into disjoint parts.  For
    each piece the ``beam`` most balanced and the ``beam`` lightest splits
    are explored.  The final choice prefers more governed segments, then
    fewer unconstrained ones, then balanced sizes.
    """
    if max_p < 1:
        raise ValueError("max_p must be >= 1")
    n = H.ncols
    full = (1 << n) - 1
    start = ((full, in_rowspace(H, full)),)
    best = start
    frontier = [start]
    cand_cache: dict[int, list[int]] = {}
    for _ in range(max_p - 1):
        children: dict[frozenset, tuple] = {}
        for pieces in frontier:
            for idx, (mask, gov) in enumerate(pieces):
                if mask not in cand_cache:
                    cand_cache[mask] = _candidates(H, mask)
                cands = cand_cache[mask]
                half = mask.bit_count() / 2
                balanced = sorted(cands, key=lambda v: (abs(v.bit_count() - half), v))[:beam]
                light = sorted(cands, key=lambda v: (v.bit_count(), v))[:beam]
                for v in dict.fromkeys(balanced + light):
                    new = pieces[:idx] + ((v, True), (mask & ~v, gov)) + pieces[idx + 1:]
                    children.setdefault(frozenset(new), new)
        if not children:
            break
        ranked = sorted(children.values(), key=lambda c: (_score(c), sorted(m for m, _ in c)))
        if _score(ranked[0]) < _score(best):
            best = ranked[0]
        frontier = ranked[: 8 * beam]
    pieces = sorted(best, key=lambda pg: (pg[0] & -pg[0]))
    sets = []
    rows = []
    for mask, gov in pieces:
        v = BitVec(mask, n)
        sets.append(tuple(v.support()))
        rows.append(v if gov else None)
    return Segmentation(n, tuple(sets), tuple(rows))


def segment_syndrome(seg: Segmentation, y: BitVec) -> BitVec:
    """Parities of ``y`` over the governed segments (in segment order)."""
    if y.length != seg.n:
        raise GF2Error(f"word length {y.length} != n={seg.n}")
    word = 0
    for i, j in enumerate(seg.governed):
        if (seg.rows[j].word & y.word).bit_count() & 1:
            word |= 1 << i
    return BitVec(word, len(seg.governed))


def segment_constraints(seg: Segmentation, s: BitVec | Sequence[int]) -> tuple[Parity, ...]:
    """Map governed syndrome bits onto per-segment parities."""
    bits = s.bits() if isinstance(s, BitVec) else [int(b) for b in s]
    gov = seg.governed
    if len(bits) != len(gov):
        raise GF2Error(f"expected {len(gov)} syndrome bits, got {len(bits)}")
    out = [Parity.ANY] * seg.p
    for bit, j in zip(bits, gov):
        out[j] = Parity.from_bit(bit)
    return tuple(out)


def search_space_size(seg: Segmentation) -> int:
    """Number of n-bit error vectors compatible with all governed parities."""
    return 1 << (seg.n - len(seg.governed))


def search_space_log2(seg: Segmentation) -> float:
    return float(seg.n - len(seg.governed))


def is_valid_segmentation(seg: Segmentation, H: BitMatrix) -> bool:
    if seg.n != H.ncols:
        return False
    return all(r is None or in_rowspace(H, r) for r in seg.rows)
