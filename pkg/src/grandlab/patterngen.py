"""Integer-partition machinery for ORBGRAND-style pattern schedules.

Level 2: distinct-part partitions of a (sub-)weight, optionally with a fixed
or parity-restricted number of parts.  Level 1: compositions of the overall
logistic weight into per-segment sub-weights, organised by pattern bases.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

Partition = tuple[int, ...]


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    ANY = "any"  # segment without a governing parity row

    @classmethod
    def from_bit(cls, s: int) -> "Parity":
        return cls.ODD if s else cls.EVEN

    @property
    def min_subweight(self) -> int:
        # smallest non-empty sub-pattern: {1} for odd/any, {1, 2} for even
        return 3 if self is Parity.EVEN else 1

    def accepts(self, count: int) -> bool:
        if self is Parity.ANY:
            return True
        return count % 2 == (1 if self is Parity.ODD else 0)


def _tri(t: int) -> int:
    return t * (t + 1) // 2


def fixed_count_partitions_literal(w: int, t: int, p_max: int) -> Iterator[Partition]:
    """The increment-and-shift partition walk, step for step (0-based list ``p``).

    Kept as an executable reference; :func:`fixed_count_partitions` emits the
    same sequence faster.
    """
    if t < 1 or w < _tri(t):
        return
    if t == 1:
        if 1 <= w <= p_max:
            yield (w,)
        return
    p = list(range(1, t))
    p.append(w - sum(p))
    if p[t - 1] <= p[t - 2]:
        return
    if p[t - 1] <= p_max:
        yield tuple(p)
    while True:
        incr_decr = False
        for i in range(1, t):
            if i == 1:
                p_star = p[t - 1] - 1
            else:
                p_star = w - (i * p[t - 1 - i] + _tri(i)) - sum(p[: t - 1 - i])
            if p[t - 1 - i] + i < p_star:
                base = p[t - 1 - i]
                p = p[: t - 1 - i] + [base + j for j in range(1, i + 1)]
                p.append(w - sum(p))
                if p[t - 1] <= p_max:
                    yield tuple(p)
                incr_decr = True
                break
        if not incr_decr:
            break


def fixed_count_partitions(w: int, t: int, p_max: int) -> Iterator[Partition]:
    """All ``t``-part distinct partitions of ``w`` with parts <= ``p_max``.

    Same order as :func:`fixed_count_partitions_literal`.  The increment-and-decrement run on the last
    two parts is solved in closed form, which skips the states whose largest
    part exceeds ``p_max`` instead of walking through them.
    """
    if t < 1 or w < _tri(t) or p_max < t:
        return
    if t * p_max - _tri(t - 1) < w:
        return  # even the t largest admissible parts fall short
    if t == 1:
        if w <= p_max:
            yield (w,)
        return
    prefix = list(range(1, t - 1))  # p[0 .. t-3]
    a0 = t - 1  # p[t-2]
    while True:
        rem = w - sum(prefix)
        lo = max(a0, rem - p_max)
        hi = (rem - 1) // 2  # a < rem - a
        pre = tuple(prefix)
        for a in range(lo, hi + 1):
            yield pre + (a, rem - a)
        # re-initialisation: smallest i >= 2 whose pivot can advance
        p = prefix + [a0]  # only p[0 .. t-3] matters from here on
        advanced = False
        for i in range(2, t):
            piv = p[t - 1 - i]
            p_star = w - (i * piv + _tri(i)) - sum(p[: t - 1 - i])
            if piv + i < p_star:
                new = p[: t - 1 - i] + [piv + j for j in range(1, i + 1)]
                prefix = new[: t - 2]
                a0 = new[t - 2]
                advanced = True
                break
        if not advanced:
            return


def distinct_partitions(w: int, p_max: int) -> Iterator[Partition]:
    """Every set of distinct positive parts <= ``p_max`` summing to ``w``.

    Ordered by number of parts, then the fixed-count order; ``w = 0`` yields the
    empty partition once.
    """
    if w == 0:
        yield ()
        return
    t = 1
    while _tri(t) <= w:
        yield from fixed_count_partitions(w, t, p_max)
        t += 1


def parity_partitions(w: int, parity: Parity, p_max: int) -> Iterator[Partition]:
    """Distinct partitions of ``w`` whose part count has the requested parity."""
    if w == 0:
        if parity is not Parity.ODD:
            yield ()
        return
    t = 1 if parity is not Parity.EVEN else 2
    step = 1 if parity is Parity.ANY else 2
    while _tri(t) <= w:
        yield from fixed_count_partitions(w, t, p_max)
        t += step


# --- level 1 ----------------------------------------------------------------

@dataclass(frozen=True)
class Base:
    """Which segments contribute a non-empty sub-pattern (``f_j = 1``)."""

    f: tuple[int, ...]
    mins: tuple[int, ...]  # per-segment minimum sub-weight, 0 where frozen

    @property
    def min_total(self) -> int:
        return sum(self.mins)


@dataclass(frozen=True)
class SubWeightVector:
    w: tuple[int, ...]
    base: Base


@dataclass(frozen=True)
class TuningOffsets:
    tau: tuple[int, ...]
    mu: tuple[float, ...] = ()
    eps: float | None = None
    rho: float | None = None
    sigma: float | None = None

    def kappa(self, parities: Sequence[Parity]) -> tuple[int, ...]:
        return tuple(p.min_subweight + t for p, t in zip(parities, self.tau))


def enumerate_bases(parities: Sequence[Parity]) -> list[Base]:
    """Pattern bases in ascending minimum total weight (ties: lexicographic f)."""
    choices = [(1,) if p is Parity.ODD else (0, 1) for p in parities]
    bases = []
    for f in itertools.product(*choices):
        mins = tuple(fj * p.min_subweight for fj, p in zip(f, parities))
        bases.append(Base(tuple(f), mins))
    bases.sort(key=lambda b: (b.min_total, b.f))
    return bases


def segment_caps(lengths: Sequence[int]) -> tuple[int, ...]:
    return tuple(_tri(L) for L in lengths)


def _compositions(total: int, lo: Sequence[int], hi: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Vectors with lo <= v <= hi elementwise summing to total, lexicographic."""
    p = len(lo)
    # suffix bounds for pruning
    slo = [0] * (p + 1)
    shi = [0] * (p + 1)
    for j in range(p - 1, -1, -1):
        slo[j] = slo[j + 1] + lo[j]
        shi[j] = shi[j + 1] + hi[j]
    if not slo[0] <= total <= shi[0]:
        return
    vec = [0] * p

    def rec(j: int, left: int):
        if j == p - 1:
            vec[j] = left
            yield tuple(vec)
            return
        start = max(lo[j], left - shi[j + 1])
        stop = min(hi[j], left - slo[j + 1])
        for v in range(start, stop + 1):
            vec[j] = v
            yield from rec(j + 1, left - v)

    yield from rec(0, total)


def level1_compositions(
    w_L: int,
    parities: Sequence[Parity],
    caps: Sequence[int],
    offsets: TuningOffsets | None = None,
    bases: Sequence[Base] | None = None,
) -> Iterator[SubWeightVector]:
    """Sub-weight vectors for logistic weight ``w_L``.

    For each base (ascending minimum total) the vectors are lexicographic.
    A contributing segment takes ``w_j >= w_min_j + tau_j`` and, since the
    level-2 partition runs on ``w_j - tau_j``, at most ``cap_j + tau_j``.
    """
    p = len(parities)
    tau = offsets.tau if offsets is not None else (0,) * p
    if len(caps) != p or len(tau) != p:
        raise ValueError("caps/offsets length must match segment count")
    if bases is None:
        bases = enumerate_bases(parities)
    for base in bases:
        lo = [m + t if f else 0 for f, m, t in zip(base.f, base.mins, tau)]
        hi = [c + t if f else 0 for f, c, t in zip(base.f, caps, tau)]
        for w in _compositions(w_L, lo, hi):
            yield SubWeightVector(w, base)


def detection_probability(eps: float, sigma: float) -> float:
    """P(|r| < eps) for r ~ N(1, sigma^2)."""
    def phi(x):
        return 0.5 * (1 + math.erf(x / math.sqrt(2)))

    return phi((eps - 1) / sigma) - phi((-eps - 1) / sigma)


def offsets_from_counts(a: Sequence[int], mu: Sequence[float], rho: float) -> tuple[int, ...]:
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    top = max(a)
    out = []
    for aj, mj in zip(a, mu):
        if top == aj:
            out.append(0)
            continue
        if mj <= 0:
            raise ValueError("expected low-reliability count must be positive")
        # guard against 2.0000000001 style rounding before the ceiling
        out.append(math.ceil((top - aj) / (rho * mj) - 1e-9))
    return tuple(out)


def tuning_offsets(
    a: Sequence[int],
    eps: float,
    rho: float,
    sigma: float,
    lengths: Sequence[int],
    parities: Sequence[Parity] | None = None,
) -> TuningOffsets:
    """Per-segment offsets from counts ``a_j`` of symbols with ``|r| < eps``."""
    if eps <= 0 or sigma <= 0:
        raise ValueError("eps and sigma must be positive")
    if len(a) != len(lengths):
        raise ValueError("one count per segment expected")
    prob = detection_probability(eps, sigma)
    mu = tuple(L * 2 * prob for L in lengths)
    tau = offsets_from_counts(a, mu, rho)
    return TuningOffsets(tau, mu, eps, rho, sigma)
