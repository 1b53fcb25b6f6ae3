import itertools
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grandlab.patterngen import (
    Parity,
    TuningOffsets,
    detection_probability,
    distinct_partitions,
    enumerate_bases,
    fixed_count_partitions,
    fixed_count_partitions_literal,
    level1_compositions,
    offsets_from_counts,
    parity_partitions,
    segment_caps,
    tuning_offsets,
)

E, O, A = Parity.EVEN, Parity.ODD, Parity.ANY


def brute(w, t, p_max):
    return {c for c in itertools.combinations(range(1, min(w, p_max) + 1), t) if sum(c) == w}


def check_parts(parts, w, p_max):
    assert all(a < b for a, b in zip(parts, parts[1:]))
    assert sum(parts) == w
    assert not parts or parts[-1] <= p_max


def test_distinct_partitions_of_six():
    assert list(distinct_partitions(6, 8)) == [(6,), (1, 5), (2, 4), (1, 2, 3)]


def test_distinct_partitions_small_cases():
    assert list(distinct_partitions(1, 8)) == [(1,)]
    assert list(distinct_partitions(0, 8)) == [()]
    assert list(distinct_partitions(7, 4)) == [(3, 4), (1, 2, 4)]


def test_fixed_count_trace_w18_t4():
    got = list(fixed_count_partitions(18, 4, 18))
    assert len(got) == 15
    assert got[0] == (1, 2, 3, 12)
    assert got[-1] == (3, 4, 5, 6)
    assert got == list(fixed_count_partitions_literal(18, 4, 18))


def test_fixed_count_trivial_cases():
    assert list(fixed_count_partitions(6, 3, 10)) == [(1, 2, 3)]
    assert list(fixed_count_partitions(7, 3, 10)) == [(1, 2, 4)]
    assert list(fixed_count_partitions(5, 3, 10)) == []


@given(st.integers(0, 30), st.integers(1, 6), st.integers(1, 30))
@settings(max_examples=300)
def test_fixed_count_matches_bruteforce(w, t, p_max):
    got = list(fixed_count_partitions(w, t, p_max))
    assert len(got) == len(set(got))
    assert set(got) == brute(w, t, p_max)
    for parts in got:
        check_parts(parts, w, p_max)


@given(st.integers(0, 30), st.integers(1, 6), st.integers(1, 30))
@settings(max_examples=200)
def test_fast_generator_follows_literal_order(w, t, p_max):
    assert list(fixed_count_partitions(w, t, p_max)) == list(
        fixed_count_partitions_literal(w, t, p_max)
    )


def test_parity_partitions_examples():
    assert list(parity_partitions(5, E, 10)) == [(1, 4), (2, 3)]
    assert list(parity_partitions(5, O, 10)) == [(5,)]
    assert list(parity_partitions(3, E, 10)) == [(1, 2)]
    assert list(parity_partitions(3, O, 10)) == [(3,)]
    assert list(parity_partitions(0, E, 10)) == [()]
    assert list(parity_partitions(0, O, 10)) == []


@pytest.mark.parametrize("w", range(0, 41))
def test_parity_split_is_complete(w):
    odd = set(parity_partitions(w, O, 40))
    even = set(parity_partitions(w, E, 40))
    assert not odd & even
    assert odd | even == set(distinct_partitions(w, 40))
    assert set(parity_partitions(w, A, 40)) == odd | even


def test_streams_are_lazy():
    t0 = time.perf_counter()
    first = next(distinct_partitions(10**6, 10**6))
    assert first == (10**6,)
    assert next(fixed_count_partitions(10**6, 5, 10**6)) == (1, 2, 3, 4, 10**6 - 10)
    assert time.perf_counter() - t0 < 0.1


def test_bases_examples():
    b = enumerate_bases((E, O, O))
    assert [(x.f, x.min_total) for x in b] == [((0, 1, 1), 2), ((1, 1, 1), 5)]
    b = enumerate_bases((O, E))
    assert [(x.f, x.min_total) for x in b] == [((1, 0), 1), ((1, 1), 4)]
    assert [(x.f, x.min_total) for x in enumerate_bases((O, O))] == [((1, 1), 2)]
    assert len(enumerate_bases((E, E, A))) == 8


@pytest.mark.parametrize("s,w", [(0, 3), (1, 1)])
def test_min_subweight(s, w):
    assert Parity.from_bit(s).min_subweight == w == 3 - 2 * s


def vectors(w_L, parities, caps=(100, 100, 100, 100), tau=None):
    offs = TuningOffsets(tuple(tau)) if tau else None
    return [v.w for v in level1_compositions(w_L, parities, caps[: len(parities)], offs)]


def test_level1_examples():
    assert vectors(5, (E, O, O)) == [(0, 1, 4), (0, 2, 3), (0, 3, 2), (0, 4, 1), (3, 1, 1)]
    assert vectors(4, (E, O, O)) == [(0, 1, 3), (0, 2, 2), (0, 3, 1)]
    assert vectors(4, (O, E)) == [(4, 0), (1, 3)]
    # segment 2 frozen up to w_L = 3
    for w in (1, 2, 3):
        assert all(v[1] == 0 for v in vectors(w, (O, E)))


def brute_level1(w_L, parities, caps):
    out = set()
    ranges = []
    for p, c in zip(parities, caps):
        opts = [0] if p is not O else []
        opts += list(range(p.min_subweight, c + 1))
        ranges.append(opts)
    for v in itertools.product(*ranges):
        if sum(v) == w_L:
            out.add(v)
    return out


@given(
    st.lists(st.sampled_from([E, O, A]), min_size=1, max_size=4),
    st.lists(st.integers(1, 6), min_size=4, max_size=4),
    st.integers(1, 20),
)
@settings(max_examples=200)
def test_level1_matches_bruteforce(parities, lengths, w_L):
    caps = segment_caps(lengths[: len(parities)])
    got = [v.w for v in level1_compositions(w_L, parities, caps)]
    assert len(got) == len(set(got))
    assert set(got) == brute_level1(w_L, parities, caps)
    for v in level1_compositions(w_L, parities, caps):
        for wj, f in zip(v.w, v.base.f):
            assert (wj == 0) == (f == 0)


def level2_patterns(parities, lengths, tau, top):
    caps = segment_caps(lengths)
    offs = TuningOffsets(tuple(tau))
    seen = []
    for w_L in range(1, top + 1):
        for v in level1_compositions(w_L, parities, caps, offs):
            streams = [
                list(parity_partitions(v.w[j] - tau[j], parities[j], lengths[j])) if v.base.f[j]
                else [()]
                for j in range(len(parities))
            ]
            seen.extend(itertools.product(*streams))
    return seen


@pytest.mark.parametrize("parities", [(O, E), (E, E), (E, O), (A, E)])
@pytest.mark.parametrize("tau", [(0, 2), (3, 0), (1, 1)])
def test_offsets_only_reorder(parities, tau):
    lengths = (4, 4)
    top = sum(segment_caps(lengths)) + sum(tau)
    plain = level2_patterns(parities, lengths, (0, 0), top)
    tuned = level2_patterns(parities, lengths, tau, top)
    assert len(tuned) == len(set(tuned))
    assert sorted(plain) == sorted(tuned)


def test_offsets_postpone_both_segment_base():
    # tau_2 = 2 moves the first [1 1] vector from w_L = 4 to w_L = 6
    offs = TuningOffsets((0, 2))
    caps = segment_caps((32, 32))
    first = min(w for w in range(1, 12)
                for v in level1_compositions(w, (O, E), caps, offs) if v.base.f == (1, 1))
    assert first == 6


def test_tuning_worked_example():
    tau = offsets_from_counts((11, 3), (8.0, 8.0), 0.5)
    assert tau == (0, 2)
    assert TuningOffsets(tau).kappa((O, E)) == (1, 5)


def test_tuning_derived_examples():
    assert offsets_from_counts((8, 8, 0), (8.0, 8.0, 8.0), 1.0) == (0, 0, 1)
    assert offsets_from_counts((4, 4), (3.0, 5.0), 0.3) == (0, 0)


def test_tuning_rejects_nonpositive_rho():
    with pytest.raises(ValueError):
        offsets_from_counts((1, 2), (8.0, 8.0), 0.0)
    with pytest.raises(ValueError):
        tuning_offsets((1, 2), 0.2, -1.0, 0.5, (4, 4))


def test_tuning_offsets_uses_gaussian_count():
    t = tuning_offsets((5, 1), 0.2, 0.3, 0.45, (64, 64))
    p = detection_probability(0.2, 0.45)
    assert t.mu == pytest.approx((64 * 2 * p, 64 * 2 * p))
    assert t.tau[0] == 0 and t.tau[1] >= 1


def test_detection_probability_limits():
    assert detection_probability(0.2, 1e-3) == pytest.approx(0.0, abs=1e-12)
    assert 0 < detection_probability(0.2, 0.5) < 0.2
