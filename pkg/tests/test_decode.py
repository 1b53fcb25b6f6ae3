import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EX_R, toy_code_12_6
from grandlab.codes import codewords, get_code
from grandlab.decode import (
    Tuning,
    bpsk,
    equidistant_sed_check,
    hard_decision,
    logistic_weight,
    ml_bruteforce,
    orbgrand,
    reliability_order,
    sed,
    segmented_orbgrand,
    segmented_schedule,
)
from grandlab.gf2 import BitVec, syndrome
from grandlab.patterngen import Parity, TuningOffsets, distinct_partitions
from grandlab.segmentation import Segmentation, find_segments

E, O, A = Parity.EVEN, Parity.ODD, Parity.ANY
reals = st.floats(-3, 3, allow_nan=False)


def test_logistic_weight():
    assert logistic_weight([1, 1, 1, 0, 0, 0, 0, 0]) == 6
    assert logistic_weight([0] * 8) == 0
    assert logistic_weight(BitVec.from_support([6], 8)) == 6


def test_sed_examples():
    assert sed([0.5, -1.2], BitVec.from_bits([0, 1])) == pytest.approx(0.29)
    c = BitVec.from_bits([0, 1, 1, 0])
    assert sed(bpsk(c), c) == 0
    with pytest.raises(ValueError):
        sed([1.0], c)


@given(st.lists(reals, min_size=1, max_size=10), st.data())
def test_single_flip_changes_sed_by_4r(r, data):
    r = np.array(r)
    y = hard_decision(r)
    i = data.draw(st.integers(1, len(r)))
    d = sed(r, y ^ BitVec.from_support([i], len(r))) - sed(r, y)
    assert d == pytest.approx(4 * abs(r[i - 1]), abs=1e-9)


def test_hard_decision_zero_maps_to_zero():
    assert hard_decision([0.0, -0.0, -1e-9, 1e-9]).bits() == [0, 0, 1, 0]


def test_reliability_order_examples():
    seg = Segmentation(8, ((1, 3, 5, 6, 8), (2, 4, 7)), (None, BitVec.from_support([2, 4, 7], 8)))
    o = reliability_order(EX_R, seg)
    assert o.perm == (6, 1, 7, 3, 8, 5, 2, 4)
    assert o.local == ((6, 1, 3, 8, 5), (7, 2, 4))


def test_reliability_ties_stable():
    assert reliability_order([0.5, -0.5, 0.5, 0.1]).perm == (4, 1, 2, 3)


def test_worked_example_patterns():
    perm = reliability_order(EX_R).perm
    want = {
        (6,): [0, 0, 0, 0, 1, 0, 0, 0],
        (1, 5): [0, 0, 0, 0, 0, 1, 0, 1],
        (2, 4): [1, 0, 1, 0, 0, 0, 0, 0],
        (1, 2, 3): [1, 0, 0, 0, 0, 1, 1, 0],
    }
    parts = list(distinct_partitions(6, 8))
    assert parts == list(want)
    for part in parts:
        e = BitVec.from_support([perm[i - 1] for i in part], 8)
        assert e.bits() == want[part]


def test_two_level_pattern_for_w6():
    # sub-weights [2 4] with s = (1, 0) on the segments {2,4,7} and {1,3,5,6,8}
    seg_sets = ((2, 4, 7), (1, 3, 5, 6, 8))
    local = reliability_order(EX_R, Segmentation(8, ((1, 3, 5, 6, 8), (2, 4, 7)), (None, None))).local
    local = (local[1], local[0])
    pats = [s for w, s in segmented_schedule((3, 5), (O, E)) if w == 6]
    starts = (0, 3)
    mapped = []
    for slots in pats:
        coords = []
        for k in slots:
            j = 0 if k < 3 else 1
            coords.append(local[j][k - starts[j]])
        mapped.append(sorted(coords))
    assert sorted([2, 3, 6]) in mapped
    assert all(set(c) & set(seg_sets[0]) for c in mapped)


def test_orbgrand_exact_codeword():
    c = get_code("ehamming8_4")
    word = BitVec(codewords(c)[5], 8)
    res = orbgrand(c, bpsk(word), 10)
    assert res.codeword == word and res.queries == 0 and not res.abandoned


def test_orbgrand_single_flip_least_reliable():
    c = get_code("ehamming8_4")
    word = BitVec(codewords(c)[9], 8)
    r = bpsk(word)
    r[3] = -0.1 * r[3]
    res = orbgrand(c, r, 100)
    assert (res.codeword, res.queries, res.w_l) == (word, 1, 1)


def test_abandonment():
    c = get_code("ebch32_21")
    rng = np.random.default_rng(3)
    r = rng.normal(0, 1, 32)
    res = orbgrand(c, r, 3)
    if res.abandoned:
        assert res.queries == 3 and res.codeword is None
    with pytest.raises(ValueError):
        orbgrand(c, r, 0)


def all_valid_patterns(code, r):
    """Every error vector leading to a codeword, as (global w_L, local w_L, e)."""
    y = hard_decision(r)
    perm = reliability_order(r).perm
    rank_of = {c: i for i, c in enumerate(perm, start=1)}
    out = []
    for w in codewords(code):
        e = BitVec(w ^ y.word, code.n)
        out.append((sum(rank_of[i] for i in e.support()), e))
    return out


def local_weight(e, r, seg):
    order = reliability_order(r, seg)
    total = 0
    for loc in order.local:
        pos = {c: i for i, c in enumerate(loc, start=1)}
        total += sum(pos[i] for i in e.support() if i in pos)
    return total


def test_minimal_wl_both_decoders():
    code = get_code("ehamming8_4")
    seg = find_segments(code.H)
    rng = np.random.default_rng(11)
    for _ in range(300):
        r = rng.normal(0, 1, 8) + 0.6
        valid = all_valid_patterns(code, r)
        a = orbgrand(code, r, 10**6)
        assert a.w_l == min(w for w, _ in valid)
        b = segmented_orbgrand(code, seg, r, 10**6)
        assert b.w_l == min(local_weight(e, r, seg) for _, e in valid)
        assert syndrome(code.H, b.codeword).weight == 0


def test_segmented_stream_is_exhaustive_on_toy_code():
    code = toy_code_12_6()
    seg = Segmentation.from_sets(code.H, [range(1, 7), range(7, 13)])
    for parities in itertools.product((E, O), repeat=2):
        pats = [s for _, s in segmented_schedule(seg.lengths, parities)]
        vecs = {frozenset(p) for p in pats}
        assert len(vecs) == len(pats)
        want = 2**10 - (1 if parities == (E, E) else 0)  # zero pattern is query 0
        assert len(vecs) == want
        for v in vecs:
            assert parities[0].accepts(sum(1 for k in v if k < 6))
            assert parities[1].accepts(sum(1 for k in v if k >= 6))


@pytest.mark.parametrize("parities", [(O, E), (A, O, E), (E, E, A)])
def test_segmented_stream_no_duplicates(parities):
    lengths = (3, 4, 3)[: len(parities)]
    pats = [s for _, s in segmented_schedule(lengths, parities)]
    assert len(pats) == len(set(pats))
    w = [w for w, _ in segmented_schedule(lengths, parities)]
    assert w == sorted(w)


def test_frozen_segment_at_low_weights():
    sched = list(segmented_schedule((4, 4), (O, E)))
    low = [s for w, s in sched if w <= 3]
    assert low and all(k < 4 for s in low for k in s)


def test_segmented_emits_only_constraint_patterns():
    code = get_code("ebch32_21")
    seg = find_segments(code.H)
    rng = np.random.default_rng(5)
    for _ in range(20):
        r = rng.normal(0.8, 0.6, 32)
        res = segmented_orbgrand(code, seg, r, 10**4)
        if not res.abandoned:
            y = hard_decision(r)
            s = [BitVec(row.word & y.word, 32).weight % 2 for row in seg.rows]
            got = [BitVec(row.word & res.error.word, 32).weight % 2 for row in seg.rows]
            assert s == got


def test_segmented_with_offsets_still_valid():
    code = get_code("ebch32_21")
    seg = find_segments(code.H)
    rng = np.random.default_rng(6)
    for _ in range(20):
        r = rng.normal(0.8, 0.6, 32)
        for tuning in (TuningOffsets((0, 2)), Tuning(0.2, 0.3, 0.6)):
            res = segmented_orbgrand(code, seg, r, 10**5, tuning)
            assert res.abandoned or syndrome(code.H, res.codeword).weight == 0


def test_tuning_parameters_validated():
    with pytest.raises(ValueError):
        Tuning(0.2, 0.0, 0.5)
    with pytest.raises(ValueError):
        Tuning(-0.2, 0.3, 0.5)


def test_ml_bruteforce():
    code = get_code("ehamming8_4")
    word = BitVec(codewords(code)[3], 8)
    c, d = ml_bruteforce(code, bpsk(word))
    assert c == word and d == 0
    with pytest.raises(ValueError):
        ml_bruteforce(get_code("ebch128_106"), np.zeros(128))


def test_ml_agrees_with_pattern_minimum():
    code = get_code("ehamming8_4")
    rng = np.random.default_rng(9)
    for _ in range(1000):
        r = rng.normal(0, 1, 8)
        c, d = ml_bruteforce(code, r)
        # independent enumeration: all 2^8 error patterns that hit a codeword
        y = hard_decision(r)
        best = min(
            sed(r, y ^ BitVec(e, 8)) for e in range(256)
            if syndrome(code.H, y ^ BitVec(e, 8)).weight == 0
        )
        assert d == pytest.approx(best, abs=1e-12)


def test_ml_continuity():
    code = get_code("ehamming8_4")
    r = np.random.default_rng(1).normal(0, 1, 8)
    d0 = ml_bruteforce(code, r)[1]
    r[2] += 1e-7
    assert abs(ml_bruteforce(code, r)[1] - d0) < 1e-5


def test_equidistant_sed():
    assert equidistant_sed_check(8, 0.1, 6) == pytest.approx(2.4, rel=1e-9)
    assert equidistant_sed_check(8, 0.1, 1) == pytest.approx(0.4, rel=1e-9)
    assert equidistant_sed_check(8, 0.1, 0) == 0


def test_decode_record_fields():
    code = get_code("ehamming8_4")
    rec = orbgrand(code, EX_R, 100).to_record()
    assert set(rec) == {"codeword_hex", "queries", "abandoned", "sed", "w_l"}
