import random
from fractions import Fraction

import pytest

from shiftlab.errors import CapExceededError
from shiftlab.independence import (
    ConstantE,
    TableE,
    bad_constant_e,
    classify_in_pair,
    e_min_measure,
    full_e,
    independence_density_profile,
    is_independence_set,
    max_independence_subset,
    point_neighborhood,
    random_table_e,
    separating_depth,
)
from shiftlab.measures import measure_of, measure_of_constraints
from shiftlab.panel import periodic_point
from shiftlab.symbolic import CylinderUnion, Cylinder, cylinder, whole_space

from .oracles import independence_oracle


def _random_union(rng, sft, max_len=2):
    words = [w for length in range(1, max_len + 1) for w in sft.legal_words(length)]
    picks = [
        Cylinder(sft, rng.randrange(-2, 2), words[rng.randrange(len(words))])
        for _ in range(rng.randrange(1, 3))
    ]
    return CylinderUnion(sft, picks)


# ---------------------------------------------------------------------------
# is_independence_set
# ---------------------------------------------------------------------------


def test_examples_full_shift(bernoulli):
    sft = bernoulli.sft
    a0 = cylinder(sft, 0, "0")
    a1 = cylinder(sft, 0, "1")
    assert is_independence_set(sft, a0, a1, [0, 1, 2], full_e(sft))


def test_examples_golden(golden):
    sft = golden.sft
    a0 = cylinder(sft, 0, "0")
    a1 = cylinder(sft, 0, "1")
    assert not is_independence_set(sft, a0, a1, [0, 1], full_e(sft))
    assert is_independence_set(sft, a0, a1, [0, 2], full_e(sft))


def test_empty_set_and_empty_target(golden):
    sft = golden.sft
    a0 = cylinder(sft, 0, "0")
    empty = cylinder(sft, 0, "11")
    assert is_independence_set(sft, a0, a0, [], full_e(sft))
    assert not is_independence_set(sft, empty, a0, [0], full_e(sft))


def test_sigma_cap_enforced(bernoulli):
    sft = bernoulli.sft
    # Union targets force the enumeration path, which refuses past the cap.
    u = cylinder(sft, 0, "00").union(cylinder(sft, 0, "11"))
    v = cylinder(sft, 0, "01").union(cylinder(sft, 0, "10"))
    with pytest.raises(CapExceededError):
        is_independence_set(sft, u, v, range(21), full_e(sft), sigma_cap=20)


def test_checker_matches_word_oracle(systems):
    rng = random.Random(97)
    for _ in range(250):
        system = systems[rng.randrange(3)]
        sft = system.sft
        a1 = _random_union(rng, sft)
        a2 = _random_union(rng, sft)
        i_set = sorted(rng.sample(range(7), rng.randrange(1, 4)))
        if rng.random() < 0.4:
            e = full_e(sft)
        else:
            e = ConstantE(_random_union(rng, sft).complement())
            if e.set.is_empty:
                continue
        got = is_independence_set(sft, a1, a2, i_set, e)
        want = independence_oracle(sft, a1, a2, i_set, e)
        assert got == want, (system.id, a1, a2, i_set, e.describe())


def test_checker_matches_oracle_with_table_e(golden):
    rng = random.Random(31)
    sft = golden.sft
    for _ in range(60):
        a1 = cylinder(sft, 0, "0")
        a2 = cylinder(sft, 0, "1")
        overrides = tuple(
            (s, _random_union(rng, sft).complement())
            for s in sorted(rng.sample(range(6), 2))
        )
        if any(v.is_empty for _s, v in overrides):
            continue
        e = TableE(default=whole_space(sft), overrides=overrides)
        i_set = sorted(rng.sample(range(6), rng.randrange(1, 5)))
        assert is_independence_set(sft, a1, a2, i_set, e) == independence_oracle(
            sft, a1, a2, i_set, e
        )


def test_sweep_path_matches_word_oracle(systems, monkeypatch):
    """Force every segment through the coordinate sweep and re-verify."""
    import shiftlab.independence as ind

    monkeypatch.setattr(ind, "SEGMENT_COMBO_CAP", 0)
    rng = random.Random(63)
    for _ in range(150):
        system = systems[rng.randrange(3)]
        sft = system.sft
        words = [w for length in (1, 2, 3) for w in sft.legal_words(length)]
        a1 = cylinder(sft, rng.randrange(-2, 2), words[rng.randrange(len(words))])
        a2 = cylinder(sft, rng.randrange(-2, 2), words[rng.randrange(len(words))])
        i_set = sorted(rng.sample(range(8), rng.randrange(1, 5)))
        if rng.random() < 0.5:
            e = full_e(sft)
        else:
            e = ConstantE(_random_union(rng, sft).complement())
            if e.set.is_empty:
                continue
        got = is_independence_set(sft, a1, a2, i_set, e)
        want = independence_oracle(sft, a1, a2, i_set, e)
        assert got == want, (system.id, a1, a2, i_set, e.describe())


def test_long_chain_sweep(bernoulli):
    """Consistent-overlap chains too long to enumerate stay exact."""
    sft = bernoulli.sft
    u = cylinder(sft, -1, "111")
    v = cylinder(sft, -1, "101")
    chain = list(range(0, 26, 2))  # 13 pins, pairwise-overlapping placements
    assert is_independence_set(sft, u, v, chain, full_e(sft))
    assert not is_independence_set(sft, u, v, chain + [1], full_e(sft))


def test_monotone_pruning_soundness(systems):
    """Failing sets never succeed after adding elements."""
    rng = random.Random(55)
    for _ in range(120):
        system = systems[rng.randrange(3)]
        sft = system.sft
        a1 = _random_union(rng, sft, max_len=1)
        a2 = _random_union(rng, sft, max_len=1)
        base = sorted(rng.sample(range(8), rng.randrange(1, 4)))
        if is_independence_set(sft, a1, a2, base, full_e(sft)):
            continue
        extra = sorted(set(base) | set(rng.sample(range(10), 2)))
        assert not is_independence_set(sft, a1, a2, extra, full_e(sft))


# ---------------------------------------------------------------------------
# max_independence_subset
# ---------------------------------------------------------------------------


def test_max_subset_full_shift(bernoulli):
    sft = bernoulli.sft
    rep = max_independence_subset(
        sft, cylinder(sft, 0, "0"), cylinder(sft, 0, "1"), range(6), full_e(sft)
    )
    assert rep.best == (0, 1, 2, 3, 4, 5) and rep.ratio == 1 and rep.exhaustive


def test_max_subset_golden_law(golden):
    sft = golden.sft
    a0, a1 = cylinder(sft, 0, "0"), cylinder(sft, 0, "1")
    rep = max_independence_subset(sft, a0, a1, range(6), full_e(sft))
    assert rep.best == (0, 2, 4) and rep.ratio == Fraction(1, 2)


def test_max_subset_empty_target(golden):
    sft = golden.sft
    rep = max_independence_subset(
        sft, cylinder(sft, 0, "11"), cylinder(sft, 0, "0"), range(5), full_e(sft)
    )
    assert rep.best == () and rep.ratio == 0


def test_max_subset_matches_plain_enumeration(systems):
    rng = random.Random(71)
    for _ in range(25):
        system = systems[rng.randrange(3)]
        sft = system.sft
        a1 = _random_union(rng, sft, max_len=1)
        a2 = _random_union(rng, sft, max_len=1)
        n = rng.randrange(3, 9)
        e = full_e(sft)
        rep = max_independence_subset(sft, a1, a2, range(n), e)
        brute = 0
        for mask in range(1 << n):
            subset = [i for i in range(n) if mask >> i & 1]
            if len(subset) > brute and is_independence_set(sft, a1, a2, subset, e):
                brute = len(subset)
        assert len(rep.best) == brute, (system.id, a1, a2, n)


def test_e_map_monotonicity(golden):
    """Shrinking E(s) never enlarges the best independence subset."""
    sft = golden.sft
    a0, a1 = cylinder(sft, 0, "0"), cylinder(sft, 0, "1")
    rng = random.Random(19)
    for _ in range(30):
        big = _random_union(rng, sft).complement()
        if big.is_empty:
            continue
        smaller_words = big.words[: max(1, len(big.words) - 1)]
        small = CylinderUnion(sft, [Cylinder(sft, big.start, w) for w in smaller_words])
        rep_big = max_independence_subset(sft, a0, a1, range(7), ConstantE(big))
        rep_small = max_independence_subset(sft, a0, a1, range(7), ConstantE(small))
        assert len(rep_small.best) <= len(rep_big.best)


def test_profile_examples(bernoulli, golden, cycle4):
    b = independence_density_profile(
        bernoulli.sft,
        bernoulli.measure,
        cylinder(bernoulli.sft, 0, "0"),
        cylinder(bernoulli.sft, 0, "1"),
        range(1, 13),
        [full_e(bernoulli.sft)],
    )
    assert all(rep.ratio == 1 for rep in b)
    g = independence_density_profile(
        golden.sft,
        golden.measure,
        cylinder(golden.sft, 0, "0"),
        cylinder(golden.sft, 0, "1"),
        range(1, 13),
        [full_e(golden.sft)],
    )
    for rep in g:
        n = len(rep.window)
        assert rep.ratio == Fraction((n + 1) // 2, n)
    c = independence_density_profile(
        cycle4.sft,
        cycle4.measure,
        cylinder(cycle4.sft, 0, [0]),
        cylinder(cycle4.sft, 0, [1]),
        [4, 8, 16],
        [full_e(cycle4.sft)],
    )
    assert [len(rep.best) for rep in c] == [1, 1, 1]


# ---------------------------------------------------------------------------
# Adversarial maps
# ---------------------------------------------------------------------------


def test_bad_constant_e_examples(bernoulli):
    m = bernoulli.measure
    sft = bernoulli.sft
    x = whole_space(sft)
    assert bad_constant_e(m, 0, 1, x, x).set.is_empty
    e = bad_constant_e(m, 0, 1, cylinder(sft, 0, "0"), cylinder(sft, 0, "1"))
    assert measure_of(m, e.set) == Fraction(3, 4)
    target = measure_of_constraints(m, [(0, cylinder(sft, 0, "0")), (1, cylinder(sft, 0, "1"))])
    assert measure_of(m, e.set) == 1 - target


def test_bad_constant_e_infeasible_pair(golden):
    one = cylinder(golden.sft, 0, "1")
    e = bad_constant_e(golden.measure, 0, 1, one, one)
    assert e.set.is_full and measure_of(golden.measure, e.set) == 1


def test_random_table_e_measure_floor(systems):
    for system in systems:
        for seed in range(8):
            e = random_table_e(system.measure, Fraction(1, 50), seed=seed)
            assert e_min_measure(e, system.measure, range(24)) >= Fraction(49, 50)


# ---------------------------------------------------------------------------
# classify_in_pair
# ---------------------------------------------------------------------------


def test_classify_requires_distinct_points(bernoulli):
    zeros = periodic_point(bernoulli.sft, "0")
    with pytest.raises(ValueError):
        classify_in_pair(bernoulli.sft, bernoulli.measure, zeros, zeros, 2)


def test_classify_panel_signs(bernoulli, cycle4):
    zeros = periodic_point(bernoulli.sft, "0")
    ones = periodic_point(bernoulli.sft, "1")
    assert classify_in_pair(bernoulli.sft, bernoulli.measure, zeros, ones, 3).is_positive
    r0 = periodic_point(cycle4.sft, [0, 1, 2, 3])
    r1 = periodic_point(cycle4.sft, [1, 2, 3, 0])
    assert classify_in_pair(cycle4.sft, cycle4.measure, r0, r1, 1).is_negative


def test_separating_depth(bernoulli):
    zeros = periodic_point(bernoulli.sft, "0")
    ones = periodic_point(bernoulli.sft, "1")
    assert separating_depth(zeros, ones, 3) == 0
    assert separating_depth(zeros, zeros, 3) is None
    u = point_neighborhood(zeros, 1)
    assert u == cylinder(bernoulli.sft, -1, "000")
