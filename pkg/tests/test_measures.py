import random
from fractions import Fraction

import pytest

from shiftlab.measures import (
    MarkovMeasure,
    l2_distance_sq,
    measure_of,
    measure_of_constraints,
    sample_point,
    sample_point_in,
    stationary_vector,
)
from shiftlab.symbolic import (
    Cylinder,
    Sft,
    cylinder,
    point_in_set,
    resolve_constraints,
)

from .oracles import constraint_measure_oracle


# ---------------------------------------------------------------------------
# stationary_vector
# ---------------------------------------------------------------------------


def test_stationary_symmetric():
    assert stationary_vector([["1/2", "1/2"], ["1/2", "1/2"]]) == (
        Fraction(1, 2),
        Fraction(1, 2),
    )


def test_stationary_golden():
    # Solve pi_0 = pi_0/2 + pi_1, pi_0 + pi_1 = 1 by hand: (2/3, 1/3).
    assert stationary_vector([["1/2", "1/2"], ["1", "0"]]) == (
        Fraction(2, 3),
        Fraction(1, 3),
    )


def test_stationary_single_symbol():
    assert stationary_vector([["1"]]) == (Fraction(1),)


def test_stationary_rejects_reducible():
    with pytest.raises(ValueError):
        stationary_vector([["1", "0"], ["0", "1"]])


def test_stationary_rejects_bad_rows():
    with pytest.raises(ValueError):
        stationary_vector([["1/2", "1/3"], ["1/2", "1/2"]])


def test_stationary_fixed_point_exact():
    rng = random.Random(3)
    for _ in range(25):
        k = rng.randrange(2, 5)
        rows = []
        for _ in range(k):
            cuts = sorted(rng.randrange(0, 12) for _ in range(k - 1))
            parts = [a - b for a, b in zip(cuts + [12], [0] + cuts)]
            rows.append([Fraction(p, 12) for p in parts])
        for i in range(k):  # force irreducibility with a positive cycle
            j = (i + 1) % k
            if rows[i][j] == 0:
                donor = max(range(k), key=lambda c: rows[i][c])
                rows[i][j] += Fraction(1, 24)
                rows[i][donor] -= Fraction(1, 24)
        pi = stationary_vector(rows)
        assert sum(pi) == 1
        for j in range(k):
            assert sum(pi[i] * rows[i][j] for i in range(k)) == pi[j]


# ---------------------------------------------------------------------------
# measure_of
# ---------------------------------------------------------------------------


def test_measure_examples(bernoulli, golden):
    assert measure_of(bernoulli.measure, cylinder(bernoulli.sft, 0, "01")) == Fraction(1, 4)
    assert measure_of(golden.measure, cylinder(golden.sft, 0, "0")) == Fraction(2, 3)
    assert measure_of(golden.measure, cylinder(golden.sft, 0, "11")) == 0


def test_measure_shift_invariance(systems):
    for system in systems:
        for word in system.sft.legal_words(2):
            values = {
                measure_of(system.measure, cylinder(system.sft, i, word))
                for i in (-5, -1, 0, 3, 11)
            }
            assert len(values) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 10])
def test_measure_partition_of_unity(systems, n):
    for system in systems:
        total = sum(
            (measure_of(system.measure, cylinder(system.sft, 0, w))
             for w in system.sft.legal_words(n)),
            Fraction(0),
        )
        assert total == 1


# ---------------------------------------------------------------------------
# measure_of_constraints
# ---------------------------------------------------------------------------


def test_constraints_examples(bernoulli, golden):
    b0 = cylinder(bernoulli.sft, 0, "0")
    b1 = cylinder(bernoulli.sft, 0, "1")
    assert measure_of_constraints(bernoulli.measure, [(0, b0), (2, b1)]) == Fraction(1, 4)
    g0 = cylinder(golden.sft, 0, "0")
    assert measure_of_constraints(golden.measure, [(0, g0), (2, g0)]) == Fraction(1, 2)
    assert measure_of_constraints(golden.measure, []) == 1


def test_constraints_match_enumeration_oracle(systems):
    rng = random.Random(11)
    for _ in range(250):
        system = systems[rng.randrange(3)]
        sft = system.sft
        constraints = []
        for _ in range(rng.randrange(1, 4)):
            length = rng.randrange(1, 4)
            word = [rng.randrange(sft.alphabet_size) for _ in range(length)]
            constraints.append(
                (rng.randrange(0, 7), Cylinder(sft, rng.randrange(-2, 2), word).as_union())
            )
        direct = measure_of_constraints(system.measure, constraints)
        assert direct == constraint_measure_oracle(system.measure, constraints)


def test_constraints_match_resolve_path(systems):
    rng = random.Random(13)
    for _ in range(150):
        system = systems[rng.randrange(3)]
        sft = system.sft
        constraints = []
        for _ in range(rng.randrange(1, 4)):
            length = rng.randrange(1, 3)
            word = [rng.randrange(sft.alphabet_size) for _ in range(length)]
            constraints.append(
                (rng.randrange(0, 9), Cylinder(sft, rng.randrange(-2, 2), word).as_union())
            )
        direct = measure_of_constraints(system.measure, constraints)
        via = measure_of(system.measure, resolve_constraints(constraints, sft))
        assert direct == via


def test_constraints_monotone_under_refinement(golden):
    rng = random.Random(17)
    sft = golden.sft
    for _ in range(80):
        constraints = []
        mu_prev = Fraction(1)
        for step in range(3):
            length = rng.randrange(1, 3)
            word = [rng.randrange(2) for _ in range(length)]
            constraints.append(
                (rng.randrange(0, 6), Cylinder(sft, rng.randrange(-1, 2), word).as_union())
            )
            mu = measure_of_constraints(golden.measure, constraints)
            assert mu <= mu_prev
            mu_prev = mu


def test_bridged_measure_far_apart(bernoulli):
    b0 = cylinder(bernoulli.sft, 0, "0")
    constraints = [(0, b0), (100, b0)]
    assert measure_of_constraints(bernoulli.measure, constraints) == Fraction(1, 4)
    resolved = resolve_constraints(constraints, bernoulli.sft)
    assert resolved.bridged
    assert measure_of(bernoulli.measure, resolved) == Fraction(1, 4)


# ---------------------------------------------------------------------------
# l2 distance
# ---------------------------------------------------------------------------


def test_l2_examples(bernoulli):
    b0 = cylinder(bernoulli.sft, 0, "0")
    b1 = cylinder(bernoulli.sft, 0, "1")
    assert l2_distance_sq(bernoulli.measure, [(0, b0)], [(0, b0)]) == 0
    assert l2_distance_sq(bernoulli.measure, [(0, b0)], [(1, b0)]) == Fraction(1, 2)
    assert l2_distance_sq(bernoulli.measure, [(0, b0)], [(0, b1)]) == 1


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def test_sampling_deterministic(golden):
    a = sample_point(golden.measure, -5, 50, seed=99)
    b = sample_point(golden.measure, -5, 50, seed=99)
    assert a.symbols == b.symbols
    c = sample_point(golden.measure, -5, 50, seed=100)
    assert a.symbols != c.symbols


def test_sampling_single_symbol_alphabet():
    sft = Sft(1, [[True]])
    m = MarkovMeasure(sft, [["1"]])
    p = sample_point(m, 0, 9, seed=1)
    assert p.symbols == (0,) * 10


def test_sampling_respects_transitions(golden):
    p = sample_point(golden.measure, 0, 4000, seed=5)
    assert golden.sft.word_allowed(p.symbols)


def test_sampling_frequency(bernoulli):
    n = 100_000
    ok = 0
    for seed in range(10):
        p = sample_point(bernoulli.measure, 0, n - 1, seed=seed)
        freq = sum(1 for s in p.symbols if s == 0) / n
        if 0.49 <= freq <= 0.51:
            ok += 1
    assert ok >= 9


def test_sample_point_in_cell(golden):
    cell = cylinder(golden.sft, 0, "01")
    for seed in range(6):
        p = sample_point_in(golden.measure, cell, -20, 40, seed=seed)
        assert point_in_set(p, cell)
        assert golden.sft.word_allowed(p.symbols)


def test_sample_point_in_conditional_law(golden):
    # Conditional frequency of x_2 = 0 given x_0 = 0, x_1 = 0: P(0->0) = 1/2.
    cell = cylinder(golden.sft, 0, "00")
    hits = total = 0
    for seed in range(400):
        p = sample_point_in(golden.measure, cell, 0, 4, seed=seed)
        total += 1
        hits += p.eval(2) == 0
    assert abs(hits / total - 0.5) < 0.08
