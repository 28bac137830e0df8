"""Exact Markov measures on subshifts of finite type.

Measures of cylinders come from mu([w]_i) = pi_{w_0} * prod P[w_j][w_{j+1}]
(independent of i by stationarity); measures of shifted intersections use the
same chain with exact transition-matrix powers across unconstrained gaps.
Everything here is a fractions.Fraction; floats never enter set arithmetic.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Sequence, Union

from .errors import ShiftLabError
from .symbolic import (
    BridgedBlocks,
    Cylinder,
    CylinderUnion,
    EmptyIntersection,
    SampledWindow,
    SetLike,
    Sft,
    ShiftedConstraintSet,
    Word,
    constraint_atoms,
    _cluster_constraints,
    _EMPTY,
)

Rational = Union[Fraction, int, str]


def as_fraction(value: Rational) -> Fraction:
    """Parse exact rationals; strings use the "p/q" form."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"not an exact rational: {value!r}")


def stationary_vector(transition: Sequence[Sequence[Rational]]) -> tuple[Fraction, ...]:
    """The unique probability vector pi with pi P = pi, by exact elimination.

    Requires a row-stochastic matrix whose positive-entry graph is strongly
    connected; a reducible chain (non-unique pi) raises.
    """
    P = [[as_fraction(v) for v in row] for row in transition]
    k = len(P)
    if any(len(row) != k for row in P):
        raise ValueError("transition matrix must be square")
    for i, row in enumerate(P):
        if sum(row) != 1:
            raise ValueError(f"transition row {i} does not sum to 1 exactly")
        if any(v < 0 for v in row):
            raise ValueError(f"transition row {i} has a negative entry")
    succ = [[j for j in range(k) if P[i][j] > 0] for i in range(k)]
    for start in range(k):
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != k:
            raise ValueError("reducible chain: stationary vector is not unique")

    # Solve (P^T - I) pi = 0 with sum(pi) = 1 by Gaussian elimination.
    rows = [[P[j][i] - (1 if i == j else 0) for j in range(k)] + [Fraction(0)] for i in range(k)]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    pivots: list[tuple[int, int]] = []
    r = 0
    for col in range(k):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][col]
        rows[r] = [v / inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append((r, col))
        r += 1
    if r < k:
        raise ValueError("reducible chain: stationary vector is not unique")
    pi = [Fraction(0)] * k
    for row, col in pivots:
        pi[col] = rows[row][k]
    if any(v < 0 for v in pi) or sum(pi) != 1:
        raise ShiftLabError("elimination produced an invalid stationary vector")
    return tuple(pi)


class MarkovMeasure:
    """A shift-invariant Markov measure compatible with an SFT.

    The stationary vector is always computed, never supplied, and the
    positive-transition graph must be irreducible so the shift measure is
    ergodic.
    """

    def __init__(self, sft: Sft, transition: Sequence[Sequence[Rational]]):
        P = tuple(tuple(as_fraction(v) for v in row) for row in transition)
        k = sft.alphabet_size
        if len(P) != k or any(len(row) != k for row in P):
            raise ValueError("transition matrix shape must match the alphabet")
        for a in range(k):
            for b in range(k):
                if P[a][b] > 0 and not sft.allowed[a][b]:
                    raise ValueError(
                        f"transition {a}->{b} has positive probability but is forbidden"
                    )
        self.sft = sft
        self.transition = P
        self.stationary = stationary_vector(P)
        self._pow_cache: dict[int, tuple[tuple[Fraction, ...], ...]] = {}

    def matrix_power(self, steps: int) -> tuple[tuple[Fraction, ...], ...]:
        if steps < 0:
            raise ValueError("steps must be >= 0")
        cached = self._pow_cache.get(steps)
        if cached is not None:
            return cached
        k = self.sft.alphabet_size
        if steps == 0:
            result = tuple(
                tuple(Fraction(1 if a == b else 0) for b in range(k)) for a in range(k)
            )
        elif steps == 1:
            result = self.transition
        else:
            half = self.matrix_power(steps // 2)
            result = _mat_mul(half, half)
            if steps % 2:
                result = _mat_mul(result, self.transition)
        self._pow_cache[steps] = result
        return result

    def word_weight(self, word: Word) -> Fraction:
        """pi at the first symbol times the transition products along the word."""
        weight = self.stationary[word[0]]
        for a, b in zip(word, word[1:]):
            weight *= self.transition[a][b]
            if weight == 0:
                return Fraction(0)
        return weight

    def _inner_weight(self, word: Word) -> Fraction:
        weight = Fraction(1)
        for a, b in zip(word, word[1:]):
            weight *= self.transition[a][b]
            if weight == 0:
                break
        return weight

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MarkovMeasure)
            and self.sft == other.sft
            and self.transition == other.transition
        )

    def __hash__(self) -> int:
        return hash((self.sft, self.transition))

    def __repr__(self) -> str:
        return f"MarkovMeasure(k={self.sft.alphabet_size})"


def _mat_mul(x, y):
    k = len(x)
    return tuple(
        tuple(sum((x[a][c] * y[c][b] for c in range(k)), Fraction(0)) for b in range(k))
        for a in range(k)
    )


def measure_of(m: MarkovMeasure, s: SetLike) -> Fraction:
    """Exact measure of a cylinder, union, or block-form set."""
    if isinstance(s, EmptyIntersection):
        return Fraction(0)
    if isinstance(s, Cylinder):
        return Fraction(0) if s.is_empty else m.word_weight(s.word)
    if isinstance(s, CylinderUnion):
        if s.is_empty:
            return Fraction(0)
        if s.is_full:
            return Fraction(1)
        return sum((m.word_weight(w) for w in s.words), Fraction(0))
    if isinstance(s, BridgedBlocks):
        return _chain_measure(m, s.blocks())
    raise TypeError(f"not a measurable set representation: {s!r}")


def _chain_measure(m: MarkovMeasure, blocks) -> Fraction:
    """Chain formula over disjoint blocks with matrix powers across gaps."""
    k = m.sft.alphabet_size
    first_start, first_words = blocks[0]
    vec = [Fraction(0)] * k
    for w in first_words:
        vec[w[-1]] += m.stationary[w[0]] * m._inner_weight(w)
    prev_end = first_start + len(first_words[0]) - 1
    for start, words in blocks[1:]:
        power = m.matrix_power(start - prev_end)
        carried = [
            sum((vec[c] * power[c][d] for c in range(k)), Fraction(0)) for d in range(k)
        ]
        nxt = [Fraction(0)] * k
        for w in words:
            nxt[w[-1]] += carried[w[0]] * m._inner_weight(w)
        vec = nxt
        prev_end = start + len(words[0]) - 1
    return sum(vec, Fraction(0))


def measure_of_constraints(m: MarkovMeasure, constraints: ShiftedConstraintSet) -> Fraction:
    """mu of the intersection of T^{-shift}(set) without enumerating it.

    Agrees exactly with measure_of(resolve_constraints(...)) whenever the
    latter enumerates; an empty constraint list measures the whole space.
    """
    atoms = constraint_atoms(constraints, m.sft)
    if atoms is _EMPTY:
        return Fraction(0)
    if not atoms:
        return Fraction(1)
    blocks = _cluster_constraints(m.sft, atoms)
    if isinstance(blocks, EmptyIntersection):
        return Fraction(0)
    return _chain_measure(m, blocks)


def l2_distance_sq(
    m: MarkovMeasure, a: ShiftedConstraintSet, b: ShiftedConstraintSet
) -> Fraction:
    """||1_A - 1_B||_2^2 = mu(A) + mu(B) - 2 mu(A intersect B), exactly.

    A and B are given as shifted constraint sets; zero iff they agree up to
    a mu-null set.
    """
    mu_a = measure_of_constraints(m, a)
    mu_b = measure_of_constraints(m, b)
    mu_ab = measure_of_constraints(m, list(a) + list(b))
    return mu_a + mu_b - 2 * mu_ab


def _draw_bounds(weights: Sequence[Fraction]) -> list[int]:
    """Integer thresholds so that a 64-bit uniform r selects the first index
    with r < ceil(cumsum * 2^64); identical to comparing Fraction(r, 2^64)
    against the exact cumulative sums."""
    bounds = []
    acc = Fraction(0)
    for w in weights:
        acc += w
        bounds.append(math.ceil(acc * (1 << 64)))
    return bounds


def _draw_from_bounds(rng: random.Random, bounds: Sequence[int]) -> int:
    r = rng.getrandbits(64)
    for i, b in enumerate(bounds):
        if r < b:
            return i
    return len(bounds) - 1


def _draw(rng: random.Random, weights: Sequence[Fraction]) -> int:
    """Exact categorical draw via a 64-bit uniform against Fraction cumsums."""
    return _draw_from_bounds(rng, _draw_bounds(weights))


def sample_point(m: MarkovMeasure, lo: int, hi: int, seed: int) -> SampledWindow:
    """A stationary sample of the chain on [lo, hi]; identical seeds reproduce.

    The symbol at lo is drawn from the stationary vector and the rest follow
    the transition rows, so the window is a stationary sample regardless of
    its placement.
    """
    if lo > hi:
        raise ValueError("lo must be <= hi")
    rng = random.Random(seed)
    row_bounds = [_draw_bounds(row) for row in m.transition]
    symbols = [_draw(rng, m.stationary)]
    for _ in range(hi - lo):
        symbols.append(_draw_from_bounds(rng, row_bounds[symbols[-1]]))
    return SampledWindow(m.sft, lo, hi, symbols, seed)


def sample_point_in(
    m: MarkovMeasure, cell: CylinderUnion, lo: int, hi: int, seed: int
) -> SampledWindow:
    """A sample of the chain on [lo, hi] conditioned to lie in `cell`.

    The cell word is drawn with probability proportional to its weight, the
    window extends rightward by the transition rows and leftward by the
    exact time-reversed chain, so the result is a stationary sample
    conditioned on membership.
    """
    if cell.is_empty:
        raise ValueError("cannot sample inside an empty cell")
    if cell.is_full:
        return sample_point(m, lo, hi, seed)
    c_lo, c_hi = cell.support
    if lo > c_lo or hi < c_hi:
        raise ValueError("window must cover the cell support")
    weights = [m.word_weight(w) for w in cell.words]
    total = sum(weights, Fraction(0))
    if total == 0:
        raise ValueError("cell has measure zero")
    rng = random.Random(seed)
    idx = _draw(rng, [w / total for w in weights])
    word = list(cell.words[idx])

    row_bounds = [_draw_bounds(row) for row in m.transition]
    for _ in range(hi - c_hi):
        word.append(_draw_from_bounds(rng, row_bounds[word[-1]]))
    pi = m.stationary
    reverse_bounds = {}
    prefix: list[int] = []
    for _ in range(c_lo - lo):
        b = word[0] if not prefix else prefix[-1]
        if b not in reverse_bounds:
            reverse = [
                (pi[a] * m.transition[a][b] / pi[b]) if pi[b] > 0 else Fraction(0)
                for a in range(m.sft.alphabet_size)
            ]
            reverse_bounds[b] = _draw_bounds(reverse)
        prefix.append(_draw_from_bounds(rng, reverse_bounds[b]))
    word = list(reversed(prefix)) + word
    return SampledWindow(m.sft, lo, hi, word, seed)
