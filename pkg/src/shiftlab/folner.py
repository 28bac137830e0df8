"""Folner windows for Z, temperedness, and upper/lower orbit densities.

The canonical windows are F_n = {0, ..., n-1}. Upper and lower densities are
limsup/liminf of |S intersect F_n| / |F_n|; at desk scale these become the
max/min of the window averages over a tail of n values, except for
eventually periodic predicates, which take an exact rational path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .symbolic import EventuallyPeriodic, PointRep, SetLike, point_window

DEFAULT_TAIL_FRACTION = 0.5
DEFAULT_N_MAX = 100_000


class FolnerWindows:
    """A rule n -> finite subset of Z."""

    def __init__(self, rule: Callable[[int], Sequence[int]], name: str, canonical: bool = False):
        self.rule = rule
        self.name = name
        self.canonical = canonical

    @classmethod
    def canonical_windows(cls) -> "FolnerWindows":
        return cls(lambda n: range(n), "F_n = {0,...,n-1}", canonical=True)

    def window(self, n: int) -> list[int]:
        w = list(self.rule(n))
        if not w:
            raise ValueError(f"window F_{n} is empty")
        return w

    def __repr__(self) -> str:
        return f"FolnerWindows({self.name})"


@dataclass(frozen=True)
class DensityEstimate:
    """Tail estimates of upper/lower density; exact when the limit is known."""

    lower: float
    upper: float
    n_max: int
    tail_fraction: float
    exact: Optional[Fraction] = None

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper + 1e-15):
            raise ValueError("density estimates must satisfy 0 <= lower <= upper")


@dataclass(frozen=True)
class PeriodicPredicate:
    """An eventually periodic membership predicate on Z_+.

    Values are `preperiod` on [0, len(preperiod)) and then cycle through
    `period`. Densities of such predicates are exact rational frequencies.
    """

    preperiod: tuple[bool, ...]
    period: tuple[bool, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")

    def __call__(self, s: int) -> bool:
        if s < 0:
            raise ValueError("predicate is defined on Z_+")
        if s < len(self.preperiod):
            return self.preperiod[s]
        return self.period[(s - len(self.preperiod)) % len(self.period)]

    def frequency(self) -> Fraction:
        return Fraction(sum(self.period), len(self.period))


Predicate = Union[PeriodicPredicate, Callable[[int], bool]]


def membership_predicate(p: PointRep, s: SetLike) -> Predicate:
    """Predicate g -> [T^g p in s]; exact periodic form for periodic points."""
    if isinstance(p, EventuallyPeriodic) and not s.is_empty:
        blocks = s.blocks()
        lo = min(start for start, _ in blocks)
        period = p.tail_period()
        burn = max(0, p.core_end() - lo)
        pre = tuple(s.contains_point(p, g) for g in range(burn))
        cyc = tuple(s.contains_point(p, burn + g) for g in range(period))
        return PeriodicPredicate(pre, cyc)
    return lambda g: s.contains_point(p, g)


def _tail_range(n_max: int, tail_fraction: float) -> range:
    start = max(1, math.ceil(tail_fraction * n_max))
    return range(start, n_max + 1)


def density(
    pred: Predicate,
    windows: FolnerWindows,
    n_max: int = DEFAULT_N_MAX,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
) -> DensityEstimate:
    """Upper/lower density estimates from the tail of the window averages."""
    if n_max < 10:
        raise ValueError("n_max must be >= 10")
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail_fraction must lie in (0, 1]")
    if isinstance(pred, PeriodicPredicate) and windows.canonical:
        freq = pred.frequency()
        return DensityEstimate(float(freq), float(freq), n_max, tail_fraction, exact=freq)
    if windows.canonical:
        hits = np.fromiter((bool(pred(s)) for s in range(n_max)), dtype=bool, count=n_max)
        return density_from_indicator(hits, n_max=n_max, tail_fraction=tail_fraction)
    tail = _tail_range(n_max, tail_fraction)
    averages = []
    for n in tail:
        w = windows.window(n)
        averages.append(sum(1 for s in w if pred(s)) / len(w))
    return DensityEstimate(min(averages), max(averages), n_max, tail_fraction)


def density_from_indicator(
    hits: np.ndarray,
    n_max: Optional[int] = None,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
) -> DensityEstimate:
    """Tail density of a precomputed indicator over {0, ..., n_max - 1}."""
    n_max = len(hits) if n_max is None else n_max
    counts = np.cumsum(hits[:n_max].astype(np.int64))
    tail = _tail_range(n_max, tail_fraction)
    ns = np.arange(tail.start, tail.stop)
    averages = counts[ns - 1] / ns
    return DensityEstimate(float(averages.min()), float(averages.max()), n_max, tail_fraction)


def temperedness_constant(windows: FolnerWindows, n_max: int) -> float:
    """max over 1 < n <= n_max of |union_{k<n} F_k^{-1} F_n| / |F_n|.

    In additive notation F^{-1} = {-f : f in F}, and the union over k
    collapses to (union_{k<n} F_k)^{-1} F_n.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    cumulative: set[int] = set(windows.window(1))
    worst = 0.0
    for n in range(2, n_max + 1):
        fn = windows.window(n)
        diffs = {g - f for f in cumulative for g in fn}
        worst = max(worst, len(diffs) / len(fn))
        cumulative.update(fn)
    return worst


def birkhoff_average(
    p: PointRep, f_set: SetLike, windows: FolnerWindows, n: int
) -> Fraction:
    """(1/|F_n|) sum_{s in F_n} 1_{f_set}(T^s p), exactly."""
    w = windows.window(n)
    if windows.canonical and not f_set.is_empty:
        hits = orbit_indicator(p, f_set, 0, n)
        return Fraction(int(hits.sum()), n)
    count = sum(1 for s in w if f_set.contains_point(p, s))
    return Fraction(count, len(w))


def orbit_indicator(p: PointRep, s: SetLike, lo: int, hi: int) -> np.ndarray:
    """Vector of [T^g p in s] for g in [lo, hi), via one materialized window."""
    length = hi - lo
    if length <= 0:
        return np.zeros(0, dtype=bool)
    if s.is_empty:
        return np.zeros(length, dtype=bool)
    blocks = s.blocks()
    if not blocks:
        return np.ones(length, dtype=bool)
    span_lo = min(start for start, _ in blocks)
    span_hi = max(start + len(ws[0]) - 1 for start, ws in blocks)
    arr = point_window(p, lo + span_lo, hi - 1 + span_hi)
    result = np.ones(length, dtype=bool)
    for start, words in blocks:
        width = len(words[0])
        offset = start - span_lo
        block_ok = np.zeros(length, dtype=bool)
        for w in words:
            match = np.ones(length, dtype=bool)
            for j, sym in enumerate(w):
                match &= arr[offset + j : offset + j + length] == sym
            block_ok |= match
        result &= block_ok
    return result
