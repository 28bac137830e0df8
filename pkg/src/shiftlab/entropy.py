"""Shannon and sequence entropy, L2 separation counts, and mean-sensitive functions.

Entropies are reported in nats from exact rational measures; the only floats
are the logarithms themselves. The "limsup along a sequence" objects are
returned as profiles over prefix lengths; interpretation thresholds belong to
the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import CapExceededError
from .folner import FolnerWindows, density_from_indicator, orbit_indicator
from .measures import MarkovMeasure, measure_of, measure_of_constraints, sample_point_in
from .symbolic import (
    CylinderUnion,
    PointRep,
    SetLike,
    Sft,
    cylinder,
    resolve_constraints,
    whole_space,
)
from .verdicts import (
    NEGATIVE,
    POSITIVE,
    CrosscheckParams,
    MsFunctionParams,
    Verdict,
)

JOIN_ASSIGNMENT_CAP = 1 << 14  # |atoms|^|S| refusal point (14 for 2-atom partitions)


class Partition:
    """A finite measurable partition whose atoms are cylinder-union sets."""

    def __init__(self, atoms: Sequence[SetLike]):
        atoms = tuple(atoms)
        if not atoms:
            raise ValueError("partition needs at least one atom")
        self.atoms = atoms

    def validate_under(self, m: MarkovMeasure) -> None:
        """Exact checks: no empty atom, pairwise disjoint, measures sum to 1."""
        for a in self.atoms:
            if a.is_empty:
                raise ValueError("partition contains an empty atom")
        for i, a in enumerate(self.atoms):
            for b in self.atoms[i + 1 :]:
                meet = resolve_constraints([(0, a), (0, b)], m.sft)
                if not meet.is_empty:
                    raise ValueError("partition atoms are not pairwise disjoint")
        total = sum((measure_of(m, a) for a in self.atoms), Fraction(0))
        if total != 1:
            raise ValueError(f"atom measures sum to {total}, not 1")

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"Partition({len(self.atoms)} atoms)"


def generator_partition(sft: Sft) -> Partition:
    """The time-zero partition into single-symbol cylinders."""
    return Partition([cylinder(sft, 0, [a]) for a in range(sft.alphabet_size)])


def two_set_partition(u: CylinderUnion) -> Partition:
    """{U, U^c}, dropping an empty side (U = X or U = empty)."""
    comp = u.complement()
    atoms = [a for a in (u, comp) if not a.is_empty]
    return Partition(atoms)


def validate_sequence(s: Sequence[int]) -> tuple[int, ...]:
    seq = tuple(int(v) for v in s)
    if any(v < 0 for v in seq):
        raise ValueError("sequence entries must be nonnegative")
    if any(a >= b for a, b in zip(seq, seq[1:])):
        raise ValueError("sequence must be strictly increasing")
    return seq


def _log(fr: Fraction) -> float:
    return math.log(fr.numerator) - math.log(fr.denominator)


def entropy_from_measures(measures: Sequence[Fraction]) -> float:
    """H = -sum mu log mu in nats, with 0 log 0 = 0."""
    return -math.fsum(float(mu) * _log(mu) for mu in measures if mu > 0)


def shannon_entropy(m: MarkovMeasure, p: Partition) -> float:
    return entropy_from_measures([measure_of(m, a) for a in p.atoms])


def join_under_sequence(m: MarkovMeasure, p: Partition, s: Sequence[int]) -> Partition:
    """The common refinement of T^{-s_i} p over the sequence prefix.

    Assignments are grown incrementally and empty combinations dropped as
    they appear, so the cap binds the number of live atoms (2^14, i.e.
    sequence length 14 for a two-atom partition of a full shift), not the
    raw product of assignments. Past the cap the operation refuses rather
    than approximates.
    """
    seq = validate_sequence(s)
    live: list[tuple] = [()]
    for t in seq:
        nxt = []
        for constraints in live:
            for atom in p.atoms:
                extended = constraints + ((t, atom),)
                if not resolve_constraints(extended, m.sft).is_empty:
                    nxt.append(extended)
        if len(nxt) > JOIN_ASSIGNMENT_CAP:
            raise CapExceededError(
                f"join refinement exceeds {JOIN_ASSIGNMENT_CAP} live atoms"
            )
        live = nxt
    return Partition([resolve_constraints(cs, m.sft) for cs in live])


def _join_measures(m: MarkovMeasure, p: Partition, seq: tuple[int, ...]) -> list[Fraction]:
    """Positive measures of the join atoms, grown incrementally."""
    live: list[tuple[tuple, Fraction]] = [((), Fraction(1))]
    for t in seq:
        nxt = []
        for constraints, _mu in live:
            for atom in p.atoms:
                extended = constraints + ((t, atom),)
                mu = measure_of_constraints(m, extended)
                if mu > 0:
                    nxt.append((extended, mu))
        if len(nxt) > JOIN_ASSIGNMENT_CAP:
            raise CapExceededError(
                f"join refinement exceeds {JOIN_ASSIGNMENT_CAP} live atoms"
            )
        live = nxt
    return [mu for _cs, mu in live]


@dataclass(frozen=True)
class EntropyProfile:
    """(n, H_n, H_n / n) rows along the prefixes of a sequence."""

    rows: tuple[tuple[int, float, float], ...]
    exact_measures: bool = True

    @property
    def final_rate(self) -> float:
        return self.rows[-1][2]

    @property
    def final_increment(self) -> float:
        if len(self.rows) == 1:
            return self.rows[0][1]
        return self.rows[-1][1] - self.rows[-2][1]


def sequence_entropy_profile(
    m: MarkovMeasure, p: Partition, s: Sequence[int]
) -> EntropyProfile:
    """H_n of the join along each prefix of s (in nats), plus H_n / n."""
    seq = validate_sequence(s)
    if not seq:
        raise ValueError("sequence must be nonempty")
    rows = []
    for n in range(1, len(seq) + 1):
        h = entropy_from_measures(_join_measures(m, p, seq[:n]))
        rows.append((n, h, h / n))
    return EntropyProfile(tuple(rows))


# ---------------------------------------------------------------------------
# L2 separation and the d_f pseudometric
# ---------------------------------------------------------------------------


def separation_count(
    m: MarkovMeasure,
    base: SetLike,
    horizon: int,
    eps: Optional[Union[float, Fraction]] = None,
    *,
    eps_sq: Optional[Fraction] = None,
) -> int:
    """Size of the greedy eps-separated subset of {1_{T^{-s} base} : 0 <= s < horizon}.

    Separation is strict (L2 distance > eps) and decided exactly: distances
    are compared as squared rationals. `eps_sq` overrides `eps` when the
    threshold itself is irrational (e.g. sqrt of a rational).
    """
    if eps_sq is None:
        if eps is None or eps <= 0:
            raise ValueError("eps must be positive")
        eps_sq = Fraction(eps) ** 2
    mu_base = measure_of(m, base)
    reps: list[int] = []
    by_gap: dict[int, Fraction] = {}
    for s in range(horizon):
        separated = True
        for r in reps:
            gap = s - r
            d2 = by_gap.get(gap)
            if d2 is None:
                joint = measure_of_constraints(m, [(0, base), (gap, base)])
                d2 = 2 * mu_base - 2 * joint
                by_gap[gap] = d2
            if d2 <= eps_sq:
                separated = False
                break
        if separated:
            reps.append(s)
    return len(reps)


def df_estimate(
    x: PointRep,
    y: PointRep,
    b: SetLike,
    windows: FolnerWindows,
    n_max: int,
    tail_fraction: float = 0.5,
) -> float:
    """Tail-max estimate of d_f(x, y) for f = 1_b.

    d_f(x,y) = limsup ((1/|F_n|) sum_s |f(sx) - f(sy)|^2)^{1/2}; the indicator
    difference is 1 exactly when the orbits disagree about membership.
    """
    if windows.canonical:
        disagreement = orbit_indicator(x, b, 0, n_max) ^ orbit_indicator(y, b, 0, n_max)
        est = density_from_indicator(disagreement, tail_fraction=tail_fraction)
        return math.sqrt(est.upper)
    averages = []
    for n in range(max(1, math.ceil(tail_fraction * n_max)), n_max + 1):
        w = windows.window(n)
        count = sum(1 for s in w if b.contains_point(x, s) != b.contains_point(y, s))
        averages.append(count / len(w))
    return math.sqrt(max(averages))


# ---------------------------------------------------------------------------
# Mean-sensitive indicator functions
# ---------------------------------------------------------------------------


def _mix_seed(*parts: int) -> int:
    value = 0
    for part in parts:
        value = value * 1_000_003 + part + 1
    return value


def ms_function_test(
    m: MarkovMeasure,
    b: CylinderUnion,
    cell_family: Sequence[CylinderUnion],
    params: MsFunctionParams = MsFunctionParams(),
) -> Verdict:
    """Search every cell for a sampled pair whose orbits split b with positive density.

    The function 1_b is mean sensitive iff some eps > 0 works for every
    positive-measure cell; the verdict certifies the largest grid eps beaten
    by every cell, or is negative naming the first failing cell.
    """
    if not cell_family:
        raise ValueError("cell family must be nonempty")
    for cell in cell_family:
        if measure_of(m, cell) == 0:
            raise ValueError(f"cell {cell!r} has measure zero")
    if b.is_empty or b.is_full:
        return Verdict(NEGATIVE, note="indicator is a.e. constant")

    horizon = params.density_horizon
    b_lo, b_hi = b.support
    comp = b.complement()
    per_cell: list[tuple[CylinderUnion, float, dict]] = []
    for idx, cell in enumerate(cell_family):
        c_lo, c_hi = (0, 0) if cell.is_full else cell.support
        lo = min(b_lo, c_lo, 0) - 1
        hi = horizon + max(b_hi, c_hi, 0) + 1
        best = -1.0
        best_info: dict = {}
        for attempt in range(params.pair_attempts):
            p = sample_point_in(m, cell, lo, hi, _mix_seed(params.seed, idx, attempt, 0))
            q = sample_point_in(m, cell, lo, hi, _mix_seed(params.seed, idx, attempt, 1))
            split = orbit_indicator(p, b, 0, horizon) & orbit_indicator(q, comp, 0, horizon)
            est = density_from_indicator(split, tail_fraction=params.tail_fraction)
            if est.upper > best:
                best = est.upper
                best_info = {"cell": repr(cell), "pair_seed_attempt": attempt, "density": est.upper}
        per_cell.append((cell, best, best_info))

    floor = min(best for _, best, _ in per_cell)
    certified = max((e for e in params.eps_grid if floor > e), default=None)
    if certified is None:
        worst = min(per_cell, key=lambda t: t[1])
        return Verdict(
            NEGATIVE,
            note=f"cell {worst[0]!r} yields density {worst[1]:.4f} below the grid",
            params={"eps_grid": tuple(params.eps_grid)},
        )
    return Verdict(
        POSITIVE,
        eps_certified=certified,
        witnesses=tuple(info for _, _, info in per_cell),
        params={"eps_grid": tuple(params.eps_grid)},
    )


@dataclass(frozen=True)
class HmsHapReport:
    """Agreement data for the mean-sensitivity / almost-periodicity dichotomy."""

    sensitive: bool
    separation_growing: bool
    entropy_growing: bool
    separation_counts: tuple[int, ...]
    entropy_profile: EntropyProfile
    greedy_sequence: tuple[int, ...]

    @property
    def agree(self) -> bool:
        return self.sensitive == self.separation_growing == self.entropy_growing


def greedy_entropy_sequence(
    m: MarkovMeasure, p: Partition, length: int, horizon: int
) -> tuple[int, ...]:
    """Build S greedily: each step adds the shift maximizing the entropy increment.

    Ties go to the first (smallest) candidate shift.
    """
    chosen: list[int] = []
    for _ in range(length):
        best_s, best_h = None, None
        for s in range(horizon):
            if s in chosen:
                continue
            trial = tuple(sorted(chosen + [s]))
            h = entropy_from_measures(_join_measures(m, p, trial))
            if best_h is None or h > best_h + 1e-12:
                best_s, best_h = s, h
        chosen.append(best_s)
        chosen.sort()
    return tuple(chosen)


def crosscheck_hms_hap(
    m: MarkovMeasure,
    b: CylinderUnion,
    params: CrosscheckParams = CrosscheckParams(),
    cell_family: Optional[Sequence[CylinderUnion]] = None,
    ms_params: MsFunctionParams = MsFunctionParams(),
) -> HmsHapReport:
    """Three views of the same dichotomy, expected to agree.

    1_b mean sensitive (witness search) should coincide with unbounded
    L2 separation growth of the shifted indicators and with positive
    sequence entropy of {b, b^c} along a greedily chosen sequence.
    """
    if cell_family is None:
        cell_family = default_cell_family(m)

    if b.is_empty or b.is_full:
        sensitive = False
    else:
        sensitive = ms_function_test(m, b, cell_family, ms_params).is_positive

    mu_b = measure_of(m, b)
    eps_sq = mu_b * (1 - mu_b)
    if eps_sq == 0:
        counts = tuple(1 for _ in params.separation_horizons)
    else:
        counts = tuple(
            separation_count(m, b, h, eps_sq=eps_sq) for h in params.separation_horizons
        )
    separation_growing = counts[-1] > counts[0] and counts[-1] > counts[-2]

    partition = two_set_partition(b)
    if len(partition) < 2:
        profile = EntropyProfile(((1, 0.0, 0.0),))
        greedy = (0,)
    else:
        greedy = greedy_entropy_sequence(m, partition, params.greedy_len, params.greedy_horizon)
        profile = sequence_entropy_profile(m, partition, greedy)
    entropy_growing = profile.final_increment > params.entropy_increment_floor

    return HmsHapReport(
        sensitive=sensitive,
        separation_growing=separation_growing,
        entropy_growing=entropy_growing,
        separation_counts=counts,
        entropy_profile=profile,
        greedy_sequence=greedy,
    )


def default_cell_family(
    m: MarkovMeasure, max_word_len: int = 2
) -> list[CylinderUnion]:
    """Whole space plus every positive-measure cylinder of short word length."""
    cells: list[CylinderUnion] = [whole_space(m.sft)]
    for length in range(1, max_word_len + 1):
        for w in m.sft.legal_words(length):
            c = cylinder(m.sft, 0, w)
            if measure_of(m, c) > 0:
                cells.append(c)
    return cells
