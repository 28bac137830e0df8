"""Combinatorial independence: independence sets relative to constraint maps,
maximum independence subsets, density profiles, and independence-pair verdicts.

An independence set I for the target pair (A1, A2) relative to E demands that
for every assignment sigma: I -> {1, 2} the intersection of E(s) and the
shifted targets T^{-s} A_{sigma(s)} over s in I is nonempty. E(s) enters the
intersection unshifted, exactly as the definition displays it.

Two checkers implement that test: a reference enumeration over all 2^|I|
assignments, and an exact segment decomposition (valid because the SFT is a
topological Markov chain: feasibility factors through symbol states at the
boundaries of constrained segments) that stays polynomial for single-word
targets. They are interchangeable and property-tested against each other.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import CapExceededError
from .measures import MarkovMeasure, measure_of
from .symbolic import (
    BridgedBlocks,
    Cylinder,
    CylinderUnion,
    PointRep,
    SetLike,
    Sft,
    Word,
    cylinder,
    resolve_constraints,
    whole_space,
)
from .verdicts import (
    NEGATIVE,
    POSITIVE,
    InPairParams,
    Verdict,
)


# ---------------------------------------------------------------------------
# Constraint maps E
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantE:
    """E(s) = set for every s (the reduction the ergodic abelian case allows)."""

    set: CylinderUnion

    def at(self, s: int) -> CylinderUnion:
        return self.set

    def referenced(self, shifts: Sequence[int]) -> tuple[CylinderUnion, ...]:
        return (self.set,)

    def describe(self) -> str:
        return f"ConstantE({self.set!r})"


@dataclass(frozen=True)
class TableE:
    """E(s) from a finite override table on top of a default set."""

    default: CylinderUnion
    overrides: tuple[tuple[int, CylinderUnion], ...] = ()

    def at(self, s: int) -> CylinderUnion:
        for shift, value in self.overrides:
            if shift == s:
                return value
        return self.default

    def referenced(self, shifts: Sequence[int]) -> tuple[CylinderUnion, ...]:
        return (self.default,) + tuple(v for s, v in self.overrides if s in set(shifts))

    def describe(self) -> str:
        return f"TableE({len(self.overrides)} overrides)"


EMap = Union[ConstantE, TableE]

# Per-segment local-assignment enumeration bound; larger clusters switch to
# the coordinate sweep.
SEGMENT_COMBO_CAP = 64


def full_e(sft: Sft) -> ConstantE:
    return ConstantE(whole_space(sft))


def e_min_measure(e: EMap, m: MarkovMeasure, shifts: Sequence[int]) -> Fraction:
    """Smallest measure among the sets E references on the given shifts."""
    values = e.referenced(shifts)
    if not values:
        return Fraction(1)
    return min(measure_of(m, v) for v in values)


# ---------------------------------------------------------------------------
# is_independence_set
# ---------------------------------------------------------------------------


def _target_word(target: SetLike) -> Optional[tuple[int, Word]]:
    """(start, word) when the target is a single cylinder, else None."""
    if isinstance(target, Cylinder):
        return None if target.is_empty else (target.start, target.word)
    if isinstance(target, CylinderUnion) and len(target.words) == 1:
        return (target.start, target.words[0])
    return None


def _e_atoms(sft: Sft, e: EMap, shifts: Sequence[int]):
    """Unshifted constraint atoms contributed by E over the given shifts.

    Returns None when some E(s) is empty (every assignment then fails).
    """
    atoms: list[tuple[int, tuple[Word, ...]]] = []
    seen: set[int] = set()
    for s in shifts:
        value = e.at(s)
        if value.is_empty:
            return None
        if value.is_full:
            continue
        key = id(value) if not isinstance(value, CylinderUnion) else hash(value)
        if key in seen:
            continue
        seen.add(key)
        atoms.extend(value.blocks())
    return atoms


def is_independence_set(
    sft: Sft,
    a1: SetLike,
    a2: SetLike,
    i_set: Sequence[int],
    e: EMap,
    *,
    sigma_cap: int = 20,
    _memo: Optional[dict] = None,
) -> bool:
    """True iff every assignment over i_set resolves nonempty (exact).

    Single-word targets go through the polynomial segment checker; general
    unions fall back to enumerating the 2^|I| assignments (capped).
    """
    shifts = sorted(set(int(s) for s in i_set))
    if not shifts:
        return True
    if a1.is_empty or a2.is_empty:
        return False
    atoms = _e_atoms(sft, e, shifts)
    if atoms is None:
        return False
    w1 = _target_word(a1)
    w2 = _target_word(a2)
    if w1 is not None and w2 is not None:
        return _universal_feasible(sft, shifts, (w1, w2), atoms, memo=_memo)
    return _enumerated_independence(sft, a1, a2, shifts, e, sigma_cap)


def _enumerated_independence(sft, a1, a2, shifts, e, sigma_cap) -> bool:
    if len(shifts) > sigma_cap:
        raise CapExceededError(
            f"|I| = {len(shifts)} exceeds the assignment cap {sigma_cap}"
        )
    e_constraints = [(0, e.at(s)) for s in shifts]
    targets = (a1, a2)
    for sigma in itertools.product((0, 1), repeat=len(shifts)):
        constraints = [(s, targets[c]) for s, c in zip(shifts, sigma)]
        if resolve_constraints(constraints + e_constraints, sft).is_empty:
            return False
    return True


def _universal_feasible(sft, shifts, target_words, atoms, memo=None) -> bool:
    """Exact for-all-assignments feasibility via segment decomposition.

    Constrained intervals (candidate pin placements plus E atoms) are split
    into connected segments separated by free coordinates. Per segment and
    per local assignment the realizable (first, last) symbol pairs are
    enumerated; a subset-tracking DP over segments then decides whether any
    global assignment chain dies. Polynomial in |I| for bounded alphabets
    and segment sizes.
    """
    (o1, word1), (o2, word2) = target_words
    placements = []
    for s in shifts:
        p1 = (s + o1, word1)
        p2 = (s + o2, word2)
        options = (p1,) if p1 == p2 else (p1, p2)
        lo = min(start for start, _ in options)
        hi = max(start + len(w) - 1 for start, w in options)
        placements.append((lo, hi, options))

    intervals = [(lo, hi, ("pin", i)) for i, (lo, hi, _) in enumerate(placements)]
    intervals += [
        (start, start + len(words[0]) - 1, ("atom", j))
        for j, (start, words) in enumerate(atoms)
    ]
    intervals.sort()

    segments: list[dict] = []
    for lo, hi, tag in intervals:
        if segments and lo <= segments[-1]["hi"]:
            seg = segments[-1]
            seg["hi"] = max(seg["hi"], hi)
            seg["members"].append(tag)
        else:
            segments.append({"lo": lo, "hi": hi, "members": [tag]})

    if memo is None:
        memo = {}
    alphabet = frozenset(range(sft.alphabet_size))
    current: set[frozenset[int]] = {alphabet}
    prev_hi: Optional[int] = None
    for seg in segments:
        pins = [m[1] for m in seg["members"] if m[0] == "pin"]
        seg_atoms = [atoms[m[1]] for m in seg["members"] if m[0] == "atom"]
        local_options = [placements[i][2] for i in pins]
        n_combos = 1
        for options in local_options:
            n_combos *= len(options)
        if n_combos > SEGMENT_COMBO_CAP:
            # Long consistent-overlap chains: enumerate nothing, sweep instead.
            return _universal_sweep(sft, placements, atoms)
        relations = []
        for combo in itertools.product(*local_options):
            key = (
                seg["lo"],
                seg["hi"],
                combo,
                tuple((s, ws) for s, ws in seg_atoms),
            )
            rel = memo.get(key)
            if rel is None:
                rel = _segment_relation(sft, seg["lo"], seg["hi"], combo, seg_atoms)
                memo[key] = rel
            if not rel:
                return False
            relations.append(rel)
        gap_steps = None if prev_hi is None else seg["lo"] - prev_hi
        nxt: set[frozenset[int]] = set()
        for state in current:
            for rel in relations:
                if gap_steps is None:
                    ends = frozenset(last for _first, last in rel)
                else:
                    ends = frozenset(
                        last
                        for first, last in rel
                        if any(sft.reachable(a, first, gap_steps) for a in state)
                    )
                if not ends:
                    return False
                nxt.add(ends)
        current = nxt
        prev_hi = seg["hi"]
    return True


def _universal_sweep(sft, placements, atoms) -> bool:
    """Coordinate-granular universal feasibility; exact for any overlap pattern.

    Beliefs pair the assignment history that still matters (open chosen
    words) with the set of feasible frontier configurations (previous
    symbol, per-open-atom matched prefix). Assignment choices split beliefs
    at each placement's first coordinate; existential symbol choices evolve
    configurations. Fails exactly when some assignment path empties.
    """
    lo = min(p[0] for p in placements)
    hi = max(p[1] for p in placements)
    if atoms:
        lo = min(lo, min(start for start, _ in atoms))
        hi = max(hi, max(start + len(ws[0]) - 1 for start, ws in atoms))

    atom_prefix_sets = []
    for start, words in atoms:
        width = len(words[0])
        by_len = [set() for _ in range(width + 1)]
        for w in words:
            for i in range(width + 1):
                by_len[i].add(w[:i])
        atom_prefix_sets.append((start, width, by_len))

    starts_at: dict[int, list[int]] = {}
    for i, (p_lo, _p_hi, _options) in enumerate(placements):
        starts_at.setdefault(p_lo, []).append(i)

    # A belief: (open chosen words, frozenset of (prev symbol, atom prefixes)).
    # Open words are (start, word) pairs; atom prefixes align with atoms order.
    initial_prefixes = tuple(() for _ in atoms)
    beliefs: set = {((), frozenset({(None, initial_prefixes)}))}
    for c in range(lo, hi + 1):
        # Adversary choices for placements opening at c.
        for i in starts_at.get(c, ()):
            options = placements[i][2]
            split: set = set()
            for open_words, configs in beliefs:
                for opt in options:
                    split.add((tuple(sorted(set(open_words) | {opt})), configs))
            beliefs = split
        nxt: set = set()
        for open_words, configs in beliefs:
            live_words = tuple(
                (s, w) for s, w in open_words if s + len(w) - 1 >= c
            )
            forced = None
            conflict = False
            for s, w in live_words:
                if s <= c:
                    sym = w[c - s]
                    if forced is None:
                        forced = sym
                    elif forced != sym:
                        conflict = True
                        break
            if conflict:
                return False
            new_configs = set()
            for prev, prefixes in configs:
                candidates = (
                    range(sft.alphabet_size) if prev is None else sft.successors(prev)
                )
                for sym in candidates:
                    if forced is not None and sym != forced:
                        continue
                    new_prefixes = []
                    ok = True
                    for (start, width, by_len), prefix in zip(
                        atom_prefix_sets, prefixes
                    ):
                        if start <= c < start + width:
                            ext = prefix + (sym,)
                            if ext not in by_len[len(ext)]:
                                ok = False
                                break
                            new_prefixes.append(ext if len(ext) < width else ())
                        else:
                            new_prefixes.append(prefix if start > c else ())
                    if ok:
                        new_configs.add((sym, tuple(new_prefixes)))
            if not new_configs:
                return False
            nxt.add((live_words, frozenset(new_configs)))
        beliefs = nxt
    return True


def _segment_relation(sft, lo, hi, pinned, atoms) -> frozenset[tuple[int, int]]:
    """Realizable (first, last) symbol pairs of legal words over [lo, hi]
    matching the pinned words and every atom's word set."""
    pin_at: dict[int, int] = {}
    for start, word in pinned:
        for j, sym in enumerate(word):
            pos = start + j
            if pos in pin_at and pin_at[pos] != sym:
                return frozenset()
            pin_at[pos] = sym

    atom_prefixes = []
    for start, words in atoms:
        width = len(words[0])
        by_len = [set() for _ in range(width + 1)]
        for w in words:
            for i in range(width + 1):
                by_len[i].add(w[:i])
        atom_prefixes.append((start, width, by_len))

    found: set[tuple[int, int]] = set()
    limit = sft.alphabet_size**2

    def step(pos: int, word: list[int]):
        if len(found) >= limit:
            return
        if pos > hi:
            found.add((word[0], word[-1]))
            return
        pinned_sym = pin_at.get(pos)
        if word:
            candidates = [
                b for b in sft.successors(word[-1]) if pinned_sym in (None, b)
            ]
        else:
            candidates = (
                [pinned_sym]
                if pinned_sym is not None
                else list(range(sft.alphabet_size))
            )
        for sym in candidates:
            word.append(sym)
            ok = True
            for start, width, by_len in atom_prefixes:
                if start <= pos < start + width:
                    took = pos - start + 1
                    if tuple(word[start - lo : start - lo + took]) not in by_len[took]:
                        ok = False
                        break
            if ok:
                step(pos + 1, word)
            word.pop()

    step(lo, [])
    return frozenset(found)


# ---------------------------------------------------------------------------
# Maximum independence subsets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndependenceReport:
    """Best independence subset found inside a window, with provenance."""

    window: tuple[int, ...]
    best: tuple[int, ...]
    ratio: Fraction
    e_map: str
    exhaustive: bool

    def __post_init__(self):
        if not set(self.best) <= set(self.window):
            raise ValueError("best subset must lie inside the window")


EXHAUSTIVE_WINDOW_CAP = 24


def _e_trivial_on(e: EMap, window: Sequence[int]) -> bool:
    """True iff E contributes no constraint anywhere on the window."""
    return all(e.at(s).is_full for s in window)


def _pin_span(target_words) -> int:
    (o1, w1), (o2, w2) = target_words
    lo = min(o1, o2)
    hi = max(o1 + len(w1) - 1, o2 + len(w2) - 1)
    return hi - lo + 1


def _gap_dp_max(sft, f_sorted, target_words, memo) -> Optional[tuple[int, ...]]:
    """Exact maximum via pairwise-gap DP when placements cannot overlap.

    Valid when every gap smaller than the placement span is incompatible:
    any independence set then has all its placements disjoint, and joint
    realizability of every assignment factors through consecutive pairs
    (Markov chaining across determined words). Returns None when the
    precondition fails.
    """
    span = _pin_span(target_words)

    def compatible(g: int) -> bool:
        return _universal_feasible(sft, [0, g], target_words, [], memo=memo)

    if not _universal_feasible(sft, [0], target_words, [], memo=memo):
        return ()
    if any(compatible(g) for g in range(1, span)):
        return None
    gaps = sorted({b - a for a in f_sorted for b in f_sorted if b > a})
    compat = {g: compatible(g) for g in gaps}
    n = len(f_sorted)
    # best[i] = largest subset size starting at position i and going right.
    best = [1] * n
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            if compat[f_sorted[j] - f_sorted[i]]:
                best[i] = max(best[i], 1 + best[j])
    remaining = max(best)
    chosen: list[int] = []
    prev: Optional[int] = None
    for i in range(n):
        if best[i] < remaining:
            continue
        if prev is not None and not compat[f_sorted[i] - prev]:
            continue
        chosen.append(f_sorted[i])
        prev = f_sorted[i]
        remaining -= 1
        if remaining == 0:
            break
    return tuple(chosen)


def max_independence_subset(
    sft: Sft,
    a1: SetLike,
    a2: SetLike,
    window: Sequence[int],
    e: EMap,
    *,
    sigma_cap: int = 20,
    node_budget: int = 500_000,
) -> IndependenceReport:
    """Largest independence subset of the window.

    Single-word targets with a trivial E and non-overlapping placements go
    through an exact pairwise-gap DP; everything else runs include-first
    branch and bound with monotone pruning (supersets of a failing set fail)
    and a size bound, ties resolving to the lexicographically smallest
    subset. Windows beyond the exhaustive cap, or searches past the node
    budget, degrade to the greedy chain with exhaustive=False.
    """
    f_sorted = tuple(sorted(set(int(s) for s in window)))
    if not f_sorted:
        raise ValueError("window must be nonempty")
    memo: dict = {}

    def check(candidate: list[int]) -> bool:
        return is_independence_set(
            sft, a1, a2, candidate, e, sigma_cap=sigma_cap, _memo=memo
        )

    if a1.is_empty or a2.is_empty:
        return IndependenceReport(f_sorted, (), Fraction(0), e.describe(), True)

    w1 = _target_word(a1)
    w2 = _target_word(a2)
    gamma: Optional[int] = None
    if w1 is not None and w2 is not None:
        if _e_trivial_on(e, f_sorted):
            dp_best = _gap_dp_max(sft, f_sorted, (w1, w2), memo)
            if dp_best is not None:
                return IndependenceReport(
                    f_sorted,
                    dp_best,
                    Fraction(len(dp_best), len(f_sorted)),
                    e.describe(),
                    True,
                )
        # Smallest assignment-universally feasible gap ignoring E: every gap
        # inside any independence set is at least gamma (E only shrinks).
        span = _pin_span((w1, w2))
        for g in range(1, span + 4 * sft.alphabet_size + 1):
            if _universal_feasible(sft, [0, g], (w1, w2), [], memo=memo):
                gamma = g
                break

    if len(f_sorted) > EXHAUSTIVE_WINDOW_CAP:
        best = _greedy_subset(f_sorted, check)
        return IndependenceReport(
            f_sorted, best, Fraction(len(best), len(f_sorted)), e.describe(), False
        )

    best: list[int] = []
    nodes = 0
    exhausted = False

    def remaining_cap(idx: int) -> int:
        count = len(f_sorted) - idx
        if gamma is not None and gamma > 1 and count > 0:
            count = min(count, (f_sorted[-1] - f_sorted[idx]) // gamma + 1)
        return count

    def dfs(idx: int, current: list[int]):
        nonlocal best, nodes, exhausted
        if exhausted:
            return
        if len(current) > len(best):
            best = current.copy()
        if idx == len(f_sorted):
            return
        if len(current) + remaining_cap(idx) <= len(best):
            return
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            return
        s = f_sorted[idx]
        if check(current + [s]):
            current.append(s)
            dfs(idx + 1, current)
            current.pop()
        dfs(idx + 1, current)

    dfs(0, [])
    if exhausted:
        greedy = _greedy_subset(f_sorted, check)
        if len(greedy) > len(best):
            best = list(greedy)
        return IndependenceReport(
            f_sorted, tuple(best), Fraction(len(best), len(f_sorted)), e.describe(), False
        )
    return IndependenceReport(
        f_sorted, tuple(best), Fraction(len(best), len(f_sorted)), e.describe(), True
    )


def ratio_meets(
    sft: Sft,
    a1: SetLike,
    a2: SetLike,
    window: Sequence[int],
    e: EMap,
    threshold: Fraction,
    *,
    sigma_cap: int = 20,
    node_budget: int = 500_000,
) -> bool:
    """Decide best-ratio >= threshold without always paying for the exact max.

    The greedy chain is a sound lower bound (greedy sets are independence
    sets), so a greedy hit answers yes immediately; otherwise the exact
    search settles it.
    """
    f_sorted = tuple(sorted(set(int(s) for s in window)))
    if a1.is_empty or a2.is_empty:
        return Fraction(0) >= threshold
    memo: dict = {}

    def check(candidate: list[int]) -> bool:
        return is_independence_set(
            sft, a1, a2, candidate, e, sigma_cap=sigma_cap, _memo=memo
        )

    greedy = _greedy_subset(f_sorted, check)
    if Fraction(len(greedy), len(f_sorted)) >= threshold:
        return True
    report = max_independence_subset(
        sft, a1, a2, f_sorted, e, sigma_cap=sigma_cap, node_budget=node_budget
    )
    return report.ratio >= threshold


def _greedy_subset(f_sorted, check) -> tuple[int, ...]:
    chosen: list[int] = []
    for s in f_sorted:
        if check(chosen + [s]):
            chosen.append(s)
    return tuple(chosen)


def independence_density_profile(
    sft: Sft,
    m: MarkovMeasure,
    a1: SetLike,
    a2: SetLike,
    n_list: Sequence[int],
    e_family: Sequence[EMap],
    *,
    sigma_cap: int = 20,
    node_budget: int = 500_000,
) -> list[IndependenceReport]:
    """Per window size N, the worst-case (over the E family) best ratio on {0..N-1}.

    A profile floor staying away from 0 is the desk-scale evidence for the
    positive independence density constant.
    """
    if not e_family:
        raise ValueError("e_family must be nonempty")
    reports = []
    for n in n_list:
        window = range(n)
        worst: Optional[IndependenceReport] = None
        for e in e_family:
            rep = max_independence_subset(
                sft, a1, a2, window, e, sigma_cap=sigma_cap, node_budget=node_budget
            )
            if worst is None or rep.ratio < worst.ratio:
                worst = rep
        reports.append(worst)
    return reports


# ---------------------------------------------------------------------------
# Adversarial constraint maps
# ---------------------------------------------------------------------------


def bad_constant_e(
    m: MarkovMeasure, s: int, t: int, ux: CylinderUnion, uy: CylinderUnion
) -> ConstantE:
    """The constant map E = (T^{-s} Ux intersect T^{-t} Uy)^c.

    Its measure is exactly 1 - mu(s^{-1}Ux ∩ t^{-1}Uy): the cheapest
    constraint map that can obstruct independence of the pair.
    """
    meet = resolve_constraints([(s, ux), (t, uy)], m.sft, gap_cap=64)
    if meet.is_empty:
        return ConstantE(whole_space(m.sft))
    if isinstance(meet, BridgedBlocks):
        raise ValueError("shifts too far apart for an exact complement")
    return ConstantE(meet.complement())


def random_table_e(
    m: MarkovMeasure,
    eps: Union[float, Fraction],
    seed: int,
    *,
    max_shift: int = 24,
    n_overrides: int = 4,
) -> TableE:
    """A seeded random TableE whose sets all have measure >= 1 - eps.

    Override sets are complements of thin cylinders (word length chosen so
    the cylinder measure is at most eps); when no legal word is thin enough
    the whole space is used instead.
    """
    eps = Fraction(eps)
    rng = random.Random(seed)
    sft = m.sft

    def thin_complement() -> CylinderUnion:
        for length in range(1, 13):
            words = [w for w in sft.legal_words(length) if 0 < m.word_weight(w) <= eps]
            if words:
                word = words[rng.randrange(len(words))]
                start = rng.randrange(-4, 5)
                return cylinder(sft, start, word).complement()
        return whole_space(sft)

    shifts = rng.sample(range(max_shift), min(n_overrides, max_shift))
    overrides = tuple((s, thin_complement()) for s in sorted(shifts))
    return TableE(default=whole_space(sft), overrides=overrides)


# ---------------------------------------------------------------------------
# IN-pair classification
# ---------------------------------------------------------------------------


def point_neighborhood(p: PointRep, radius: int) -> CylinderUnion:
    """The canonical cylinder [p_{-radius} ... p_{radius}] at start -radius."""
    word = tuple(p.eval(n) for n in range(-radius, radius + 1))
    return cylinder(p.sft, -radius, word)


def separating_depth(x: PointRep, y: PointRep, depth: int) -> Optional[int]:
    """Smallest d <= depth with x, y differing somewhere in [-d, d]."""
    for d in range(depth + 1):
        for n in (-d, d):
            if x.eval(n) != y.eval(n):
                return d
    return None


def classify_in_pair(
    sft: Sft,
    m: MarkovMeasure,
    x: PointRep,
    y: PointRep,
    depth: int,
    params: InPairParams = InPairParams(),
) -> Verdict:
    """Independence-pair verdict over nested canonical neighbourhoods.

    Per level the adversarial family is E = X plus the constant complement
    maps built from all shift pairs up to the search bound (the constant-map
    reduction valid for ergodic abelian actions), plus any configured extras;
    only maps whose sets have measure >= 1 - eps participate at a given eps.
    Positive needs every level to keep its profile floor at or above c_min
    for some eps in the grid.
    """
    if separating_depth(x, y, depth) is None:
        raise ValueError(f"points agree on [-{depth}, {depth}]; pairs need x != y")
    c_min = Fraction(str(params.c_min))
    max_shift = max(params.n_list)
    level_witnesses = []
    certified_epses = []
    for d in range(depth + 1):
        ux = point_neighborhood(x, d)
        uy = point_neighborhood(y, d)
        base_profile = independence_density_profile(
            sft, m, ux, uy, params.n_list, [full_e(sft)],
            sigma_cap=params.sigma_cap, node_budget=params.node_budget,
        )
        base_floor = min(rep.ratio for rep in base_profile)
        if base_floor < c_min:
            worst = min(base_profile, key=lambda r: r.ratio)
            return Verdict(
                NEGATIVE,
                note=(
                    f"level {d}: unconstrained profile floor {base_floor} < c_min "
                    f"(window {len(worst.window)}, best |I| = {len(worst.best)})"
                ),
                params={"n_list": tuple(params.n_list), "c_min": float(c_min)},
            )
        adversaries: list[EMap] = []
        for s in range(params.ra_bound + 1):
            for t in range(s + 1, params.ra_bound + 1):
                adversaries.append(bad_constant_e(m, s, t, ux, uy))
        adversaries.extend(params.extra_e_maps)

        level_eps = None
        for eps in sorted(params.eps_grid):
            eps_frac = Fraction(eps)
            qualifying = [
                e for e in adversaries
                if e_min_measure(e, m, range(max_shift)) >= 1 - eps_frac
            ]
            family_ok = all(
                ratio_meets(
                    sft, ux, uy, range(n), e, c_min,
                    sigma_cap=params.sigma_cap, node_budget=params.node_budget,
                )
                for e in qualifying
                for n in params.n_list
            )
            if family_ok:
                level_eps = eps
                break
        if level_eps is None:
            return Verdict(
                NEGATIVE,
                note=f"level {d}: no eps in the grid keeps the floor above c_min",
                params={"n_list": tuple(params.n_list), "c_min": float(c_min)},
            )
        certified_epses.append(level_eps)
        level_witnesses.append(
            {
                "level": d,
                "eps": level_eps,
                "floor": base_floor,
                "profile": tuple(
                    (len(rep.window), tuple(rep.best), rep.ratio) for rep in base_profile
                ),
            }
        )
    return Verdict(
        POSITIVE,
        eps_certified=min(certified_epses),
        witnesses=tuple(level_witnesses),
        params={"n_list": tuple(params.n_list), "c_min": float(c_min)},
    )
