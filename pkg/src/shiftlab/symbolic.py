"""Subshifts of finite type and their finitely-determined subsets.

Conventions used throughout the package:

* the shift acts by ``(T^k x)_n = x_{n+k}``, so ``T^{-k} [w]_i = [w]_{i+k}``;
* the metric is ``d(x, y) = 2^{-min{|n| : x_n != y_n}}``;
* a cylinder ``[w]_i`` is the set of points carrying the word ``w`` on
  coordinates ``i, i+1, ..., i+len(w)-1``.

All set-level computations are exact: a normalized :class:`CylinderUnion`
is a set of full-length legal words over one support interval, and
:func:`resolve_constraints` either enumerates the intersection or returns
an exact block form with symbolic gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import WindowExceededError

Word = tuple[int, ...]

# Enumeration guards for exact normalization; beyond these the block form
# (BridgedBlocks) is kept instead of a single-support word list.
GAP_CAP = 14
WORD_BUDGET = 1 << 20


def parse_word(spec: Union[str, Sequence[int]]) -> Word:
    """Turn "0110" or [0, 1, 1, 0] into a symbol tuple."""
    if isinstance(spec, str):
        return tuple(int(ch) for ch in spec)
    return tuple(int(s) for s in spec)


def format_word(word: Word) -> str:
    return "".join(str(s) for s in word)


class Sft:
    """A subshift of finite type over symbols 0..k-1 with an allowed-transition matrix.

    Every symbol must have at least one allowed successor and one allowed
    predecessor, so every internally consistent word extends to a bi-infinite
    point and nonempty cylinders are exactly the consistent ones.
    """

    def __init__(self, alphabet_size: int, allowed: Sequence[Sequence[bool]]):
        if alphabet_size < 1:
            raise ValueError("alphabet_size must be >= 1")
        k = alphabet_size
        mat = tuple(tuple(bool(v) for v in row) for row in allowed)
        if len(mat) != k or any(len(row) != k for row in mat):
            raise ValueError("allowed must be a k x k matrix")
        self.alphabet_size = k
        self.allowed = mat
        self._succ = tuple(tuple(b for b in range(k) if mat[a][b]) for a in range(k))
        self._pred = tuple(tuple(a for a in range(k) if mat[a][b]) for b in range(k))
        for a in range(k):
            if not self._succ[a]:
                raise ValueError(f"symbol {a} has no allowed successor")
            if not self._pred[a]:
                raise ValueError(f"symbol {a} has no allowed predecessor")
        self._bool_pow_cache: dict[int, tuple[tuple[bool, ...], ...]] = {}

    # -- basic structure -------------------------------------------------

    def successors(self, a: int) -> tuple[int, ...]:
        return self._succ[a]

    def predecessors(self, b: int) -> tuple[int, ...]:
        return self._pred[b]

    def word_allowed(self, word: Word) -> bool:
        if any(not (0 <= s < self.alphabet_size) for s in word):
            raise ValueError(f"symbol out of range in word {word!r}")
        return all(self.allowed[a][b] for a, b in zip(word, word[1:]))

    def legal_words(self, length: int) -> Iterable[Word]:
        """All internally consistent words of the given length, in sorted order."""
        if length <= 0:
            raise ValueError("length must be positive")
        k = self.alphabet_size

        def extend(prefix: Word):
            if len(prefix) == length:
                yield prefix
                return
            for b in self._succ[prefix[-1]]:
                yield from extend(prefix + (b,))

        for a in range(k):
            yield from extend((a,))

    # -- reachability ----------------------------------------------------

    def _bool_power(self, steps: int) -> tuple[tuple[bool, ...], ...]:
        """Boolean matrix power: entry [a][b] iff a path a -> b of exactly `steps` edges."""
        if steps < 0:
            raise ValueError("steps must be >= 0")
        cached = self._bool_pow_cache.get(steps)
        if cached is not None:
            return cached
        k = self.alphabet_size
        if steps == 0:
            result = tuple(tuple(a == b for b in range(k)) for a in range(k))
        elif steps == 1:
            result = self.allowed
        else:
            half = self._bool_power(steps // 2)
            result = _bool_matmul(half, half)
            if steps % 2:
                result = _bool_matmul(result, self.allowed)
        self._bool_pow_cache[steps] = result
        return result

    def reachable(self, a: int, b: int, steps: int) -> bool:
        return self._bool_power(steps)[a][b]

    def step_forward(self, symbols: frozenset[int]) -> frozenset[int]:
        return frozenset(b for a in symbols for b in self._succ[a])

    def step_backward(self, symbols: frozenset[int]) -> frozenset[int]:
        return frozenset(a for b in symbols for a in self._pred[b])

    def is_irreducible(self) -> bool:
        """Strong connectivity of the allowed-transition graph."""
        return _graph_covers(self._succ, self.alphabet_size)

    # -- value semantics ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Sft)
            and self.alphabet_size == other.alphabet_size
            and self.allowed == other.allowed
        )

    def __hash__(self) -> int:
        return hash((self.alphabet_size, self.allowed))

    def __repr__(self) -> str:
        return f"Sft(k={self.alphabet_size})"


def _graph_covers(adj, k: int) -> bool:
    """Every vertex reaches every vertex along `adj` (checked from vertex 0 plus symmetry)."""
    for start in range(k):
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != k:
            return False
    return True


def _bool_matmul(x, y):
    k = len(x)
    return tuple(
        tuple(any(x[a][c] and y[c][b] for c in range(k)) for b in range(k))
        for a in range(k)
    )


def full_shift(alphabet_size: int) -> Sft:
    return Sft(alphabet_size, [[True] * alphabet_size for _ in range(alphabet_size)])


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


class EventuallyPeriodic:
    """A bi-infinite point: left-periodic tail, explicit core at coordinate 0, right-periodic tail.

    Evaluation for the unshifted point: coordinates [0, len(core)) read the
    core, coordinates >= len(core) cycle through right_period, negative
    coordinates cycle through left_period (left_period occupies [-L, -1],
    repeating leftward). Shifts are tracked as a lazy offset, which keeps the
    action law exact.
    """

    def __init__(self, sft: Sft, left_period, core, right_period, offset: int = 0):
        left = parse_word(left_period)
        mid = parse_word(core)
        right = parse_word(right_period)
        if not left or not right:
            raise ValueError("periodic tails must be nonempty")
        self.sft = sft
        self.left = left
        self.core = mid
        self.right = right
        self.offset = offset
        self._validate()

    def _validate(self):
        sft = self.sft
        for word in (self.left, self.core, self.right):
            if word and not sft.word_allowed(word):
                raise ValueError(f"word {word!r} violates the transition matrix")
        if not sft.allowed[self.left[-1]][self.left[0]]:
            raise ValueError("left period does not wrap")
        if not sft.allowed[self.right[-1]][self.right[0]]:
            raise ValueError("right period does not wrap")
        first_right = self.core[0] if self.core else self.right[0]
        if not sft.allowed[self.left[-1]][first_right]:
            raise ValueError("junction left->core/right not allowed")
        if self.core and not sft.allowed[self.core[-1]][self.right[0]]:
            raise ValueError("junction core->right not allowed")

    def eval(self, n: int) -> int:
        m = n + self.offset
        c = len(self.core)
        if 0 <= m < c:
            return self.core[m]
        if m >= c:
            return self.right[(m - c) % len(self.right)]
        return self.left[m % len(self.left)]

    def shifted(self, k: int) -> "EventuallyPeriodic":
        p = EventuallyPeriodic.__new__(EventuallyPeriodic)
        p.sft = self.sft
        p.left = self.left
        p.core = self.core
        p.right = self.right
        p.offset = self.offset + k
        return p

    def tail_period(self) -> int:
        return len(self.right)

    def core_end(self) -> int:
        """First coordinate from which evaluation is purely right-periodic."""
        return len(self.core) - self.offset

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventuallyPeriodic):
            return NotImplemented
        return self.sft == other.sft and points_provably_equal(self, other)

    def __repr__(self) -> str:
        return (
            f"EventuallyPeriodic({format_word(self.left)}|{format_word(self.core)}"
            f"|{format_word(self.right)}, offset={self.offset})"
        )


class SampledWindow:
    """A point known only on a finite coordinate window; evaluation outside raises."""

    def __init__(self, sft: Sft, lo: int, hi: int, symbols, seed: int, offset: int = 0):
        word = parse_word(symbols)
        if hi - lo + 1 != len(word):
            raise ValueError("window length does not match [lo, hi]")
        if word and not sft.word_allowed(word):
            raise ValueError("window violates the transition matrix")
        self.sft = sft
        self.lo = lo
        self.hi = hi
        self.symbols = word
        self.seed = seed
        self.offset = offset

    def eval(self, n: int) -> int:
        m = n + self.offset
        if not (self.lo <= m <= self.hi):
            raise WindowExceededError(
                f"coordinate {n} (absolute {m}) outside sampled window [{self.lo}, {self.hi}]"
            )
        return self.symbols[m - self.lo]

    def shifted(self, k: int) -> "SampledWindow":
        p = SampledWindow.__new__(SampledWindow)
        p.sft = self.sft
        p.lo = self.lo
        p.hi = self.hi
        p.symbols = self.symbols
        p.seed = self.seed
        p.offset = self.offset + k
        return p

    def evaluable(self) -> tuple[int, int]:
        """Coordinate range on which eval() is defined, in shifted coordinates."""
        return (self.lo - self.offset, self.hi - self.offset)

    def __repr__(self) -> str:
        return f"SampledWindow([{self.lo},{self.hi}], seed={self.seed}, offset={self.offset})"


PointRep = Union[EventuallyPeriodic, SampledWindow]


def shift_point(p: PointRep, k: int) -> PointRep:
    """The action T^k: (T^k p)_n = p_{n+k}."""
    return p.shifted(k)


def point_window(p: PointRep, lo: int, hi: int) -> np.ndarray:
    """Materialize p on [lo, hi] as a numpy array (for orbit counting)."""
    if hi < lo:
        return np.zeros(0, dtype=np.int16)
    if isinstance(p, SampledWindow):
        a, b = p.evaluable()
        if lo < a or hi > b:
            raise WindowExceededError(
                f"requested [{lo}, {hi}] outside evaluable [{a}, {b}]"
            )
        start = lo + p.offset - p.lo
        return np.asarray(p.symbols[start : start + (hi - lo + 1)], dtype=np.int16)
    return np.asarray([p.eval(n) for n in range(lo, hi + 1)], dtype=np.int16)


def points_provably_equal(x: PointRep, y: PointRep) -> bool:
    """Decidable extensional equality on the representable points.

    Two eventually periodic points are compared on a window wide enough to
    pin both tails; sampled windows only compare equal when they are the
    same partial point (same evaluable range and symbols).
    """
    if isinstance(x, EventuallyPeriodic) and isinstance(y, EventuallyPeriodic):
        if x.sft != y.sft:
            return False
        left = _lcm(len(x.left), len(y.left))
        right = _lcm(len(x.right), len(y.right))
        lo = min(-x.offset, -y.offset, 0) - left
        hi = max(len(x.core) - x.offset, len(y.core) - y.offset, 0) + right
        return all(x.eval(n) == y.eval(n) for n in range(lo, hi + 1))
    if isinstance(x, SampledWindow) and isinstance(y, SampledWindow):
        return (
            x.sft == y.sft
            and x.evaluable() == y.evaluable()
            and x.symbols == y.symbols
        )
    return False


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# Cylinders and unions
# ---------------------------------------------------------------------------


class Cylinder:
    """[word]_start. Construction flags emptiness instead of normalizing it away."""

    def __init__(self, sft: Sft, start: int, word):
        w = parse_word(word)
        if not w:
            raise ValueError("cylinder word must be nonempty")
        if any(not (0 <= s < sft.alphabet_size) for s in w):
            raise ValueError("cylinder word has out-of-range symbols")
        self.sft = sft
        self.start = start
        self.word = w
        self.is_empty = not sft.word_allowed(w)

    @property
    def end(self) -> int:
        return self.start + len(self.word) - 1

    def translate(self, delta: int) -> "Cylinder":
        return Cylinder(self.sft, self.start + delta, self.word)

    def as_union(self) -> "CylinderUnion":
        return CylinderUnion(self.sft, [self])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cylinder)
            and self.sft == other.sft
            and self.start == other.start
            and self.word == other.word
        )

    def __hash__(self) -> int:
        return hash((self.sft, self.start, self.word))

    def __repr__(self) -> str:
        return f"[{format_word(self.word)}]_{self.start}"


class CylinderUnion:
    """A finite union of cylinders in canonical form.

    Normal form: a single support interval and the sorted set of full-length
    legal words whose cylinders make up the set. The support is minimal
    (free boundary coordinates are trimmed), the empty set is ``words == ()``
    and the whole space is all single symbols at coordinate 0, so equal sets
    have identical normal forms.
    """

    def __init__(self, sft: Sft, cylinders: Iterable[Cylinder]):
        cyls = list(cylinders)
        for c in cyls:
            if c.sft != sft:
                raise ValueError("cylinder belongs to a different subshift")
        live = [c for c in cyls if not c.is_empty]
        self.sft = sft
        if not live:
            self.start = 0
            self.words: tuple[Word, ...] = ()
            return
        lo = min(c.start for c in live)
        hi = max(c.end for c in live)
        words: set[Word] = set()
        budget = WORD_BUDGET
        for c in live:
            for w in _extensions(sft, c, lo, hi):
                words.add(w)
                if len(words) > budget:
                    raise ValueError(
                        "union too wide for exact normalization "
                        f"(> {budget} words over [{lo}, {hi}])"
                    )
        start, trimmed = _trim(sft, lo, words)
        self.start = start
        self.words = tuple(sorted(trimmed))

    @classmethod
    def _from_normal(cls, sft: Sft, start: int, words: Iterable[Word]) -> "CylinderUnion":
        u = cls.__new__(cls)
        u.sft = sft
        word_set = set(words)
        if not word_set:
            u.start = 0
            u.words = ()
        else:
            s, trimmed = _trim(sft, start, word_set)
            u.start = s
            u.words = tuple(sorted(trimmed))
        return u

    # -- structure -------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.words

    @property
    def is_full(self) -> bool:
        if not self.words:
            return False
        return len(self.words[0]) == 1 and len(self.words) == self.sft.alphabet_size

    @property
    def support(self) -> Union[tuple[int, int], None]:
        if self.is_empty:
            return None
        return (self.start, self.start + len(self.words[0]) - 1)

    @property
    def width(self) -> int:
        return 0 if self.is_empty else len(self.words[0])

    def blocks(self) -> tuple[tuple[int, tuple[Word, ...]], ...]:
        if self.is_empty:
            return ()
        return ((self.start, self.words),)

    @property
    def bridged(self) -> bool:
        return False

    # -- set algebra -------------------------------------------------------

    def translate(self, delta: int) -> "CylinderUnion":
        if self.is_empty or self.is_full:
            return self  # translation-invariant canonical forms
        u = CylinderUnion.__new__(CylinderUnion)
        u.sft = self.sft
        u.start = self.start + delta
        u.words = self.words
        return u

    def complement(self) -> "CylinderUnion":
        if self.is_empty:
            return whole_space(self.sft)
        width = self.width
        mine = set(self.words)
        rest = [w for w in self.sft.legal_words(width) if w not in mine]
        return CylinderUnion._from_normal(self.sft, self.start, rest)

    def union(self, other: "CylinderUnion") -> "CylinderUnion":
        if self.sft != other.sft:
            raise ValueError("union across different subshifts")
        cyls = [Cylinder(self.sft, s, w) for s, ws in self.blocks() for w in ws]
        cyls += [Cylinder(self.sft, s, w) for s, ws in other.blocks() for w in ws]
        return CylinderUnion(self.sft, cyls)

    def contains_point(self, p: PointRep, shift: int = 0) -> bool:
        if self.is_empty:
            return False
        lo, hi = self.support
        window = tuple(p.eval(n + shift) for n in range(lo, hi + 1))
        return window in self._word_set()

    def _word_set(self) -> frozenset[Word]:
        cached = getattr(self, "_words_frozen", None)
        if cached is None:
            cached = frozenset(self.words)
            self._words_frozen = cached
        return cached

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CylinderUnion)
            and self.sft == other.sft
            and self.start == other.start
            and self.words == other.words
        )

    def __hash__(self) -> int:
        return hash((self.sft, self.start, self.words))

    def __repr__(self) -> str:
        if self.is_empty:
            return "CylinderUnion(empty)"
        if self.is_full:
            return "CylinderUnion(full)"
        ws = ",".join(format_word(w) for w in self.words[:4])
        more = "..." if len(self.words) > 4 else ""
        return f"CylinderUnion(@{self.start}: {ws}{more})"


def whole_space(sft: Sft) -> CylinderUnion:
    return CylinderUnion._from_normal(
        sft, 0, [(a,) for a in range(sft.alphabet_size)]
    )


def cylinder(sft: Sft, start: int, word) -> CylinderUnion:
    return Cylinder(sft, start, word).as_union()


def _extensions(sft: Sft, c: Cylinder, lo: int, hi: int) -> Iterable[Word]:
    """All legal words over [lo, hi] that restrict to c's word."""
    lefts: list[Word] = [()]
    for _ in range(c.start - lo):
        lefts = [(a,) + w for w in lefts for a in sft.predecessors((w + c.word)[0])]
    rights: list[Word] = [()]
    for _ in range(hi - c.end):
        rights = [w + (b,) for w in rights for b in sft.successors((c.word + w)[-1])]
    for left in lefts:
        for right in rights:
            yield left + c.word + right


def _trim(sft: Sft, start: int, words: set[Word]) -> tuple[int, set[Word]]:
    """Minimal-support form: strip boundary coordinates that are free."""
    width = len(next(iter(words)))
    while width > 1:
        by_prefix: dict[Word, set[int]] = {}
        for w in words:
            by_prefix.setdefault(w[:-1], set()).add(w[-1])
        if all(
            symbols == set(sft.successors(prefix[-1]))
            for prefix, symbols in by_prefix.items()
        ):
            words = set(by_prefix)
            width -= 1
            continue
        by_suffix: dict[Word, set[int]] = {}
        for w in words:
            by_suffix.setdefault(w[1:], set()).add(w[0])
        if all(
            symbols == set(sft.predecessors(suffix[0]))
            for suffix, symbols in by_suffix.items()
        ):
            words = set(by_suffix)
            start += 1
            width -= 1
            continue
        break
    if width == 1 and len(words) == sft.alphabet_size:
        start = 0
    return start, words


# ---------------------------------------------------------------------------
# Shifted constraint sets and their exact resolution
# ---------------------------------------------------------------------------

SetLike = Union[Cylinder, CylinderUnion, "BridgedBlocks"]
Constraint = tuple[int, SetLike]
ShiftedConstraintSet = Sequence[Constraint]


@dataclass(frozen=True)
class EmptyIntersection:
    """Resolution result: the constraints have no point in the subshift."""

    reason: str

    @property
    def is_empty(self) -> bool:
        return True

    @property
    def bridged(self) -> bool:
        return False

    def blocks(self) -> tuple:
        return ()

    def contains_point(self, p: PointRep, shift: int = 0) -> bool:
        return False


class BridgedBlocks:
    """Exact intersection in block form: constrained intervals with free gaps.

    A point belongs to the set iff its window over every block interval is
    one of that block's words; the gaps carry no constraint beyond subshift
    legality. Word lists are filtered so every listed word occurs in some
    point of the set, and cross-gap reachability has been verified, so the
    set is nonempty by construction.
    """

    def __init__(self, sft: Sft, blocks: Sequence[tuple[int, tuple[Word, ...]]]):
        self.sft = sft
        self._blocks = tuple((s, tuple(sorted(set(ws)))) for s, ws in blocks)
        if any(not ws for _, ws in self._blocks):
            raise ValueError("BridgedBlocks with an empty block")

    @property
    def is_empty(self) -> bool:
        return False

    @property
    def bridged(self) -> bool:
        return True

    def blocks(self) -> tuple[tuple[int, tuple[Word, ...]], ...]:
        return self._blocks

    @property
    def support(self) -> tuple[int, int]:
        first, last = self._blocks[0], self._blocks[-1]
        return (first[0], last[0] + len(last[1][0]) - 1)

    def contains_point(self, p: PointRep, shift: int = 0) -> bool:
        for s, ws in self._blocks:
            width = len(ws[0])
            window = tuple(p.eval(n + shift) for n in range(s, s + width))
            if window not in set(ws):
                return False
        return True

    def __repr__(self) -> str:
        return f"BridgedBlocks({len(self._blocks)} blocks over {self.support})"


_FULL = "full"
_EMPTY = "empty"


def _atoms_of(setlike: SetLike):
    """Constraint atoms (start, words) of a set-like object, or a marker."""
    if isinstance(setlike, Cylinder):
        if setlike.is_empty:
            return _EMPTY
        return [(setlike.start, (setlike.word,))]
    if isinstance(setlike, CylinderUnion):
        if setlike.is_empty:
            return _EMPTY
        if setlike.is_full:
            return _FULL
        return list(setlike.blocks())
    if isinstance(setlike, BridgedBlocks):
        return list(setlike.blocks())
    if isinstance(setlike, EmptyIntersection):
        return _EMPTY
    raise TypeError(f"not a set-like object: {setlike!r}")


def constraint_atoms(constraints: ShiftedConstraintSet, sft: Sft):
    """Translate constraints into raw atoms; T^{-k}[w]_i = [w]_{i+k}."""
    atoms: list[tuple[int, tuple[Word, ...]]] = []
    for shift, setlike in constraints:
        if isinstance(setlike, (Cylinder, CylinderUnion)) and setlike.sft != sft:
            raise ValueError("constraint set belongs to a different subshift")
        res = _atoms_of(setlike)
        if res is _EMPTY:
            return _EMPTY
        if res is _FULL:
            continue
        atoms.extend((start + shift, words) for start, words in res)
    return atoms


def _merge_cluster(sft: Sft, atoms, lo: int, hi: int) -> tuple[Word, ...]:
    """Legal words over [lo, hi] consistent with every atom (DFS with pruning)."""
    prefix_sets = []
    for start, words in atoms:
        by_len = [set() for _ in range(len(words[0]) + 1)]
        for w in words:
            for i in range(len(w) + 1):
                by_len[i].add(w[:i])
        prefix_sets.append((start, len(words[0]), by_len))

    out: list[Word] = []

    def step(pos: int, word: list[int]):
        if pos > hi:
            out.append(tuple(word))
            return
        if word:
            candidates = sft.successors(word[-1])
        else:
            candidates = range(sft.alphabet_size)
        for sym in candidates:
            word.append(sym)
            ok = True
            for start, width, by_len in prefix_sets:
                if start <= pos < start + width:
                    took = pos - start + 1
                    if tuple(word[start - lo : start - lo + took]) not in by_len[took]:
                        ok = False
                        break
            if ok:
                step(pos + 1, word)
            word.pop()

    step(lo, [])
    return tuple(out)


def _cluster_constraints(sft: Sft, atoms):
    """Merge overlapping atoms into blocks and filter across gaps.

    Returns a list of (start, words) blocks sorted by start with pairwise
    disjoint intervals, or EmptyIntersection.
    """
    spans = sorted(atoms, key=lambda a: (a[0], a[0] + len(a[1][0])))
    clusters: list[list] = []
    cur: list = []
    cur_hi = None
    for start, words in spans:
        end = start + len(words[0]) - 1
        if cur and start <= cur_hi:
            cur.append((start, words))
            cur_hi = max(cur_hi, end)
        else:
            if cur:
                clusters.append((cur, cur_hi))
            cur = [(start, words)]
            cur_hi = end
    clusters.append((cur, cur_hi))

    blocks: list[tuple[int, tuple[Word, ...]]] = []
    for group, g_hi in clusters:
        g_lo = group[0][0]
        if len(group) == 1:
            merged = group[0][1]
        else:
            merged = _merge_cluster(sft, group, g_lo, g_hi)
        if not merged:
            return EmptyIntersection(
                f"contradictory or illegal constraints over [{g_lo}, {g_hi}]"
            )
        blocks.append((g_lo, tuple(merged)))

    # Forward filter: keep words whose start symbol is reachable from some
    # surviving end symbol of the previous block.
    filtered: list[tuple[int, tuple[Word, ...]]] = []
    prev_ends: frozenset[int] | None = None
    prev_hi = None
    for start, words in blocks:
        if prev_ends is not None:
            steps = start - prev_hi
            keep = tuple(
                w for w in words if any(sft.reachable(e, w[0], steps) for e in prev_ends)
            )
            if not keep:
                return EmptyIntersection(
                    f"no legal word bridges the gap into coordinate {start}"
                )
            words = keep
        filtered.append((start, words))
        prev_ends = frozenset(w[-1] for w in words)
        prev_hi = start + len(words[0]) - 1

    # Backward filter, symmetric.
    result: list[tuple[int, tuple[Word, ...]]] = []
    next_starts: frozenset[int] | None = None
    next_lo = None
    for start, words in reversed(filtered):
        hi = start + len(words[0]) - 1
        if next_starts is not None:
            steps = next_lo - hi
            keep = tuple(
                w for w in words if any(sft.reachable(w[-1], b, steps) for b in next_starts)
            )
            if not keep:
                return EmptyIntersection(
                    f"no legal word bridges the gap out of coordinate {hi}"
                )
            words = keep
        result.append((start, words))
        next_starts = frozenset(w[0] for w in words)
        next_lo = start
    result.reverse()
    return result


def resolve_constraints(
    constraints: ShiftedConstraintSet,
    sft: Sft,
    *,
    gap_cap: int = GAP_CAP,
    word_budget: int = WORD_BUDGET,
) -> Union[CylinderUnion, BridgedBlocks, EmptyIntersection]:
    """Exact intersection of T^{-shift}(set) over the constraint list.

    Gaps of at most `gap_cap` free coordinates are bridged by explicit word
    enumeration, producing a normalized CylinderUnion; larger gaps (or an
    enumeration beyond `word_budget` words) keep the exact block form.
    An empty constraint list resolves to the whole space.
    """
    atoms = constraint_atoms(constraints, sft)
    if atoms is _EMPTY:
        return EmptyIntersection("a constraint set is empty")
    if not atoms:
        return whole_space(sft)
    blocks = _cluster_constraints(sft, atoms)
    if isinstance(blocks, EmptyIntersection):
        return blocks

    gaps = []
    estimate = 1
    for (s1, w1), (s2, _w2) in zip(blocks, blocks[1:]):
        gap = s2 - (s1 + len(w1[0]))
        gaps.append(gap)
        estimate *= sft.alphabet_size ** min(gap, 64)
    for _s, ws in blocks:
        estimate *= len(ws)
    if all(g <= gap_cap for g in gaps) and estimate <= word_budget:
        lo = blocks[0][0]
        hi = blocks[-1][0] + len(blocks[-1][1][0]) - 1
        words = _merge_cluster(sft, blocks, lo, hi)
        if not words:
            return EmptyIntersection("no legal word over the full span")
        return CylinderUnion._from_normal(sft, lo, words)
    if len(blocks) == 1:
        return CylinderUnion._from_normal(sft, blocks[0][0], blocks[0][1])
    return BridgedBlocks(sft, blocks)


def point_in_set(p: PointRep, s: SetLike, shift: int = 0) -> bool:
    """True iff T^shift p lies in s."""
    if isinstance(s, Cylinder):
        if s.is_empty:
            return False
        window = tuple(p.eval(n + shift) for n in range(s.start, s.end + 1))
        return window == s.word
    return s.contains_point(p, shift)


# ---------------------------------------------------------------------------
# Metric geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistanceResult:
    """A metric value; `truncated` marks a horizon-limited upper bound."""

    value: float
    truncated: bool

    def __float__(self) -> float:
        return self.value


def metric_distance(x: PointRep, y: PointRep, horizon: int) -> DistanceResult:
    """d(x, y) = 2^{-min{|n| : x_n != y_n}} scanned outward to |n| <= horizon."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if points_provably_equal(x, y):
        return DistanceResult(0.0, False)
    if x.eval(0) != y.eval(0):
        return DistanceResult(1.0, False)
    for n in range(1, horizon + 1):
        if x.eval(n) != y.eval(n) or x.eval(-n) != y.eval(-n):
            return DistanceResult(2.0 ** (-n), False)
    return DistanceResult(2.0 ** (-horizon - 1), True)


def realizable_symbols(s: SetLike, n: int) -> frozenset[int]:
    """{x_n : x in s} for a nonempty block-form set (exact)."""
    blocks = s.blocks()
    if not blocks:
        raise ValueError("realizable_symbols of the whole space is the full alphabet")
    sft = s.sft
    for start, words in blocks:
        width = len(words[0])
        if start <= n < start + width:
            return frozenset(w[n - start] for w in words)
    first_start = blocks[0][0]
    last = blocks[-1]
    last_end = last[0] + len(last[1][0]) - 1
    if n < first_start:
        symbols = frozenset(w[0] for w in blocks[0][1])
        for _ in range(first_start - n):
            symbols = s.sft.step_backward(symbols)
        return symbols
    if n > last_end:
        symbols = frozenset(w[-1] for w in last[1])
        for _ in range(n - last_end):
            symbols = sft.step_forward(symbols)
        return symbols
    # n sits in a gap between two blocks: realizable = reachable forward from
    # the previous block meeting reachable backward from the next block.
    prev = max(b for b in blocks if b[0] + len(b[1][0]) - 1 < n)
    nxt = min(b for b in blocks if b[0] > n)
    fwd = frozenset(w[-1] for w in prev[1])
    for _ in range(n - (prev[0] + len(prev[1][0]) - 1)):
        fwd = sft.step_forward(fwd)
    bwd = frozenset(w[0] for w in nxt[1])
    for _ in range(nxt[0] - n):
        bwd = sft.step_backward(bwd)
    return fwd & bwd


def _single_valued_forever(sft: Sft, start_set: frozenset[int], forward: bool) -> bool:
    """True iff every realizable set along this direction stays a singleton."""
    seen = {start_set}
    current = start_set
    step = sft.step_forward if forward else sft.step_backward
    while True:
        current = step(current)
        if len(current) > 1:
            return False
        if current in seen:
            return True
        seen.add(current)


def diam_of_set(s: SetLike, sft: Sft, horizon: int) -> DistanceResult:
    """Exact diameter of a nonempty set under the 2^{-|n|} metric.

    The diameter is 2^{-n*} for the multi-valued realizable coordinate n*
    nearest 0. If no coordinate in [-horizon, horizon] is multi-valued the
    result is the truncated bound 2^{-horizon-1}, except when the set is
    provably a single point (pinned forever), which gives exactly 0.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if isinstance(s, CylinderUnion) and s.is_full:
        if sft.alphabet_size >= 2:
            return DistanceResult(1.0, False)
        return DistanceResult(0.0, False)
    if s.is_empty:
        raise ValueError("diameter of the empty set")
    for n in range(0, horizon + 1):
        for coord in ((n,) if n == 0 else (-n, n)):
            if len(realizable_symbols(s, coord)) >= 2:
                return DistanceResult(2.0 ** (-n), False)
    # Nothing multi-valued within the horizon. The set is a single point
    # (exact diameter 0) iff every remaining support coordinate is pinned
    # and both periodic tails stay single-valued forever.
    blocks = s.blocks()
    lo_sup = blocks[0][0]
    hi_sup = blocks[-1][0] + len(blocks[-1][1][0]) - 1
    outside = [n for n in range(lo_sup, hi_sup + 1) if abs(n) > horizon]
    if any(len(realizable_symbols(s, n)) >= 2 for n in outside):
        return DistanceResult(2.0 ** (-horizon - 1), True)
    left = frozenset(w[0] for w in blocks[0][1])
    right = frozenset(w[-1] for w in blocks[-1][1])
    if _single_valued_forever(sft, right, forward=True) and _single_valued_forever(
        sft, left, forward=False
    ):
        return DistanceResult(0.0, False)
    return DistanceResult(2.0 ** (-horizon - 1), True)
