"""Elementary languages: a word plus a timed condition, and their algebra.

Successors and exteriors operate on the canonical per-pair ranges of the
condition and rebuild the zone from the edited ranges; canonicalization
then restores tightness.  All operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .conditions import Range, TimedCondition
from .words import TimedWord


@dataclass(frozen=True)
class FractionalOrder:
    """Ordered partition of {0} union {frac(T(i,n))} into equality blocks.

    ``blocks[0]`` lists the suffix-sum indices whose fractional part is 0
    (possibly none: the zero block always exists, vars are optional).
    Later blocks are in strictly increasing fractional order.
    """

    blocks: tuple[tuple[int, ...], ...]

    def rank_of(self, i: int) -> int:
        for rank, block in enumerate(self.blocks):
            if i in block:
                return rank
        raise ValueError(f"suffix sum {i} not in the order")


class ElementaryLanguage:
    """A word u plus a bounded satisfiable condition over tau_0..tau_|u|."""

    __slots__ = ("word", "condition", "_key")

    def __init__(self, word: Sequence[str], condition: TimedCondition) -> None:
        word = tuple(word)
        if condition.n != len(word):
            raise ValueError("condition dimension must equal the word length")
        self.word = word
        self.condition = condition
        self._key: tuple | None = None

    @classmethod
    def seed(cls) -> "ElementaryLanguage":
        """(epsilon, tau_0 = 0): the observation-table origin."""
        cond = TimedCondition.universal(0).constrain_sum(0, 0, "==", 0)
        return cls((), cond)

    @property
    def n(self) -> int:
        return self.condition.n

    def key(self) -> tuple:
        return (self.word, self.condition.key())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ElementaryLanguage) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        u = "".join(self.word) if self.word else "eps"
        return f"({u}, {self.condition.render()})"

    def is_simple(self) -> bool:
        return self.condition.is_simple()

    def contains(self, w: TimedWord) -> bool:
        if w.events != self.word:
            return False
        return self.condition.contains(w.durations)

    def concat(self, other: "ElementaryLanguage") -> "ElementaryLanguage":
        """Concatenation language; the seam dwells merge into one."""
        joint = self.condition.embed_concat(other.condition)
        keep = [0] + [
            joint.vidx(k) for k in range(joint.n + 1) if k != self.n + 1
        ]
        merged = TimedCondition(joint.n - 1, joint.dbm.project(keep))
        return ElementaryLanguage(self.word + other.word, merged)


def concat(w: TimedWord, w2: TimedWord) -> TimedWord:
    return w.concat(w2)


def contains(p: ElementaryLanguage, w: TimedWord) -> bool:
    return p.contains(w)


def canonicalize(cond: TimedCondition) -> TimedCondition:
    """Tightest equivalent condition; conditions here are born canonical.

    Kept as an explicit operation for raw-matrix edits and as the home of
    the emptiness check.
    """
    out = cond.copy()
    out.dbm.canonicalize()
    if out.dbm.empty:
        from .conditions import EmptyCondition

        raise EmptyCondition("condition is unsatisfiable")
    return out


def enumerate_simple(cond: TimedCondition) -> list[TimedCondition]:
    return cond.enumerate_simple()


def fractional_order(
    p: "ElementaryLanguage | TimedCondition",
) -> FractionalOrder:
    """The unique total order of fractional parts of the suffix sums."""
    cond = p.condition if isinstance(p, ElementaryLanguage) else p
    if not cond.is_simple():
        raise ValueError("fractional order needs a simple condition")
    n = cond.n
    zero_block: list[int] = []
    open_vars: list[int] = []
    int_part: dict[int, int] = {}
    for i in range(n + 1):
        r = cond.range_of(i, n)
        if r.is_point():
            zero_block.append(i)
        else:
            int_part[i] = r.lo[0] if r.lo is not None else 0
            open_vars.append(i)

    def frac_less(i: int, j: int) -> Optional[bool]:
        # None: equal fractional parts (difference pinned to an integer)
        diff = cond.dbm.pinned(cond.vidx(i), cond.vidx(j))
        if diff is not None:
            return None
        r = cond.range_of(i, j - 1) if i < j else cond.range_of(j, i - 1)
        lo = r.lo[0] if r.lo is not None else 0
        gap = int_part[i] - int_part[j] if i < j else int_part[j] - int_part[i]
        # y_i - y_j in (gap, gap+1) iff frac(y_i) > frac(y_j)
        upper_unit = lo == gap
        return (not upper_unit) if i < j else upper_unit

    blocks: list[list[int]] = []
    for v in open_vars:
        placed = False
        for pos, block in enumerate(blocks):
            rel = frac_less(v, block[0]) if v < block[0] else frac_less(block[0], v)
            cmp_less = rel if v < block[0] else (None if rel is None else not rel)
            if cmp_less is None:
                block.append(v)
                placed = True
                break
            if cmp_less:
                blocks.insert(pos, [v])
                placed = True
                break
        if not placed:
            blocks.append([v])
    ordered = [tuple(sorted(zero_block))] + [tuple(sorted(b)) for b in blocks]
    return FractionalOrder(tuple(ordered))


def sample_witness(p: ElementaryLanguage, cap: Optional[int] = None) -> TimedWord:
    """A deterministic member word.

    Simple conditions get the region witness: integer parts from the
    ranges, fractional parts rank/(blocks+1) over the fractional order.
    Bounded non-simple conditions sample their first simple cell;
    unbounded ones are capped at max-constant + 1 (or ``cap``) first.
    """
    return TimedWord(witness_durations(p.condition, cap), p.word)


def witness_durations(
    cond: TimedCondition, cap: Optional[int] = None
) -> list[Fraction]:
    """Duration vector of a member point of the condition."""
    if cond.is_empty:
        raise ValueError("cannot sample an empty condition")
    if not cond.is_simple():
        work = cond
        if not work.is_bounded():
            bound = cap if cap is not None else work.max_constant() + 1
            work = work.copy().constrain_sum(0, work.n, "<=", max(bound, 1))
        return witness_durations(work.enumerate_simple()[0])
    order = fractional_order(cond)
    num_open = len(order.blocks) - 1
    y: list[Fraction] = []
    for i in range(cond.n + 1):
        r = cond.range_of(i, cond.n)
        assert r.lo is not None
        rank = order.rank_of(i)
        y.append(Fraction(r.lo[0]) + Fraction(rank, num_open + 1))
    return [
        y[i] - (y[i + 1] if i + 1 <= cond.n else Fraction(0))
        for i in range(cond.n + 1)
    ]


def prefixes(p: ElementaryLanguage) -> list[ElementaryLanguage]:
    """All simple prefix cells of p, including p's own cell(s).

    For each event count k, the last dwell is truncated anywhere the
    condition allows; the resulting condition is split into simple cells.
    """
    out: list[ElementaryLanguage] = []
    seen: set = set()
    for k in range(p.n + 1):
        pre = p.condition.prefix_at(k)
        for cell in pre.enumerate_simple():
            q = ElementaryLanguage(p.word[:k], cell)
            if q.key() not in seen:
                seen.add(q.key())
                out.append(q)
    return out


def discrete_successor(p: ElementaryLanguage, a: str) -> ElementaryLanguage:
    """(u a, condition and tau_{n+1} = 0)."""
    n = p.n
    out = TimedCondition.universal(n + 1)
    # appending zero dwell keeps every suffix sum; anchor moves to y_{n+1}
    index_map = [out.vidx(n + 1)] + [out.vidx(i) for i in range(n + 1)]
    out.dbm.imprint(p.condition.dbm, index_map)
    out.constrain_sum(n + 1, n + 1, "==", 0)
    return ElementaryLanguage(p.word + (a,), out)


def discrete_exterior(p: ElementaryLanguage, a: str) -> ElementaryLanguage:
    """Immediate exterior in the event direction; equals the successor."""
    return discrete_successor(p, a)


def _rebuild(p: ElementaryLanguage, edits: dict[int, Range]) -> TimedCondition:
    """Re-assert all pair ranges with the suffix-sum edits applied."""
    cond = p.condition
    out = TimedCondition.universal(cond.n)
    for i, j in cond.pairs():
        if j == cond.n and i in edits:
            out.constrain_range(i, j, edits[i])
        else:
            out.constrain_range(i, j, cond.range_of(i, j))
    return out


def continuous_successor(p: ElementaryLanguage) -> ElementaryLanguage:
    """The next simple cell under time elapse.

    Pinned suffix sums all open into (d, d+1); otherwise the fractional
    frontier (the greatest blocks) lands on the next integer.
    """
    cond = p.condition
    if not cond.is_simple():
        raise ValueError("continuous successor needs a simple condition")
    n = cond.n
    edits: dict[int, Range] = {}
    pinned = [i for i in range(n + 1) if cond.range_of(i, n).is_point()]
    if pinned:
        for i in pinned:
            d = cond.range_of(i, n).point_value()
            edits[i] = Range((d, True), (d + 1, True))
    else:
        order = fractional_order(p)
        for i in order.blocks[-1]:
            r = cond.range_of(i, n)
            assert r.lo is not None
            edits[i] = Range((r.lo[0] + 1, False), (r.lo[0] + 1, False))
    return ElementaryLanguage(p.word, _rebuild(p, edits))


def continuous_exterior(p: ElementaryLanguage) -> ElementaryLanguage:
    """Immediate time exterior.

    With equations T(i,n) = d they all relax to > d (possibly unbounded);
    otherwise the smallest-index strict upper bound hardens to equality,
    which can come out empty.
    """
    cond = p.condition
    n = cond.n
    edits: dict[int, Range] = {}
    pinned = [
        i for i in range(n + 1) if cond.range_of(i, n).is_point()
    ]
    if pinned:
        for i in pinned:
            d = cond.range_of(i, n).point_value()
            edits[i] = Range((d, True), None)
    else:
        target = None
        for i in range(n + 1):
            hi = cond.range_of(i, n).hi
            if hi is not None and hi[1]:
                target = (i, hi[0])
                break
        if target is None:
            raise ValueError("no strict upper bound to promote")
        i, d = target
        edits[i] = Range((d, False), (d, False))
    return ElementaryLanguage(p.word, _rebuild(p, edits))


def simple_cell_of(w: TimedWord) -> ElementaryLanguage:
    """The simple elementary language whose cell contains ``w``."""
    n = len(w.events)
    cond = TimedCondition.universal(n)
    for i in range(n + 1):
        for j in range(i, n + 1):
            v = sum(w.durations[i : j + 1], Fraction(0))
            if v.denominator == 1:
                cond.constrain_sum(i, j, "==", int(v))
            else:
                d = v.numerator // v.denominator
                cond.constrain_sum(i, j, ">", d).constrain_sum(i, j, "<", d + 1)
    return ElementaryLanguage(w.events, cond)


def witness_matching(p: ElementaryLanguage, pins: dict[int, Fraction]) -> TimedWord:
    """A member word whose suffix sums hit the pinned exact values.

    ``pins`` maps a variable index i to the required value of T(i, n).
    Pinned sums fix the fractional part of their block; the free blocks
    spread strictly between the neighbouring fixed values, so the result
    stays inside the (simple) condition whenever the pins are themselves
    consistent with it.
    """
    cond = p.condition
    if cond.is_empty or not cond.is_simple():
        raise ValueError("matching witnesses need a simple row condition")
    n = cond.n
    order = fractional_order(p)
    fracs: list[Optional[Fraction]] = [Fraction(0)] + [None] * (
        len(order.blocks) - 1
    )
    floors: dict[int, int] = {}
    for i in range(n + 1):
        r = cond.range_of(i, n)
        floors[i] = r.point_value() if r.is_point() else r.lo[0]
    for i, raw in pins.items():
        v = Fraction(raw)
        whole = v.numerator // v.denominator
        frac = v - whole
        r = cond.range_of(i, n)
        ok = (r.is_point() and v == r.point_value()) or (
            r.is_unit() and whole == r.lo[0] and frac > 0
        )
        if not ok:
            raise ValueError(f"pinned value {v} falls outside T({i},{n})")
        rank = order.rank_of(i)
        if fracs[rank] is None:
            fracs[rank] = frac
        elif fracs[rank] != frac:
            raise ValueError("pinned values disagree within a fractional block")
    anchors = [(k, f) for k, f in enumerate(fracs) if f is not None]
    anchors.append((len(fracs), Fraction(1)))
    for (alo, flo), (ahi, fhi) in zip(anchors, anchors[1:]):
        if flo >= fhi:
            raise ValueError("pinned values violate the fractional order")
        for t in range(1, ahi - alo):
            fracs[alo + t] = flo + (fhi - flo) * Fraction(t, ahi - alo)
    y = [Fraction(floors[i]) + fracs[order.rank_of(i)] for i in range(n + 1)]
    durations = [
        y[i] - (y[i + 1] if i + 1 <= n else Fraction(0)) for i in range(n + 1)
    ]
    if any(d < 0 for d in durations):
        raise ValueError("pins admit no witness in this condition")
    return TimedWord(durations, p.word)
