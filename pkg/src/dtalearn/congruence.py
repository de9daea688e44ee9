"""Row equivalence up to renaming of suffix sums.

Two rows are interchangeable when some conjunction of equations
T[i..n] == T'[i'..n'] makes their symbolic memberships agree on every
suffix.  Agreement is decided inside one shared DBM over three groups
of variables: the extended sums of either row and the plain sums of the
suffix.  ``find_renaming`` enumerates candidate equation sets from a
bipartite graph over the clocks that observably matter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .conditions import Range, SumBound, TimedCondition
from .dbm import DBM
from .elementary import ElementaryLanguage

# cells(p, s) -> accepted simple cells of the symbolic membership of p.s
CellFn = Callable[[ElementaryLanguage, ElementaryLanguage], Sequence[TimedCondition]]

_SEARCH_BUDGET = 20000


@dataclass(frozen=True)
class RenamingEquation:
    """Conjunction of suffix-sum equations between two rows.

    ``pairs`` holds (i, j) meaning T(i, left_n) == T'(j, right_n); the
    empty conjunction is the trivial renaming.
    """

    left_n: int
    right_n: int
    pairs: tuple[tuple[int, int], ...] = ()

    def with_pair(self, i: int, j: int) -> "RenamingEquation":
        merged = tuple(sorted(set(self.pairs) | {(i, j)}))
        return RenamingEquation(self.left_n, self.right_n, merged)

    def flipped(self) -> "RenamingEquation":
        return RenamingEquation(
            self.right_n, self.left_n, tuple(sorted((j, i) for i, j in self.pairs))
        )

    def render(self) -> str:
        if not self.pairs:
            return "true"
        return " and ".join(
            f"T[{i}..{self.left_n}] == T'[{j}..{self.right_n}]"
            for i, j in self.pairs
        )

    def __str__(self) -> str:
        return self.render()


class _TripleSpace:
    """Variable layout shared by both memberships of one suffix.

    D_i = T(i,n) + T''(0,ns), E_j = T'(j,n') + T''(0,ns) and
    C_k = T''(k,ns), with one common zero at index 0.  Every constraint
    of either joint membership is a difference of these.
    """

    __slots__ = ("n", "n2", "ns")

    def __init__(self, n: int, n2: int, ns: int) -> None:
        self.n, self.n2, self.ns = n, n2, ns

    @property
    def num_vars(self) -> int:
        return self.n + self.n2 + self.ns + 3

    def d(self, i: int) -> int:
        return 1 + i

    def e(self, j: int) -> int:
        return self.n + 2 + j

    def c(self, k: int) -> int:
        return self.n + self.n2 + 3 + k

    def left_joint_map(self) -> list[int]:
        # joint y_k of p.s: k <= n reads D_k, k = n+1+j reads C_j
        return (
            [0]
            + [self.d(i) for i in range(self.n + 1)]
            + [self.c(k) for k in range(self.ns + 1)]
        )

    def right_joint_map(self) -> list[int]:
        return (
            [0]
            + [self.e(j) for j in range(self.n2 + 1)]
            + [self.c(k) for k in range(self.ns + 1)]
        )

    def left_row_map(self) -> list[int]:
        # T(i,n) = D_i - C_0, so the row condition anchors at C_0
        return [self.c(0)] + [self.d(i) for i in range(self.n + 1)]

    def right_row_map(self) -> list[int]:
        return [self.c(0)] + [self.e(j) for j in range(self.n2 + 1)]

    def suffix_map(self) -> list[int]:
        return [0] + [self.c(k) for k in range(self.ns + 1)]


def _embed_base(
    space: _TripleSpace,
    p: ElementaryLanguage,
    p2: ElementaryLanguage,
    s: ElementaryLanguage,
) -> DBM:
    base = DBM.universal(space.num_vars)
    base.imprint(p.condition.dbm, space.left_row_map())
    base.imprint(p2.condition.dbm, space.right_row_map())
    base.imprint(s.condition.dbm, space.suffix_map())
    return base


def _embed(
    cell_list: Sequence[TimedCondition],
    base: DBM,
    cell_map: Sequence[int],
) -> list[DBM]:
    zones: list[DBM] = []
    for cell in cell_list:
        z = base.copy()
        z.imprint(cell.dbm, cell_map)
        if not z.empty:
            zones.append(z)
    return zones


def _with_equations(
    zones: Sequence[DBM], space: _TripleSpace, ren: RenamingEquation
) -> list[DBM]:
    if not ren.pairs:
        return list(zones)
    out: list[DBM] = []
    for z0 in zones:
        z = z0.copy()
        for i, j in ren.pairs:
            z.constrain(space.d(i), space.e(j), (0, False))
            z.constrain(space.e(j), space.d(i), (0, False))
        if not z.empty:
            out.append(z)
    return out


def apply_renaming(
    cells: Sequence[TimedCondition],
    ren: RenamingEquation,
    p: ElementaryLanguage,
    p2: ElementaryLanguage,
    s: ElementaryLanguage,
    side: str = "left",
) -> list[DBM]:
    """Embed a symbolic membership into the shared triple space.

    Each accepted cell becomes one zone, conjoined with both row
    conditions, the suffix condition and the renaming equations; empty
    intersections are dropped.
    """
    space = _TripleSpace(p.n, p2.n, s.n)
    cell_map = space.left_joint_map() if side == "left" else space.right_joint_map()
    base = _embed_base(space, p, p2, s)
    return _with_equations(_embed(cells, base, cell_map), space, ren)


def _pair_zone(
    p: ElementaryLanguage, p2: ElementaryLanguage, ren: RenamingEquation
) -> DBM:
    """Both row conditions plus the equations, over one shared zero."""
    n, n2 = p.n, p2.n
    z = DBM.universal(n + n2 + 2)
    z.imprint(p.condition.dbm, [0] + [1 + i for i in range(n + 1)])
    z.imprint(p2.condition.dbm, [0] + [n + 2 + j for j in range(n2 + 1)])
    for i, j in ren.pairs:
        z.constrain(1 + i, n + 2 + j, (0, False))
        z.constrain(n + 2 + j, 1 + i, (0, False))
    return z


class _PairChecker:
    """Agreement test for one row pair, reusable across renamings.

    Embedding the memberships into the triple space does not depend on
    the candidate equations, so the base zones are built once; checking
    a renaming only copies them and adds the equality constraints.
    """

    __slots__ = ("p", "p2", "sides")

    def __init__(
        self,
        p: ElementaryLanguage,
        p2: ElementaryLanguage,
        suffixes: Sequence[ElementaryLanguage],
        cells: CellFn,
    ) -> None:
        self.p, self.p2 = p, p2
        self.sides: list[tuple[_TripleSpace, list[DBM], list[DBM]]] = []
        for s in suffixes:
            space = _TripleSpace(p.n, p2.n, s.n)
            base = _embed_base(space, p, p2, s)
            left = _embed(cells(p, s), base, space.left_joint_map())
            right = _embed(cells(p2, s), base, space.right_joint_map())
            self.sides.append((space, left, right))

    def check(self, ren: RenamingEquation) -> bool:
        if _pair_zone(self.p, self.p2, ren).empty:
            return False
        for space, base_left, base_right in self.sides:
            left = _with_equations(base_left, space, ren)
            right = _with_equations(base_right, space, ren)
            # identical zone sets cover each other without any geometry
            if sorted(z.key() for z in left) != sorted(z.key() for z in right):
                if any(not z.covered_by(right) for z in left):
                    return False
                if any(not z.covered_by(left) for z in right):
                    return False
        return True


def check_pair(
    p: ElementaryLanguage,
    p2: ElementaryLanguage,
    suffixes: Sequence[ElementaryLanguage],
    ren: RenamingEquation,
    cells: CellFn,
) -> bool:
    """Do the rows agree on every suffix under this renaming?

    Requires a jointly satisfiable combination of both conditions and
    the equations, and mutual coverage of the embedded memberships for
    each suffix.
    """
    return _PairChecker(p, p2, suffixes, cells).check(ren)


def _weaker_lo(a: SumBound, b: SumBound) -> SumBound:
    if a is None or b is None:
        return None
    if a[0] != b[0]:
        return a if a[0] < b[0] else b
    return (a[0], a[1] and b[1])


def _weaker_hi(a: SumBound, b: SumBound) -> SumBound:
    if a is None or b is None:
        return None
    if a[0] != b[0]:
        return a if a[0] > b[0] else b
    return (a[0], a[1] and b[1])


def _hull(ranges: Sequence[Range]) -> Range:
    lo, hi = ranges[0].lo, ranges[0].hi
    for r in ranges[1:]:
        lo = _weaker_lo(lo, r.lo)
        hi = _weaker_hi(hi, r.hi)
    return Range(lo, hi)


def _essential_vars(
    row: ElementaryLanguage,
    suffixes: Sequence[ElementaryLanguage],
    cells: CellFn,
) -> set[int]:
    """Clocks whose value observably constrains some membership.

    A clock i is essential when, for some suffix, the hull of the
    accepted cells bounds an extended sum T(i,n)+T''(0,k) more tightly
    than the joint base does, and that tightening is not already implied
    by the tightenings of the essential clocks inside it.  Scanning from
    the innermost sum outwards drops shadows of inner constraints.
    """
    n = row.n
    observed: list[tuple[TimedCondition, dict[tuple[int, int], Range], int]] = []
    for s in suffixes:
        acc = list(cells(row, s))
        if not acc:
            continue
        base = row.condition.embed_concat(s.condition)
        hulls: dict[tuple[int, int], Range] = {}
        for i in range(n + 1):
            for k in range(s.n + 1):
                hulls[(i, k)] = _hull([c.range_of(i, n + 1 + k) for c in acc])
        observed.append((base, hulls, s.n))
    marked: list[int] = []
    for i in range(n, -1, -1):
        essential = False
        for base, hulls, ns in observed:
            z = base.copy()
            for j in marked:
                for k in range(ns + 1):
                    z.constrain_range(j, n + 1 + k, hulls[(j, k)])
            if any(
                z.range_of(i, n + 1 + k) != hulls[(i, k)] for k in range(ns + 1)
            ):
                essential = True
                break
        if essential:
            marked.append(i)
    return set(marked)


def find_renaming(
    p: ElementaryLanguage,
    p2: ElementaryLanguage,
    suffixes: Sequence[ElementaryLanguage],
    cells: CellFn,
) -> Optional[RenamingEquation]:
    """Search for equations making the rows agree on all suffixes.

    Tries the trivial renaming first.  Otherwise builds the bipartite
    graph of essential, non-constant clocks grouped by their own sum
    range; every valid renaming must match clocks range-for-range, so a
    group present on one side only rules every candidate out.  Seeds
    pick one equation per group and grow until a check passes.
    """
    checker = _PairChecker(p, p2, suffixes, cells)
    top = RenamingEquation(p.n, p2.n)
    if checker.check(top):
        return top

    left = {
        i: p.condition.range_of(i, p.n)
        for i in _essential_vars(p, suffixes, cells)
        if not p.condition.range_of(i, p.n).is_point()
    }
    right = {
        j: p2.condition.range_of(j, p2.n)
        for j in _essential_vars(p2, suffixes, cells)
        if not p2.condition.range_of(j, p2.n).is_point()
    }
    groups: dict[tuple, tuple[list[int], list[int]]] = {}
    for i, r in left.items():
        groups.setdefault(_range_key(r), ([], []))[0].append(i)
    for j, r in right.items():
        groups.setdefault(_range_key(r), ([], []))[1].append(j)
    if not groups:
        return None
    comps = sorted(
        groups.values(),
        key=lambda g: (min(g[0]) if g[0] else p.n + 1, min(g[1]) if g[1] else -1),
    )
    if any(not ls or not rs for ls, rs in comps):
        return None
    edge_lists = [
        [(i, j) for i in sorted(ls) for j in sorted(rs)] for ls, rs in comps
    ]
    all_edges = [e for lst in edge_lists for e in lst]
    seeds = [
        RenamingEquation(p.n, p2.n, tuple(sorted(choice)))
        for choice in itertools.islice(itertools.product(*edge_lists), 256)
    ]
    seen = {r.pairs for r in seeds}
    frontier = [r for r in seeds if not _pair_zone(p, p2, r).empty]
    examined = 0
    while frontier:
        for ren in frontier:
            examined += 1
            if examined > _SEARCH_BUDGET:
                raise RuntimeError("renaming search exceeded its budget")
            if checker.check(ren):
                return ren
        grown: list[RenamingEquation] = []
        for ren in frontier:
            for e in all_edges:
                if e in ren.pairs:
                    continue
                nxt = ren.with_pair(*e)
                if nxt.pairs in seen:
                    continue
                seen.add(nxt.pairs)
                if not _pair_zone(p, p2, nxt).empty:
                    grown.append(nxt)
        frontier = grown
    return None


def _range_key(r: Range) -> tuple:
    return (r.lo, r.hi)
