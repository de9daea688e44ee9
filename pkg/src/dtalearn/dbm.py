"""Difference bound matrices (DBMs) with integer constants.

A DBM over variables x_1 .. x_k keeps, for every ordered pair (i, j), an
upper bound on x_i - x_j.  Index 0 is the constant zero, so row/column 0
encodes absolute bounds.  A bound is a ``(value, strict)`` pair; ``None``
means unbounded.  Every constraint constant in this package is an integer,
so bound values stay ``int`` and all comparisons are exact.

Matrices are kept canonical (closure-tight) as an invariant: build zones
with :meth:`DBM.universal` plus :meth:`DBM.constrain`, which re-tightens
incrementally in O(k^2) per call.  Emptiness shows up as a negative
diagonal entry and is cached in :attr:`DBM.empty`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

# (value, strict); None encodes +infinity.
Bound = Optional[tuple[int, bool]]

ZERO_BOUND: Bound = (0, False)


def bound_lt(a: Bound, b: Bound) -> bool:
    """True iff upper bound ``a`` is strictly tighter than ``b``."""
    if a is None:
        return False
    if b is None:
        return True
    return a[0] < b[0] or (a[0] == b[0] and a[1] and not b[1])


def bound_min(a: Bound, b: Bound) -> Bound:
    return a if bound_lt(a, b) else b


def bound_add(a: Bound, b: Bound) -> Bound:
    if a is None or b is None:
        return None
    return (a[0] + b[0], a[1] or b[1])


def bound_neg(a: Bound) -> Bound:
    """The complement of ``x - y <= v`` (or ``< v``) as a bound on y - x."""
    if a is None:
        raise ValueError("cannot negate an infinite bound")
    return (-a[0], not a[1])


def bound_sat(value: Fraction, b: Bound) -> bool:
    """Does ``value`` satisfy the upper bound ``b``?"""
    if b is None:
        return True
    return value < b[0] if b[1] else value <= b[0]


class DBM:
    """A canonical difference bound matrix.

    ``m[i][j]`` bounds x_i - x_j from above; x_0 is the constant 0.
    """

    __slots__ = ("size", "m", "empty")

    def __init__(self, size: int, m: list[list[Bound]], empty: bool) -> None:
        self.size = size
        self.m = m
        self.empty = empty

    @classmethod
    def universal(cls, num_vars: int) -> "DBM":
        size = num_vars + 1
        m: list[list[Bound]] = [
            [ZERO_BOUND if i == j else None for j in range(size)] for i in range(size)
        ]
        return cls(size, m, False)

    def copy(self) -> "DBM":
        return DBM(self.size, [row[:] for row in self.m], self.empty)

    def scaled(self, k: int) -> "DBM":
        """The zone stretched by factor k > 0 (bounds multiply, strictness kept)."""
        if k == 1:
            return self.copy()
        m = [
            [b if b is None else (b[0] * k, b[1]) for b in row]
            for row in self.m
        ]
        return DBM(self.size, m, self.empty)

    def key(self) -> tuple:
        """Hashable snapshot; empty zones all collapse to one key."""
        if self.empty:
            return (self.size, "empty")
        return tuple(tuple(row) for row in self.m)

    # -- construction ------------------------------------------------------

    def constrain(self, i: int, j: int, b: Bound) -> None:
        """Add x_i - x_j <= b (or < b) and re-tighten incrementally."""
        if self.empty or b is None:
            return
        m = self.m
        if not bound_lt(b, m[i][j]):
            return
        bv, bs = b
        # Adding one edge to a closed graph: paths through (i, j) only.
        for a in range(self.size):
            ai = m[a][i]
            if ai is None:
                continue
            lv = ai[0] + bv
            ls = ai[1] or bs
            row_a = m[a]
            row_j = m[j]
            for c in range(self.size):
                jc = row_j[c]
                if jc is None:
                    continue
                cv = lv + jc[0]
                cs = ls or jc[1]
                old = row_a[c]
                if old is None or cv < old[0] or (cv == old[0] and cs and not old[1]):
                    row_a[c] = (cv, cs)
        for a in range(self.size):
            if bound_lt(m[a][a], ZERO_BOUND):
                self.empty = True
                return

    def canonicalize(self) -> None:
        """Full Floyd-Warshall closure; for matrices edited directly."""
        m = self.m
        n = self.size
        for k in range(n):
            row_k = m[k]
            for i in range(n):
                ik = m[i][k]
                if ik is None:
                    continue
                iv, istrict = ik
                row_i = m[i]
                for j in range(n):
                    kj = row_k[j]
                    if kj is None:
                        continue
                    cv = iv + kj[0]
                    cs = istrict or kj[1]
                    old = row_i[j]
                    if old is None or cv < old[0] or (cv == old[0] and cs and not old[1]):
                        row_i[j] = (cv, cs)
        for i in range(n):
            if bound_lt(m[i][i], ZERO_BOUND):
                self.empty = True
                return

    def imprint(self, other: "DBM", index_map: Sequence[int]) -> None:
        """Conjoin ``other``'s constraints, with its var v at index_map[v] here.

        index_map[0] gives the anchor that plays ``other``'s zero, so a
        zone can be re-based onto a variable of the larger space.
        """
        if other.empty:
            self.empty = True
            return
        if self.empty:
            return
        m = self.m
        changed = False
        for i in range(other.size):
            mi = index_map[i]
            row = other.m[i]
            for j in range(other.size):
                if i == j:
                    continue
                b = row[j]
                if b is None:
                    continue
                mj = index_map[j]
                if mi == mj:
                    if b[0] < 0 or (b[0] == 0 and b[1]):
                        self.empty = True
                        return
                    continue
                if bound_lt(b, m[mi][mj]):
                    m[mi][mj] = b
                    changed = True
        if changed:
            self.canonicalize()

    # -- queries -----------------------------------------------------------

    def upper(self, i: int, j: int) -> Bound:
        """Tightest upper bound on x_i - x_j."""
        return self.m[i][j]

    def pinned(self, i: int, j: int) -> Optional[int]:
        """The integer d with x_i - x_j = d, if the difference is a point."""
        up = self.m[i][j]
        lo = self.m[j][i]
        if up is not None and lo is not None and not up[1] and not lo[1] and up[0] == -lo[0]:
            return up[0]
        return None

    def contains(self, values: Sequence[Fraction]) -> bool:
        """Point membership; ``values`` covers x_1..x_{size-1}."""
        if self.empty:
            return False
        vals = [Fraction(0), *values]
        for i in range(self.size):
            for j in range(self.size):
                if i != j and not bound_sat(vals[i] - vals[j], self.m[i][j]):
                    return False
        return True

    def includes(self, other: "DBM") -> bool:
        """Zone inclusion other subseteq self; both canonical."""
        if other.empty:
            return True
        if self.empty:
            return False
        for i in range(self.size):
            for j in range(self.size):
                if bound_lt(self.m[i][j], other.m[i][j]):
                    return False
        return True

    def same_zone(self, other: "DBM") -> bool:
        if self.empty or other.empty:
            return self.empty and other.empty
        return self.m == other.m

    # -- set operations ----------------------------------------------------

    def intersect(self, other: "DBM") -> "DBM":
        out = self.copy()
        out.imprint(other, list(range(self.size)))
        return out

    def subtract(self, other: "DBM") -> list["DBM"]:
        """self minus other as a disjoint list of canonical zones."""
        if self.empty:
            return []
        if other.empty:
            return [self.copy()]
        pieces: list[DBM] = []
        cur = self.copy()  # self with the already-processed constraints asserted
        for i in range(self.size):
            for j in range(self.size):
                if i == j:
                    continue
                b = other.m[i][j]
                if b is None:
                    continue
                nb = bound_neg(b)
                # the piece closes the cycle j -> i -> j; skip it when that
                # cycle is already negative, i.e. the piece must be empty
                if not bound_lt(bound_add(nb, cur.m[i][j]), ZERO_BOUND):
                    piece = cur.copy()
                    piece.constrain(j, i, nb)
                    if not piece.empty:
                        pieces.append(piece)
                cur.constrain(i, j, b)
                if cur.empty:
                    return pieces
                if cur.empty:
                    return pieces
        return pieces

    def covered_by(self, others: Iterable["DBM"]) -> bool:
        """Is self a subset of the union of ``others``?"""
        if self.empty:
            return True
        pool = [o for o in others if not o.empty]
        if any(o.includes(self) for o in pool):
            return True
        pieces = [self]
        for o in pool:
            pieces = [q for p in pieces for q in p.subtract(o)]
            if not pieces:
                return True
        return not pieces

    # -- structural edits ---------------------------------------------------

    def project(self, keep: Sequence[int]) -> "DBM":
        """Existentially project onto variables ``keep`` (must start with 0)."""
        if keep[0] != 0:
            raise ValueError("projection must keep the zero column")
        m = [[self.m[i][j] for j in keep] for i in keep]
        return DBM(len(keep), m, self.empty)

    def extended(self, extra: int) -> "DBM":
        """Append ``extra`` unconstrained variables; stays canonical."""
        size = self.size + extra
        m: list[list[Bound]] = []
        for i in range(self.size):
            m.append(self.m[i] + [None] * extra)
        for i in range(self.size, size):
            row: list[Bound] = [None] * size
            row[i] = ZERO_BOUND
            m.append(row)
        return DBM(size, m, self.empty)

    def delay(self) -> "DBM":
        """Remove upper bounds on all variables (time elapse); stays canonical."""
        out = self.copy()
        if out.empty:
            return out
        for i in range(1, out.size):
            out.m[i][0] = None
        return out

    def extrapolate(self, max_consts: Sequence[int]) -> "DBM":
        """Classic maximum-constant extrapolation; exact for diagonal-free TAs.

        ``max_consts[i]`` is the largest constant compared against x_i
        (index 0 unused).  Bounds above the constant are dropped; lower
        bounds below the negated constant are relaxed to it.
        """
        if self.empty:
            return self.copy()
        out = self.copy()
        m = out.m
        for i in range(self.size):
            ki = max_consts[i] if i > 0 else 0
            for j in range(self.size):
                if i == j:
                    continue
                kj = max_consts[j] if j > 0 else 0
                b = m[i][j]
                if b is not None and b[0] > ki:
                    m[i][j] = None
                elif b is not None and -b[0] > kj:
                    m[i][j] = (-kj, True)
        out.canonicalize()
        return out

    # -- concretization ------------------------------------------------------

    def sample_point(self) -> list[Fraction]:
        """A deterministic member of a nonempty zone.

        Variables are fixed in index order, each to the least value the
        already-fixed ones allow, preferring small denominators when the
        infimum is open.  Greedy choice is safe because the matrix is
        canonical.
        """
        if self.empty:
            raise ValueError("cannot sample an empty zone")
        vals: list[Fraction] = [Fraction(0)]
        for i in range(1, self.size):
            lo_val: Optional[Fraction] = None
            lo_strict = False
            hi_val: Optional[Fraction] = None
            hi_strict = False
            for j in range(len(vals)):
                up = self.m[i][j]  # x_i <= vals[j] + up
                if up is not None:
                    v = vals[j] + up[0]
                    if hi_val is None or v < hi_val or (v == hi_val and up[1]):
                        hi_val, hi_strict = v, up[1]
                dn = self.m[j][i]  # x_i >= vals[j] - dn
                if dn is not None:
                    v = vals[j] - dn[0]
                    if lo_val is None or v > lo_val or (v == lo_val and dn[1]):
                        lo_val, lo_strict = v, dn[1]
            vals.append(_least_in_interval(lo_val, lo_strict, hi_val, hi_strict))
        return vals[1:]


def _least_in_interval(
    lo: Optional[Fraction],
    lo_strict: bool,
    hi: Optional[Fraction],
    hi_strict: bool,
) -> Fraction:
    """Smallest-denominator-biased least rational in the interval."""
    if lo is None:
        if hi is None or hi > 0:
            lo, lo_strict = Fraction(0), False
        else:
            lo, lo_strict = hi - 1, False
    if not lo_strict:
        return lo
    if hi is None:
        hi, hi_strict = lo + 1, False
    # least k/q with lo < k/q and k/q (<|<=) hi, trying denominators upward
    q = 1
    while True:
        k = (lo * q).__floor__() + 1
        v = Fraction(k, q)
        if v < hi or (v == hi and not hi_strict):
            return v
        q += 1
