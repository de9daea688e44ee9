"""Timed conditions: conjunctions of integer bounds on duration sums.

A timed condition over durations tau_0 .. tau_n constrains the cumulative
sums T(i, j) = tau_i + ... + tau_j.  The DBM basis is the suffix sums
y_i = T(i, n) plus a zero anchor: every T(i, j) is the difference
y_i - y_{j+1} (with y_{n+1} read as 0), so standard closure algorithms
apply.  DBM variable i+1 holds y_i; index 0 is the anchor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .dbm import DBM, Bound, ZERO_BOUND, bound_lt

# A one-sided bound on a sum: (value, strict).  As a lower bound it means
# "> value" when strict else ">= value"; None is unbounded.
SumBound = Optional[tuple[int, bool]]


@dataclass(frozen=True)
class Range:
    """Closed-form range of one T(i, j): lower and upper bounds."""

    lo: SumBound
    hi: SumBound

    def is_point(self) -> bool:
        return (
            self.lo is not None
            and self.hi is not None
            and not self.lo[1]
            and not self.hi[1]
            and self.lo[0] == self.hi[0]
        )

    def is_unit(self) -> bool:
        return (
            self.lo is not None
            and self.hi is not None
            and self.lo[1]
            and self.hi[1]
            and self.hi[0] == self.lo[0] + 1
        )

    def point_value(self) -> int:
        if not self.is_point():
            raise ValueError("range is not a point")
        assert self.lo is not None
        return self.lo[0]

    def render(self, name: str) -> str:
        if self.is_point():
            return f"{name} = {self.point_value()}"
        if self.lo is not None and self.hi is not None:
            lopen = "(" if self.lo[1] else "["
            ropen = ")" if self.hi[1] else "]"
            return f"{name} in {lopen}{self.lo[0]},{self.hi[0]}{ropen}"
        if self.hi is not None:
            return f"{name} {'<' if self.hi[1] else '<='} {self.hi[0]}"
        if self.lo is not None:
            return f"{name} {'>' if self.lo[1] else '>='} {self.lo[0]}"
        return f"{name} unbounded"


class EmptyCondition(ValueError):
    """Raised when an operation requires a satisfiable condition."""


class TimedCondition:
    """DBM-backed condition over tau_0 .. tau_n; canonical by construction."""

    __slots__ = ("n", "dbm")

    def __init__(self, n: int, dbm: DBM) -> None:
        if dbm.size != n + 2:
            raise ValueError("DBM size must be n + 2")
        self.n = n
        self.dbm = dbm

    # index of y_k in the DBM; y_{n+1} is the zero anchor
    def vidx(self, k: int) -> int:
        return k + 1 if k <= self.n else 0

    @classmethod
    def universal(cls, n: int) -> "TimedCondition":
        """All durations >= 0, nothing else."""
        d = DBM.universal(n + 1)
        out = cls(n, d)
        for i in range(n + 1):
            # tau_i >= 0  <=>  y_{i+1} - y_i <= 0
            d.constrain(out.vidx(i + 1), out.vidx(i), ZERO_BOUND)
        return out

    def copy(self) -> "TimedCondition":
        return TimedCondition(self.n, self.dbm.copy())

    def key(self) -> tuple:
        return (self.n, self.dbm.key())

    @property
    def is_empty(self) -> bool:
        return self.dbm.empty

    # -- constraint surface --------------------------------------------------

    def constrain_sum(self, i: int, j: int, op: str, d: int) -> "TimedCondition":
        """Conjoin T(i,j) <op> d in place; returns self for chaining."""
        a, b = self.vidx(i), self.vidx(j + 1)
        if op in ("<", "<="):
            self.dbm.constrain(a, b, (d, op == "<"))
        elif op in (">", ">="):
            self.dbm.constrain(b, a, (-d, op == ">"))
        elif op == "==":
            self.dbm.constrain(a, b, (d, False))
            self.dbm.constrain(b, a, (-d, False))
        else:
            raise ValueError(f"unknown operator {op!r}")
        return self

    def constrain_range(self, i: int, j: int, r: Range) -> "TimedCondition":
        a, b = self.vidx(i), self.vidx(j + 1)
        if r.hi is not None:
            self.dbm.constrain(a, b, r.hi)
        if r.lo is not None:
            self.dbm.constrain(b, a, (-r.lo[0], r.lo[1]))
        return self

    def range_of(self, i: int, j: int) -> Range:
        a, b = self.vidx(i), self.vidx(j + 1)
        hi = self.dbm.upper(a, b)
        lo_b = self.dbm.upper(b, a)
        lo: SumBound = None if lo_b is None else (-lo_b[0], lo_b[1])
        return Range(lo, hi)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for i in range(self.n + 1):
            for j in range(i, self.n + 1):
                yield (i, j)

    def all_ranges(self) -> dict[tuple[int, int], Range]:
        return {(i, j): self.range_of(i, j) for (i, j) in self.pairs()}

    # -- predicates ------------------------------------------------------------

    def is_simple(self) -> bool:
        if self.dbm.empty:
            return False
        for i, j in self.pairs():
            r = self.range_of(i, j)
            if not (r.is_point() or r.is_unit()):
                return False
        return True

    def is_bounded(self) -> bool:
        if self.dbm.empty:
            return True
        # nonneg durations make T(0,n) dominate every other sum
        return self.range_of(0, self.n).hi is not None

    def contains(self, durations: Sequence[Fraction]) -> bool:
        if len(durations) != self.n + 1:
            return False
        if any(d < 0 for d in durations):
            return False
        suffix: list[Fraction] = [Fraction(0)] * (self.n + 1)
        acc = Fraction(0)
        for i in range(self.n, -1, -1):
            acc += durations[i]
            suffix[i] = acc
        return self.dbm.contains(suffix)

    def same_zone(self, other: "TimedCondition") -> bool:
        return self.n == other.n and self.dbm.same_zone(other.dbm)

    def intersect(self, other: "TimedCondition") -> "TimedCondition":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return TimedCondition(self.n, self.dbm.intersect(other.dbm))

    def max_constant(self) -> int:
        """Largest |bound value| appearing in the canonical matrix."""
        best = 0
        for row in self.dbm.m:
            for b in row:
                if b is not None:
                    best = max(best, abs(b[0]))
        return best

    # -- concatenation ---------------------------------------------------------

    def embed_concat(self, other: "TimedCondition") -> "TimedCondition":
        """The joint condition of a concatenation, seam kept as two variables.

        The result ranges over (tau_0..tau_n, tau'_0..tau'_{n'}) with this
        condition on the first block and ``other`` on the second; cross
        sums T(i,n) + T'(0,j) are expressible in the joint basis.
        """
        n, np = self.n, other.n
        out = TimedCondition.universal(n + np + 1)
        # y_i of self = z_i - z_{n+1}: anchor re-bases onto z_{n+1}
        self_map = [out.vidx(n + 1)] + [out.vidx(i) for i in range(n + 1)]
        out.dbm.imprint(self.dbm, self_map)
        # y'_j of other = z_{n+1+j} - 0
        other_map = [0] + [out.vidx(n + 1 + j) for j in range(np + 1)]
        out.dbm.imprint(other.dbm, other_map)
        return out

    # -- prefixes ---------------------------------------------------------------

    def prefix_at(self, k: int) -> "TimedCondition":
        """Condition over tau_0..tau_k describing truncations after event k.

        A member is any prefix of a member of self with k events and a
        final dwell cut anywhere inside the original tau_k.
        """
        if not 0 <= k <= self.n:
            raise ValueError("prefix index out of range")
        # split tau_k = t + r by inserting a fresh suffix-sum variable
        ext = TimedCondition.universal(self.n + 1)
        old_map = [0] + [ext.vidx(i if i <= k else i + 1) for i in range(self.n + 1)]
        ext.dbm.imprint(self.dbm, old_map)
        if ext.dbm.empty:
            raise EmptyCondition("prefix of an empty condition")
        # re-base onto z_{k+1}: prefix sums are Y_i = z_i - z_{k+1}
        keep = [ext.vidx(k + 1)] + [ext.vidx(i) for i in range(k + 1)]
        m = [[ext.dbm.m[a][b] for b in keep] for a in keep]
        return TimedCondition(k, DBM(len(keep), m, ext.dbm.empty))

    # -- simple decomposition ----------------------------------------------------

    def enumerate_simple(self) -> list["TimedCondition"]:
        """Split into pairwise-disjoint simple cells, depth first.

        Branch order: pairs (i, j) lexicographic; per pair, point values
        before unit intervals, constants ascending.  Deterministic.
        """
        if self.dbm.empty:
            return []
        if not self.is_bounded():
            raise ValueError("cannot decompose an unbounded condition")
        pair_list = list(self.pairs())
        out: list[TimedCondition] = []

        def descend(cond: TimedCondition, idx: int) -> None:
            while idx < len(pair_list):
                i, j = pair_list[idx]
                r = cond.range_of(i, j)
                if r.is_point() or r.is_unit():
                    idx += 1
                    continue
                for cand in _branch_ranges(r):
                    child = cond.copy().constrain_range(i, j, cand)
                    if not child.dbm.empty:
                        descend(child, idx + 1)
                return
            out.append(cond)

        descend(self.copy(), 0)
        return out

    # -- rendering ----------------------------------------------------------------

    def render(self) -> str:
        if self.dbm.empty:
            return "false"
        parts = []
        for i, j in self.pairs():
            r = self.range_of(i, j)
            if r.lo == (0, False) and r.hi is None:
                continue  # the implicit nonnegativity default
            parts.append(r.render(f"T[{i},{j}]"))
        return " and ".join(parts) if parts else "true"

    def __repr__(self) -> str:
        return f"TimedCondition({self.render()!r})"


def _branch_ranges(r: Range) -> Iterator[Range]:
    """Point and unit sub-ranges of a non-simple integer range, in order."""
    if r.lo is None:
        raise ValueError("sum range lost its lower bound")
    if r.hi is None:
        raise ValueError("sum range is unbounded")
    lo_val = r.lo[0] + 1 if r.lo[1] else r.lo[0]
    hi_val = r.hi[0] - 1 if r.hi[1] else r.hi[0]
    first_unit = r.lo[0]  # (lo, lo+1) is feasible even when lo itself is not
    last_unit = r.hi[0] - 1
    for d in range(min(lo_val, first_unit), max(hi_val, last_unit) + 1):
        if lo_val <= d <= hi_val:
            yield Range((d, False), (d, False))
        if first_unit <= d <= last_unit:
            yield Range((d, True), (d + 1, True))


def sum_suffix(durations: Sequence[Fraction]) -> list[Fraction]:
    """Suffix sums y_i = tau_i + ... + tau_n of a duration vector."""
    out: list[Fraction] = []
    acc = Fraction(0)
    for d in reversed(durations):
        acc += d
        out.append(acc)
    out.reverse()
    return out
