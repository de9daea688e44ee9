"""Automaton synthesis from prefix rows and successor morphisms.

Rows are organized into time-elapse chains; each chain head becomes a
location and deeper positions are encoded purely by the clock values,
with per-cell box guards selecting the behaviour.  Clock i of a row
with n events tracks the suffix sum T(i, n).  Past the last cell of a
chain, the recorded morphism (target row plus sum equations) says how
runs continue: events fire either right where the run crossed out of
the chain, or after the image has walked down the target row's own
chain.  Updates that no copy or constant can realize make the affected
edge disappear rather than guess; such runs fall into the reject
region and later counterexamples repair the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .automata import (
    Edge,
    Guard,
    Interval,
    TimedAutomaton,
    _box_subtract,
    _box_to_guard,
    _interval_nonempty,
    _tighter_hi,
    _tighter_lo,
)
from .conditions import Range
from .congruence import RenamingEquation
from .dbm import DBM
from .elementary import (
    ElementaryLanguage,
    continuous_exterior,
    continuous_successor,
    discrete_successor,
)

# value of a virtual clock over the real ones: (base clock, offset);
# base -1 means a plain constant, None means unknown
_Expr = Optional[tuple[int, int]]


class IncompatibleMorphism(ValueError):
    """The recorded equations admit no clock-update realization."""


@dataclass(frozen=True)
class RecognizableSpec:
    """Finite presentation of a recognizable timed language.

    ``morphisms`` carries one (source, target, equations) triple per
    boundary language: the time exterior of each chain end and every
    event successor that is not itself a prefix row.
    """

    alphabet: tuple[str, ...]
    prefixes: tuple[ElementaryLanguage, ...]
    accepting: tuple[ElementaryLanguage, ...]
    morphisms: tuple[
        tuple[ElementaryLanguage, ElementaryLanguage, RenamingEquation], ...
    ]


def build_dta(spec: RecognizableSpec) -> TimedAutomaton:
    """Deterministic automaton reproducing the presented language."""
    return _Assembler(spec).build()


def _interval(r: Range) -> Interval:
    return ((0, False) if r.lo is None else r.lo, r.hi)


def _box_of(row: ElementaryLanguage) -> list[Interval]:
    n = row.n
    return [_interval(row.condition.range_of(i, n)) for i in range(n + 1)]


def _box_intersect(
    a: Sequence[Interval], b: Sequence[Interval]
) -> Optional[list[Interval]]:
    out: list[Interval] = []
    for (alo, ahi), (blo, bhi) in zip(a, b):
        lo, hi = _tighter_lo(alo, blo), _tighter_hi(ahi, bhi)
        if not _interval_nonempty(lo, hi):
            return None
        out.append((lo, hi))
    return out


def _box_hull(boxes: Sequence[Sequence[Interval]]) -> list[Interval]:
    """Loosest box around all of them; disagreeing uppers fall away."""
    out: list[Interval] = []
    for column in zip(*boxes):
        lo = min((b[0] for b in column), key=lambda b: (b[0], b[1]))
        his = {b[1] for b in column}
        out.append((lo, his.pop() if len(his) == 1 else None))
    return out


def _ren_source(ren: RenamingEquation, j: int) -> Optional[int]:
    for i, jj in ren.pairs:
        if jj == j:
            return i
    return None


class _Assembler:
    def __init__(self, spec: RecognizableSpec) -> None:
        self.spec = spec
        self.rows = list(spec.prefixes)
        self.index = {r.key(): pos for pos, r in enumerate(self.rows)}
        if len(self.index) != len(self.rows):
            raise ValueError("duplicate prefix rows")
        seed_key = ElementaryLanguage.seed().key()
        if seed_key not in self.index:
            raise ValueError("prefix rows must contain the zero-dwell seed")
        self.initial = self.index[seed_key]
        self.accepting: set[int] = set()
        for r in spec.accepting:
            if r.key() not in self.index:
                raise ValueError("accepting row is not a prefix row")
            self.accepting.add(self.index[r.key()])
        self.tuples = {src.key(): (tgt, ren) for src, tgt, ren in spec.morphisms}
        for _, tgt, _ in spec.morphisms:
            if tgt.key() not in self.index:
                raise ValueError("morphism target is not a prefix row")
        self._chains()
        self.edges: list[Edge] = []

    def _chains(self) -> None:
        succ_of: dict[int, Optional[int]] = {}
        image: set[int] = set()
        for pos, r in enumerate(self.rows):
            nxt = self.index.get(continuous_successor(r).key())
            succ_of[pos] = nxt
            if nxt is not None:
                image.add(nxt)
        self.heads = [p for p in range(len(self.rows)) if p not in image]
        self.chain: dict[int, list[int]] = {}
        self.head_of: dict[int, int] = {}
        for h in self.heads:
            walk = [h]
            seen = {h}
            cur = h
            while (nxt := succ_of[cur]) is not None and nxt not in seen:
                walk.append(nxt)
                seen.add(nxt)
                cur = nxt
            self.chain[h] = walk
            for pos in walk:
                self.head_of.setdefault(pos, h)
        if len(self.head_of) != len(self.rows):
            raise ValueError("time-successor cycle among prefix rows")
        for h in self.heads:
            flags = {pos in self.accepting for pos in self.chain[h]}
            if len(flags) > 1:
                raise IncompatibleMorphism(
                    "acceptance changes along a time-elapse chain"
                )

    def _tuple_for(self, src: ElementaryLanguage):
        hit = self.tuples.get(src.key())
        if hit is None:
            raise IncompatibleMorphism(f"no morphism covers {src!r}")
        return hit

    def build(self) -> TimedAutomaton:
        for h in self.heads:
            for pos in self.chain[h]:
                self._emit_cell_events(h, pos)
            self._emit_beyond(h)
        width = max(r.n for r in self.rows) + 1
        auto = TimedAutomaton(
            alphabet=tuple(self.spec.alphabet),
            locations=tuple(f"l{i}" for i in range(len(self.rows))),
            initial=self.initial,
            accepting=frozenset(self.accepting),
            clocks=tuple(f"c{i}" for i in range(width)),
            edges=tuple(self.edges),
        )
        auto.validate_deterministic()
        return auto

    # --- events fired from a cell of the chain itself ---

    def _emit_cell_events(self, head: int, pos: int) -> None:
        row = self.rows[pos]
        guard = _box_to_guard(_box_of(row))
        for a in self.spec.alphabet:
            q = discrete_successor(row, a)
            tpos = self.index.get(q.key())
            if tpos is not None:
                ups = ((q.n, "const", 0),)
                self.edges.append(Edge(head, a, guard, ups, self.head_of[tpos]))
                continue
            tgt, ren = self._tuple_for(q)
            ups = self._landing_updates(q, tgt, ren)
            self.edges.append(
                Edge(head, a, guard, ups, self.head_of[self.index[tgt.key()]])
            )

    def _landing_updates(
        self,
        q: ElementaryLanguage,
        tgt: ElementaryLanguage,
        ren: RenamingEquation,
    ) -> tuple:
        """Clock updates realizing the morphism right after an event.

        The source sums of q are the current clocks, except the appended
        T(q.n, q.n) which is the fresh zero.  Unmatched target clocks
        need a constant or an affine copy that keeps the assignment
        total over the whole source cell; choices interact through the
        target cell's own constraints, so this searches with backtracking.
        """
        chosen: dict[int, tuple] = {}
        todo: list[int] = []
        for j in range(tgt.n + 1):
            i = _ren_source(ren, j)
            if i is not None:
                chosen[j] = ("const", 0) if i == q.n else ("copy", i)
                continue
            pin = tgt.condition.range_of(j, tgt.n)
            if pin.is_point():
                chosen[j] = ("const", pin.point_value())
                continue
            todo.append(j)
        if not self._search_updates(q, tgt, ren, chosen, todo):
            raise IncompatibleMorphism(
                f"no update realizes clocks {todo} of {tgt!r} from {q!r}"
            )
        return tuple((j, k, v) for j, (k, v) in sorted(chosen.items()))

    def _search_updates(self, q, tgt, ren, chosen, todo) -> bool:
        if not todo:
            return True
        j, rest = todo[0], todo[1:]
        for cand in self._candidates(q, tgt, ren, chosen, j):
            chosen[j] = cand
            if self._assignment_total(q, tgt, ren, chosen) and \
                    self._search_updates(q, tgt, ren, chosen, rest):
                return True
            del chosen[j]
        return False

    def _candidates(self, q, tgt, ren, chosen, j) -> list[tuple]:
        """Plausible updates for a coordinate the equations leave open.

        The joint zone of source and target cells under the choices so
        far bounds the still-feasible values of the coordinate, both
        absolutely and relative to each source clock.  Integer points
        of those ranges come first so guards and updates stay integral
        where possible; interval midpoints cover the open ranges.
        """
        n = q.n
        z, src, dst, den = self._joint_zone(q, tgt, ren, chosen)
        if z.empty:
            return []
        tj = dst[1 + j]
        ints: list[tuple] = []
        mids: list[tuple] = []
        for i in range(n + 1):
            si = src[1 + i] if i < n else 0
            hi = z.m[tj][si]
            lo = z.m[si][tj]
            if hi is None or lo is None:
                continue
            hi_v, hi_s = Fraction(hi[0], den), hi[1]
            lo_v, lo_s = Fraction(-lo[0], den), lo[1]

            def form(d, i=i):
                if i == n:
                    return ("const", d)
                return ("copy", i) if d == 0 else ("shift", (i, d))

            first = math.ceil(lo_v) + (1 if lo_s and lo_v.denominator == 1 else 0)
            top = math.floor(hi_v) - (1 if hi_s and hi_v.denominator == 1 else 0)
            ints.extend(form(d) for d in range(first, min(top, first + 16) + 1))
            if lo_v < hi_v:
                mids.append(form((lo_v + hi_v) / 2))
            elif lo_v == hi_v and lo_v.denominator > 1:
                # range pinched to a fractional point: it is the one choice
                mids.append(form(lo_v))
        return ints + mids

    def _joint_zone(self, q, tgt, ren, assigns):
        """Source and target cells side by side, equations applied."""
        den = 1
        for kind, val in assigns.values():
            if kind == "const":
                den = math.lcm(den, Fraction(val).denominator)
            elif kind == "shift":
                den = math.lcm(den, Fraction(val[1]).denominator)
        n, m = q.n, tgt.n
        z = DBM.universal(n + m + 2)
        src = [0] + [1 + i for i in range(n + 1)]
        dst = [0] + [n + 2 + j for j in range(m + 1)]
        z.imprint(q.condition.dbm.scaled(den), src)
        z.imprint(tgt.condition.dbm.scaled(den), dst)
        for i, j in ren.pairs:
            a = src[1 + i] if i <= n else 0
            z.constrain(a, dst[1 + j], (0, False))
            z.constrain(dst[1 + j], a, (0, False))
        for j, (kind, val) in assigns.items():
            tj = dst[1 + j]
            if kind == "copy":
                z.constrain(tj, src[1 + val], (0, False))
                z.constrain(src[1 + val], tj, (0, False))
            elif kind == "shift":
                s, d = val
                sd = int(Fraction(d) * den)
                z.constrain(tj, src[1 + s], (sd, False))
                z.constrain(src[1 + s], tj, (-sd, False))
            else:
                sv = int(Fraction(val) * den)
                z.constrain(tj, 0, (sv, False))
                z.constrain(0, tj, (-sv, False))
        return z, src, dst, den

    def _assignment_total(self, q, tgt, ren, assigns) -> bool:
        """Does the update graph cover every point of the source cell?"""
        z, src, dst, den = self._joint_zone(q, tgt, ren, assigns)
        if z.empty:
            return False
        proj = z.project(src)
        full = DBM.universal(q.n + 1)
        full.imprint(q.condition.dbm.scaled(den), list(range(q.n + 2)))
        return proj.same_zone(full)

    # --- events fired after the run left the chain ---

    def _emit_beyond(self, head: int) -> None:
        """Cover the unbounded region past the chain with event edges.

        The morphism rewrites a run as often as it crosses out of a
        prefix row, so the image of a long dwell walks through a whole
        sequence of exterior hops.  We follow that walk band by band;
        each hop keeps expressions for the image coordinates in terms
        of the real clocks.  The walk visits finitely many links, hence
        eventually repeats; once two consecutive periods emit the very
        same actions, a single edge with the upper bounds dropped
        covers the rest of the time axis.
        """
        em = self.rows[self.chain[head][-1]]
        n = em.n
        nxt = continuous_successor(em)
        ext = continuous_exterior(em)
        if ext.condition.is_empty:
            raise IncompatibleMorphism(f"empty time exterior after {em!r}")
        remaining = [[(lo, None) for lo, _ in _box_of(nxt)]]
        exprs: list[_Expr] = [(i, 0) for i in range(n + 1)]
        history: list[tuple[tuple, tuple, dict]] = []
        for _ in range(3 * len(self.tuples) + 4):
            tgt, ren = self._tuple_for(ext)
            at_event, walk = self._hop_exprs(em, nxt, tgt, ren, exprs)
            seg: list[tuple] = []
            bands: dict[int, list[Interval]] = {}
            band = self._transfer(_box_of(ext), exprs, n)
            remaining = self._emit_band(
                head, band, remaining, tgt, at_event, 0, seg, bands
            )
            if walk is None:
                return
            tpos = self.index[tgt.key()]
            tchain = self.chain[self.head_of[tpos]]
            for slot, vpos in enumerate(tchain[tchain.index(tpos) :], start=1):
                vrow = self.rows[vpos]
                band = self._transfer(_box_of(vrow), walk, n)
                remaining = self._emit_band(
                    head, band, remaining, vrow, walk, slot, seg, bands
                )
            history.append((ext.key(), tuple(sorted(seg)), bands))
            if self._try_merge(head, history, remaining):
                return
            em = self.rows[tchain[-1]]
            nxt = continuous_successor(em)
            ext = continuous_exterior(em)
            if ext.condition.is_empty:
                return
            exprs = walk

    def _hop_exprs(self, em, nxt, tgt, ren, prev):
        """Expressions for the image after one more exterior crossing.

        ``at_event`` is valid while the image still sits in the target
        cell; ``walk`` stays valid under further dwell by anchoring on
        a coordinate whose value at the crossing instant is pinned by
        the cell being left or the one being entered.
        """
        anchor = None
        for row in (em, nxt):
            for i in range(row.n + 1):
                r = row.condition.range_of(i, row.n)
                if r.is_point() and prev[i] is not None and prev[i][0] >= 0:
                    b, o = prev[i]
                    anchor = (b, r.point_value() - o)
                    break
            if anchor is not None:
                break
        at_event: list[_Expr] = []
        walk: Optional[list[_Expr]] = [] if anchor is not None else None
        for j in range(tgt.n + 1):
            i = _ren_source(ren, j)
            if i is not None:
                at_event.append(prev[i])
                if walk is not None:
                    walk.append(prev[i])
                continue
            pin = tgt.condition.range_of(j, tgt.n)
            if pin.is_point():
                p = pin.point_value()
                at_event.append((-1, p))
                if walk is not None:
                    walk.append((anchor[0], p - anchor[1]))
            else:
                at_event.append(None)
                if walk is not None:
                    walk.append(None)
        return at_event, walk

    def _emit_band(
        self, head, band, remaining, vrow, exprs, slot, seg, bands
    ) -> list:
        """Emit the band's uncovered pieces; log actions for the cycle check."""
        if band is None:
            return remaining
        for e, tloc, ups in self._virtual_actions(vrow, exprs, band):
            bands[slot] = band
            seg.append((slot, e, tloc, ups))
        out: list[list[Interval]] = []
        for r in remaining:
            piece = _box_intersect(band, r)
            if piece is not None:
                guard = _box_to_guard(piece)
                for e, tloc, ups in self._virtual_actions(vrow, exprs, piece):
                    self.edges.append(Edge(head, e, guard, ups, tloc))
            out.extend(_box_subtract(r, band))
        return out

    def _try_merge(self, head, history, remaining) -> bool:
        """Close the walk when its last two periods agree verbatim."""
        fp = [(key, seg) for key, seg, _ in history]
        for p in range(1, len(history) // 2 + 1):
            if fp[-p:] != fp[-2 * p : -p]:
                continue
            by_event: dict[str, set] = {}
            slots: dict[str, set[int]] = {}
            for _, seg, _ in history[-p:]:
                for slot, e, tloc, ups in seg:
                    by_event.setdefault(e, set()).add((tloc, ups))
                    slots.setdefault(e, set()).add(slot)
            for e, acts in by_event.items():
                if len(acts) != 1:
                    continue
                tloc, ups = next(iter(acts))
                boxes = [
                    b[s]
                    for _, _, b in history[-2 * p :]
                    for s in slots[e]
                    if s in b
                ]
                hull = _box_hull(boxes)
                for r in remaining:
                    piece = _box_intersect(hull, r)
                    if piece is not None:
                        self.edges.append(
                            Edge(head, e, _box_to_guard(piece), ups, tloc)
                        )
            return True
        return False

    def _transfer(
        self, vbox: Sequence[Interval], exprs: Sequence[_Expr], n: int
    ) -> Optional[list[Interval]]:
        """Pull a virtual box back through the expressions.

        Returns None when a non-trivial bound lands on an unknown or
        purely constant coordinate that violates it; boxes that come
        back empty also yield None.
        """
        acc: list[Interval] = [((0, False), None)] * (n + 1)
        for j, (lo, hi) in enumerate(vbox):
            trivial = lo == (0, False) and hi is None
            ex = exprs[j]
            if ex is None:
                if trivial:
                    continue
                return None
            base, off = ex
            if base < 0:
                v = off
                sat_lo = v > lo[0] if lo[1] else v >= lo[0]
                sat_hi = hi is None or (v < hi[0] if hi[1] else v <= hi[0])
                if sat_lo and sat_hi:
                    continue
                return None
            lo2 = (lo[0] - off, lo[1])
            if lo2[0] < 0:
                lo2 = (0, False)
            hi2 = None if hi is None else (hi[0] - off, hi[1])
            cur_lo, cur_hi = acc[base]
            merged = (_tighter_lo(cur_lo, lo2), _tighter_hi(cur_hi, hi2))
            if not _interval_nonempty(*merged):
                return None
            acc[base] = merged
        return acc

    def _virtual_actions(
        self,
        vrow: ElementaryLanguage,
        exprs: Sequence[_Expr],
        region: list[Interval],
    ) -> list[tuple[str, int, tuple]]:
        """Event actions for runs whose image sits in a virtual row cell."""
        acts: list[tuple[str, int, tuple]] = []
        for a in self.spec.alphabet:
            s2 = discrete_successor(vrow, a)
            pos2 = self.index.get(s2.key())
            if pos2 is not None:
                ups = []
                ok = True
                for j in range(vrow.n + 1):
                    r = self._resolve(exprs[j], region)
                    if r is None:
                        ok = False
                        break
                    ups.append((j, *r))
                if ok:
                    ups.append((vrow.n + 1, "const", 0))
                    acts.append((a, self.head_of[pos2], tuple(ups)))
                continue
            tgt2, ren2 = self._tuple_for(s2)
            ups = []
            ok = True
            for j2 in range(tgt2.n + 1):
                i2 = _ren_source(ren2, j2)
                if i2 is not None:
                    if i2 == vrow.n + 1:
                        ups.append((j2, "const", 0))
                        continue
                    r = self._resolve(exprs[i2], region)
                    if r is None:
                        ok = False
                        break
                    ups.append((j2, *r))
                    continue
                pin = tgt2.condition.range_of(j2, tgt2.n)
                if pin.is_point():
                    ups.append((j2, "const", pin.point_value()))
                    continue
                ok = False
                break
            if ok:
                acts.append(
                    (a, self.head_of[self.index[tgt2.key()]], tuple(ups))
                )
        return acts

    def _resolve(
        self, ex: _Expr, region: list[Interval]
    ) -> Optional[tuple[str, object]]:
        if ex is None:
            return None
        base, off = ex
        if base < 0:
            return ("const", off)
        if off == 0:
            return ("copy", base)
        lo, hi = region[base]
        if hi is not None and not lo[1] and not hi[1] and lo[0] == hi[0]:
            return ("const", lo[0] + off)
        return ("shift", (base, off))
