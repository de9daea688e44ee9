"""Active learning loop over an observation table of prefix rows.

The table keeps a prefix-closed list P of simple rows and a list S of
suffix languages.  A row is summarized by its accepted cells per
suffix; rows are compared up to a renaming of suffix sums.  The loop
repairs the table until it is cohesive, synthesizes a hypothesis, and
folds any counterexample back into a new suffix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .automata import TimedAutomaton, simulate, simplify
from .conditions import TimedCondition
from .congruence import RenamingEquation, check_pair, find_renaming
from .construct import RecognizableSpec, build_dta
from .elementary import (
    ElementaryLanguage,
    continuous_exterior,
    continuous_successor,
    discrete_successor,
    simple_cell_of,
    witness_matching,
)
from .teacher import SymbolicMembership, Teacher
from .words import TimedWord, format_word

log = logging.getLogger("dtalearn")

_MAX_ROWS = 400
_MAX_REPAIRS = 2000
_MAX_REPLAYS = 500


@dataclass(frozen=True)
class CohesionReport:
    """Outcome of a table scan; ``kind`` is one of cohesive, closed,
    inconsistent, exterior or time_saturation, with the offending rows."""

    kind: str
    row: Optional[ElementaryLanguage] = None
    row2: Optional[ElementaryLanguage] = None
    event: Optional[str] = None


class TimedObservationTable:
    def __init__(self, teacher: Teacher, time_saturation: bool = True) -> None:
        self.teacher = teacher
        self.alphabet = tuple(sorted(teacher.alphabet))
        self.time_saturation = time_saturation
        self.rows: list[ElementaryLanguage] = [ElementaryLanguage.seed()]
        self.suffixes: list[ElementaryLanguage] = [ElementaryLanguage.seed()]
        # renaming witness per successor row, filled by cohesion scans
        self.links: dict[tuple, tuple[ElementaryLanguage, RenamingEquation]] = {}
        self._pair_cache: dict[tuple, Optional[RenamingEquation]] = {}
        self._stale_hint: dict[tuple, RenamingEquation] = {}
        self.last_spec: Optional[RecognizableSpec] = None

    # --- cells ---

    def cell(
        self, row: ElementaryLanguage, s: ElementaryLanguage
    ) -> SymbolicMembership:
        return self.teacher.symbolic_membership(row, s)

    def cells(self, row: ElementaryLanguage, s: ElementaryLanguage):
        return self.cell(row, s).cells

    # --- structure ---

    def row_keys(self) -> set[tuple]:
        return {p.key() for p in self.rows}

    def successors(self) -> list[ElementaryLanguage]:
        """Boundary rows in scan order: time successor first, then the
        event successors per row, deduplicated."""
        seen = self.row_keys()
        out: list[ElementaryLanguage] = []
        for p in self.rows:
            for q in [continuous_successor(p)] + [
                discrete_successor(p, a) for a in self.alphabet
            ]:
                if q.key() not in seen:
                    seen.add(q.key())
                    out.append(q)
        return out

    def renaming_between(
        self, p: ElementaryLanguage, p2: ElementaryLanguage
    ) -> Optional[RenamingEquation]:
        key = (p.key(), p2.key())
        if key not in self._pair_cache:
            self._pair_cache[key] = find_renaming(
                p, p2, self.suffixes, self.cells
            )
        return self._pair_cache[key]

    def add_suffix(self, s: ElementaryLanguage) -> None:
        self.suffixes.append(s)
        self._pair_cache.clear()

    def add_row(self, p: ElementaryLanguage) -> None:
        if p.key() not in self.row_keys():
            self.rows.append(p)
            if len(self.rows) > _MAX_ROWS:
                raise RuntimeError("row budget exhausted")


def check_cohesion(table: TimedObservationTable) -> CohesionReport:
    """First defect of the table, refreshing the successor links.

    Scan order: closedness, event consistency, exterior consistency,
    then time saturation (when enabled).
    """
    for q in table.successors():
        hit = None
        for p2 in table.rows:
            ren = table.renaming_between(q, p2)
            if ren is not None:
                hit = (p2, ren)
                break
        if hit is None:
            return CohesionReport("closed", row=q)
        table.links[q.key()] = hit

    for x, p in enumerate(table.rows):
        for p2 in table.rows[x + 1 :]:
            if table.renaming_between(p, p2) is None:
                continue
            for a in table.alphabet:
                qa, qa2 = discrete_successor(p, a), discrete_successor(p2, a)
                if table.renaming_between(qa, qa2) is None:
                    return CohesionReport("inconsistent", row=p, row2=p2, event=a)

    keys = table.row_keys()
    for p in table.rows:
        nxt = continuous_successor(p)
        if nxt.key() in keys:
            continue
        ext = continuous_exterior(p)
        if ext.condition.is_empty or not ext.condition.dbm.includes(
            nxt.condition.dbm
        ):
            return CohesionReport("exterior", row=p)

    if table.time_saturation:
        top = None
        for p in table.rows:
            nxt = continuous_successor(p)
            if nxt.key() in keys:
                continue
            top = RenamingEquation(p.n, nxt.n)
            if not check_pair(p, nxt, table.suffixes, top, table.cells):
                return CohesionReport("time_saturation", row=p)

    return CohesionReport("cohesive")


def repair(table: TimedObservationTable, report: CohesionReport) -> None:
    """Grow the table to remove the reported defect."""
    if report.kind == "closed":
        table.add_row(report.row)
    elif report.kind == "inconsistent":
        _repair_inconsistency(table, report)
    elif report.kind == "exterior":
        keys = table.row_keys()
        grown = []
        for p in table.rows:
            nxt = continuous_successor(p)
            if nxt.key() in keys:
                continue
            ext = continuous_exterior(p)
            if ext.condition.is_empty or not ext.condition.dbm.includes(
                nxt.condition.dbm
            ):
                grown.append(nxt)
        for q in grown:
            table.add_row(q)
    elif report.kind == "time_saturation":
        table.add_row(continuous_successor(report.row))
    else:
        raise ValueError(f"nothing to repair: {report.kind}")


def _prepend_event(a: str, s: ElementaryLanguage) -> ElementaryLanguage:
    head = ElementaryLanguage(
        (a,),
        TimedCondition.universal(1)
        .constrain_sum(0, 0, "==", 0)
        .constrain_sum(1, 1, "==", 0),
    )
    return head.concat(s)

def _repair_inconsistency(
    table: TimedObservationTable, report: CohesionReport
) -> None:
    """Add a suffix separating the two rows, preferring a single one."""
    p, p2, a = report.row, report.row2, report.event
    have = {s.key() for s in table.suffixes}
    fresh = []
    for s in table.suffixes:
        t = _prepend_event(a, s)
        if t.key() not in have:
            fresh.append(t)
    for t in fresh:
        if find_renaming(p, p2, table.suffixes + [t], table.cells) is None:
            table.add_suffix(t)
            return
    if not fresh:
        raise RuntimeError("inconsistency persists under all known suffixes")
    for t in fresh:
        table.add_suffix(t)


def make_dta(table: TimedObservationTable) -> TimedAutomaton:
    """Hypothesis from a cohesive table.

    A row accepts when its cell under the empty suffix is full; every
    boundary row contributes its recorded morphism.
    """
    s0 = table.suffixes[0]
    accepting = tuple(
        p for p in table.rows if table.cell(p, s0).is_full
    )
    morphisms = []
    keys = table.row_keys()
    for p in table.rows:
        nxt = continuous_successor(p)
        if nxt.key() not in keys:
            tgt, ren = table.links[nxt.key()]
            morphisms.append((continuous_exterior(p), tgt, ren))
        for a in table.alphabet:
            qa = discrete_successor(p, a)
            if qa.key() not in keys:
                tgt, ren = table.links[qa.key()]
                morphisms.append((qa, tgt, ren))
    spec = RecognizableSpec(
        alphabet=table.alphabet,
        prefixes=tuple(table.rows),
        accepting=accepting,
        morphisms=tuple(morphisms),
    )
    table.last_spec = spec
    return build_dta(spec)


# --- counterexample analysis ---


def _locate(table: TimedObservationTable, w: TimedWord):
    for p in table.rows:
        if p.contains(w):
            return p
    return None


def _dwell_entry(cell: ElementaryLanguage, w: TimedWord, k: int) -> Fraction:
    """A dwell t with prefix(k, t) inside the cell, favouring t = tau_k."""
    lo, hi = Fraction(0), None
    for i in range(k + 1):
        base = sum(w.durations[i:k], Fraction(0))
        r = cell.condition.range_of(i, k)
        if r.is_point():
            t = Fraction(r.point_value()) - base
            assert 0 <= t <= w.durations[k]
            return t
        if r.lo is not None:
            lo = max(lo, Fraction(r.lo[0]) - base)
        if r.hi is not None:
            cand = Fraction(r.hi[0]) - base
            hi = cand if hi is None else min(hi, cand)
    if hi is None or w.durations[k] < hi:
        return w.durations[k]
    return (lo + hi) / 2


def _split(table: TimedObservationTable, w: TimedWord):
    """First crossing of w out of the row cells.

    Returns (boundary row, consumed prefix, remaining suffix); the
    prefix cell is a successor of a table row, never a row itself.
    """
    keys = table.row_keys()
    by_key = {p.key(): p for p in table.rows}
    k = 0
    while True:
        full = simple_cell_of(w.prefix(k, w.durations[k]))
        if full.key() in keys:
            if k == len(w.events):
                raise AssertionError("word never leaves the rows")
            nxt = simple_cell_of(w.prefix(k + 1, Fraction(0)))
            if nxt.key() in keys:
                k += 1
                continue
            return nxt, w.prefix(k + 1, Fraction(0)), w.suffix_from(k + 1, Fraction(0))
        cell = simple_cell_of(w.prefix(k, Fraction(0)))
        while cell.key() in keys:
            cell = continuous_successor(by_key[cell.key()])
        t = _dwell_entry(cell, w, k)
        return cell, w.prefix(k, t), w.suffix_from(k, t)


def analyze_cex(
    table: TimedObservationTable,
    hypothesis: TimedAutomaton,
    cex: TimedWord,
) -> ElementaryLanguage:
    """Suffix whose cells expose the defect behind the counterexample.

    Repeatedly rewrites the part of the word just past the known rows
    through the recorded morphism; the first rewrite that stops being a
    counterexample pinpoints a suffix on which the morphism is wrong.
    """
    teacher = table.teacher

    def differs(u: TimedWord) -> bool:
        return teacher.membership(u) != simulate(hypothesis, u)

    if not differs(cex):
        raise ValueError("not a counterexample")
    words = [cex]
    rests: list[Optional[TimedWord]] = [None]
    w = cex
    for _ in range(_MAX_REPLAYS):
        if _locate(table, w) is not None:
            break
        q, left, rest = _split(table, w)
        tgt, ren = table.links[q.key()]
        sums = [
            sum(left.durations[i:], Fraction(0))
            for i in range(len(left.durations))
        ]
        pins: dict[int, Fraction] = {}
        for i, j in ren.pairs:
            pins.setdefault(j, sums[i])
        image = witness_matching(tgt, pins)
        w = image.concat(rest)
        words.append(w)
        rests.append(rest)
    else:
        raise RuntimeError("counterexample replay did not terminate")
    if differs(words[-1]):
        raise RuntimeError(
            "replayed word still distinguishes: "
            f"{format_word(words[-1])} (row-faithfulness is violated)"
        )
    lo, hi = 0, len(words) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if differs(words[mid]):
            lo = mid
        else:
            hi = mid
    return simple_cell_of(rests[hi])


def _dwell_prefixed(s: ElementaryLanguage) -> ElementaryLanguage:
    pad = ElementaryLanguage(
        (),
        TimedCondition.universal(0)
        .constrain_sum(0, 0, ">", 0)
        .constrain_sum(0, 0, "<", 1),
    )
    return pad.concat(s)


def _refines(table: TimedObservationTable, cand: ElementaryLanguage) -> bool:
    """Would the candidate suffix split a currently linked row pair?"""
    probe = table.suffixes + [cand]
    for qk, (tgt, _) in list(table.links.items()):
        q = next(
            (
                r
                for r in table.successors() + table.rows
                if r.key() == qk
            ),
            None,
        )
        if q is None:
            continue
        if find_renaming(q, tgt, probe, table.cells) is None:
            return True
    return False


def _trajectory_cells(w: TimedWord) -> list[ElementaryLanguage]:
    """Every simple cell the run on w passes through, in visit order."""
    out: list[ElementaryLanguage] = []
    for k in range(len(w.events) + 1):
        cell = simple_cell_of(w.prefix(k, Fraction(0)))
        out.append(cell)
        stop = simple_cell_of(w.prefix(k, w.durations[k])).key()
        while cell.key() != stop:
            cell = continuous_successor(cell)
            out.append(cell)
    return out


def _integrate_cex(
    table: TimedObservationTable,
    hypothesis: TimedAutomaton,
    cex: TimedWord,
) -> None:
    s = analyze_cex(table, hypothesis, cex)
    have = {x.key() for x in table.suffixes}
    if s.key() not in have:
        table.add_suffix(s)
        log.debug("new suffix %r", s)
        cand = _dwell_prefixed(s)
        if cand.key() not in have and _refines(table, cand):
            table.add_suffix(cand)
            log.debug("new dwell-prefixed suffix %r", cand)
        return
    cand = _dwell_prefixed(s)
    if cand.key() not in have and _refines(table, cand):
        table.add_suffix(cand)
        log.debug("new dwell-prefixed suffix %r", cand)
        return
    # No suffix helps: the hypothesis lost the run in a region the
    # emitted edges do not cover.  Promote the cells the word actually
    # travels through, so the next construction covers them directly.
    before = len(table.rows)
    keys = table.row_keys()
    for cell in _trajectory_cells(cex):
        if cell.key() not in keys:
            keys.add(cell.key())
            table.add_row(cell)
    if len(table.rows) > before:
        log.debug(
            "no refining suffix; added %d trajectory rows",
            len(table.rows) - before,
        )
        return
    raise RuntimeError(
        f"counterexample {format_word(cex)} yields no progress"
    )


def learn_with_table(
    teacher: Teacher,
    *,
    time_saturation: bool = True,
    max_iterations: int = 100,
) -> tuple[TimedAutomaton, TimedObservationTable]:
    """Like learn(), but also hands back the final observation table."""
    table = TimedObservationTable(teacher, time_saturation=time_saturation)
    for round_no in range(1, max_iterations + 1):
        for _ in range(_MAX_REPAIRS):
            report = check_cohesion(table)
            if report.kind == "cohesive":
                break
            log.debug("repair %s", report.kind)
            repair(table, report)
        else:
            raise RuntimeError("table repair did not converge")
        hypothesis = simplify(make_dta(table))
        log.info(
            "round %d: %d rows, %d suffixes, hypothesis has %d locations",
            round_no,
            len(table.rows),
            len(table.suffixes),
            len(hypothesis.locations),
        )
        cex = teacher.equivalence(hypothesis)
        if cex is None:
            return hypothesis, table
        log.info("counterexample %s", format_word(cex))
        _integrate_cex(table, hypothesis, cex)
    raise RuntimeError("no convergence within the iteration budget")


def learn(
    teacher: Teacher,
    *,
    time_saturation: bool = True,
    max_iterations: int = 100,
) -> TimedAutomaton:
    """Learn a deterministic automaton for the teacher's language."""
    hypothesis, _ = learn_with_table(
        teacher, time_saturation=time_saturation, max_iterations=max_iterations
    )
    return hypothesis
