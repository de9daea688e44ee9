"""Membership and equivalence oracles over a hidden target automaton."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .automata import TimedAutomaton, find_distinguishing_word, simulate
from .conditions import TimedCondition
from .elementary import ElementaryLanguage, witness_durations
from .words import TimedWord, format_word


@dataclass(frozen=True)
class SymbolicMembership:
    """Answer to a symbolic query: the accepted cells of the base."""

    word: tuple[str, ...]
    condition: TimedCondition
    cells: tuple[TimedCondition, ...]
    total: int

    @property
    def is_empty(self) -> bool:
        return not self.cells

    @property
    def is_full(self) -> bool:
        return len(self.cells) == self.total

    def key(self) -> tuple:
        return (self.word, tuple(c.key() for c in self.cells))


@dataclass
class QueryStats:
    membership_raw: int = 0
    membership_distinct: int = 0
    symbolic: int = 0
    equivalence: int = 0


class Teacher:
    """Answers queries against a hidden deterministic target.

    A symbolic query partitions its condition into simple cells; any
    single witness per cell settles the whole cell, so each cell costs
    one plain membership query.  With ``smart=True`` the witnesses are
    simulated directly instead of being charged to the membership
    counters, which models a teacher with white-box access.
    """

    def __init__(self, target: TimedAutomaton, smart: bool = False) -> None:
        self.target = target
        self.smart = smart
        self.alphabet = tuple(target.alphabet)
        self.stats = QueryStats()
        self.transcript: list[str] = []
        self._memo: dict[TimedWord, bool] = {}
        self._sym_memo: dict[tuple, SymbolicMembership] = {}

    def membership(self, w: TimedWord) -> bool:
        self.stats.membership_raw += 1
        hit = self._memo.get(w)
        if hit is None:
            hit = simulate(self.target, w)
            self._memo[w] = hit
            self.stats.membership_distinct = len(self._memo)
            self.transcript.append(f"member {format_word(w)} -> {int(hit)}")
        return hit

    def symbolic_membership(
        self, p: ElementaryLanguage, s: Optional[ElementaryLanguage] = None
    ) -> SymbolicMembership:
        """Accepted cells of p, or of p.s with the seam dwell kept split.

        The two-argument form answers over both dwells around the seam
        separately, which is what row comparisons consume; a witness of
        such a cell merges the seam before the underlying membership
        query.
        """
        key = (p.key(), None if s is None else s.key())
        cached = self._sym_memo.get(key)
        if cached is not None:
            return cached
        if s is None:
            word, base, seam = p.word, p.condition, None
        else:
            word = p.word + s.word
            base = p.condition.embed_concat(s.condition)
            seam = p.n
        if not base.is_bounded():
            raise ValueError("symbolic membership needs a bounded condition")
        self.stats.symbolic += 1
        cells = base.enumerate_simple()
        accepted = []
        for cell in cells:
            durs = witness_durations(cell)
            if seam is not None:
                durs[seam] += durs[seam + 1]
                del durs[seam + 1]
            w = TimedWord(durs, word)
            ok = simulate(self.target, w) if self.smart else self.membership(w)
            if ok:
                accepted.append(cell)
        answer = SymbolicMembership(tuple(word), base, tuple(accepted), len(cells))
        self._sym_memo[key] = answer
        self.transcript.append(f"symbolic {p!r}|{s!r} -> {len(accepted)}/{len(cells)}")
        return answer

    def equivalence(self, hypothesis: TimedAutomaton) -> Optional[TimedWord]:
        self.stats.equivalence += 1
        cex = find_distinguishing_word(hypothesis, self.target)
        self.transcript.append(
            "equivalence -> " + ("ok" if cex is None else format_word(cex))
        )
        return cex
