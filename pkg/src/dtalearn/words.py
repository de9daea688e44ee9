"""Timed words: alternating dwell durations and events.

A timed word tau_0 a_1 tau_1 ... a_n tau_n has n events and n+1 dwell
durations.  Durations are exact rationals; floats are rejected at
construction so membership and point constraints stay decidable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, str, Fraction]


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, float):
        raise TypeError("durations must be exact rationals, not floats")
    return Fraction(x)


class TimedWord:
    """Immutable alternating sequence of durations and events."""

    __slots__ = ("durations", "events")

    def __init__(
        self, durations: Iterable[RationalLike], events: Sequence[str] = ()
    ) -> None:
        durs = tuple(as_fraction(d) for d in durations)
        evs = tuple(events)
        if len(durs) != len(evs) + 1:
            raise ValueError("need exactly one more duration than events")
        if any(d < 0 for d in durs):
            raise ValueError("durations must be non-negative")
        self.durations = durs
        self.events = evs

    @classmethod
    def empty(cls) -> "TimedWord":
        return cls((Fraction(0),))

    def concat(self, other: "TimedWord") -> "TimedWord":
        """Concatenation; the seam durations merge into one dwell."""
        durs = (
            self.durations[:-1]
            + (self.durations[-1] + other.durations[0],)
            + other.durations[1:]
        )
        return TimedWord(durs, self.events + other.events)

    def prefix(self, k: int, dwell: RationalLike) -> "TimedWord":
        """First k events, then ``dwell`` time (must not exceed tau_k)."""
        d = as_fraction(dwell)
        if d > self.durations[k]:
            raise ValueError("prefix dwell exceeds the original duration")
        return TimedWord(self.durations[:k] + (d,), self.events[:k])

    def suffix_from(self, k: int, consumed: RationalLike) -> "TimedWord":
        """Drop the first k events and ``consumed`` time of dwell tau_k."""
        c = as_fraction(consumed)
        return TimedWord(
            (self.durations[k] - c,) + self.durations[k + 1 :], self.events[k:]
        )

    def total_duration(self) -> Fraction:
        return sum(self.durations, Fraction(0))

    def __len__(self) -> int:
        return len(self.events)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TimedWord)
            and self.durations == other.durations
            and self.events == other.events
        )

    def __hash__(self) -> int:
        return hash((self.durations, self.events))

    def __repr__(self) -> str:
        return f"TimedWord({format_word(self)!r})"


def format_word(w: TimedWord) -> str:
    """Render as "t0 a1 t1 ..." with exact rationals."""
    parts = [format_rational(w.durations[0])]
    for e, d in zip(w.events, w.durations[1:]):
        parts.append(e)
        parts.append(format_rational(d))
    return " ".join(parts)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_word(text: str) -> TimedWord:
    """Inverse of :func:`format_word`; tokens alternate duration, event."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty timed word text")
    durations: list[Fraction] = []
    events: list[str] = []
    for pos, tok in enumerate(tokens):
        if pos % 2 == 0:
            try:
                durations.append(Fraction(tok))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad duration {tok!r} at token {pos}") from exc
        else:
            events.append(tok)
    if len(durations) != len(events) + 1:
        raise ValueError("timed word must end with a duration")
    return TimedWord(durations, events)
