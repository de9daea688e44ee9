"""Reading, writing, and exporting automata ("dta-v1" JSON documents).

The canonical form is what serialize_automaton emits: two-space indent,
fixed key order, guards as "c0 >= 1 && c1 < 2", updates as
"c0 := 0; c1 := c0".  parse_automaton of a canonical document followed by
serialize_automaton reproduces the input byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .automata import Edge, Guard, TimedAutomaton, Updates

FORMAT = "dta-v1"
_OPS = ("<=", ">=", "==", "<", ">")


class ParseError(ValueError):
    """Invalid document; ``position`` locates the offending piece."""

    def __init__(self, message: str, position: Optional[str] = None) -> None:
        self.position = position
        super().__init__(f"{position}: {message}" if position else message)


# -- rendering ---------------------------------------------------------------


def _render_value(v) -> str:
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def render_guard(guard: Guard, clocks: tuple[str, ...]) -> str:
    return " && ".join(f"{clocks[c]} {op} {d}" for c, op, d in guard)


def render_updates(updates: Updates, clocks: tuple[str, ...]) -> str:
    parts = []
    for t, kind, v in updates:
        if kind == "copy":
            rhs = clocks[v]
        elif kind == "shift":
            s, d = v
            sign = "-" if d < 0 else "+"
            rhs = f"{clocks[s]} {sign} {_render_value(abs(Fraction(d)))}"
        else:
            rhs = _render_value(v)
        parts.append(f"{clocks[t]} := {rhs}")
    return "; ".join(parts)


def serialize_automaton(a: TimedAutomaton) -> str:
    locations = []
    for i, name in enumerate(a.locations):
        entry: dict = {"name": name}
        if i == a.initial:
            entry["initial"] = True
        if i in a.accepting:
            entry["accepting"] = True
        if a.invariants[i]:
            entry["invariant"] = render_guard(a.invariants[i], a.clocks)
        locations.append(entry)
    edges = []
    for e in a.edges:
        entry = {"from": a.locations[e.source], "event": e.event}
        if e.guard:
            entry["guard"] = render_guard(e.guard, a.clocks)
        if e.updates:
            entry["update"] = render_updates(e.updates, a.clocks)
        entry["to"] = a.locations[e.target]
        edges.append(entry)
    doc = {
        "format": FORMAT,
        "alphabet": list(a.alphabet),
        "clocks": list(a.clocks),
        "locations": locations,
        "edges": edges,
    }
    return json.dumps(doc, indent=2) + "\n"


# -- parsing -----------------------------------------------------------------


def _parse_guard(text: str, clock_idx: dict[str, int], where: str) -> Guard:
    atoms = []
    if text.strip() == "":
        return ()
    for part in text.split("&&"):
        part = part.strip()
        op = next((o for o in _OPS if o in part), None)
        if op is None:
            raise ParseError(f"no comparison operator in {part!r}", where)
        lhs, _, rhs = part.partition(op)
        name, val = lhs.strip(), rhs.strip()
        if name not in clock_idx:
            raise ParseError(f"unknown clock {name!r}", where)
        if not val.isdigit():
            raise ParseError(f"guard constant must be a non-negative integer, got {val!r}", where)
        atoms.append((clock_idx[name], op, int(val)))
    return tuple(atoms)


def _parse_value(text: str, where: str) -> "int | Fraction":
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad constant {text!r}", where) from None
    if f < 0:
        raise ParseError(f"negative constant {text!r}", where)
    return f.numerator if f.denominator == 1 else f


def _parse_updates(text: str, clock_idx: dict[str, int], where: str) -> Updates:
    out = []
    if text.strip() == "":
        return ()
    seen = set()
    for part in text.split(";"):
        part = part.strip()
        lhs, sep, rhs = part.partition(":=")
        if not sep:
            raise ParseError(f"update {part!r} lacks ':='", where)
        name, src = lhs.strip(), rhs.strip()
        if name not in clock_idx:
            raise ParseError(f"unknown clock {name!r}", where)
        if name in seen:
            raise ParseError(f"clock {name!r} assigned twice", where)
        seen.add(name)
        if src in clock_idx:
            out.append((clock_idx[name], "copy", clock_idx[src]))
        elif " + " in src or " - " in src:
            neg = " - " in src
            base, _, off = src.partition(" - " if neg else " + ")
            base = base.strip()
            if base not in clock_idx:
                raise ParseError(f"unknown clock {base!r}", where)
            d = _parse_value(off.strip(), where)
            out.append((clock_idx[name], "shift", (clock_idx[base], -d if neg else d)))
        else:
            out.append((clock_idx[name], "const", _parse_value(src, where)))
    return tuple(out)


def _expect(doc: dict, key: str, typ: type, where: str):
    if key not in doc:
        raise ParseError(f"missing key {key!r}", where)
    v = doc[key]
    if not isinstance(v, typ):
        raise ParseError(f"key {key!r} must be {typ.__name__}", where)
    return v


def parse_automaton(text: str) -> TimedAutomaton:
    """Parse and semantically validate a dta-v1 document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object", "top level")
    fmt = doc.get("format")
    if fmt != FORMAT:
        raise ParseError(f"unsupported format {fmt!r}", "format")

    alphabet = tuple(_expect(doc, "alphabet", list, "top level"))
    clocks = tuple(_expect(doc, "clocks", list, "top level"))
    if len(set(clocks)) != len(clocks):
        raise ParseError("duplicate clock names", "clocks")
    clock_idx = {name: i for i, name in enumerate(clocks)}

    loc_entries = _expect(doc, "locations", list, "top level")
    names: list[str] = []
    accepting: set[int] = set()
    invariants: list[Guard] = []
    initial: Optional[int] = None
    for i, entry in enumerate(loc_entries):
        where = f"locations[{i}]"
        if not isinstance(entry, dict):
            raise ParseError("location must be an object", where)
        name = _expect(entry, "name", str, where)
        if name in names:
            raise ParseError(f"duplicate location {name!r}", where)
        names.append(name)
        if entry.get("initial"):
            if initial is not None:
                raise ParseError("second initial location", where)
            initial = i
        if entry.get("accepting"):
            accepting.add(i)
        invariants.append(_parse_guard(entry.get("invariant", ""), clock_idx, f"{where}.invariant"))
    if initial is None:
        raise ParseError("no initial location", "locations")
    loc_idx = {name: i for i, name in enumerate(names)}

    edges = []
    for i, entry in enumerate(_expect(doc, "edges", list, "top level")):
        where = f"edges[{i}]"
        if not isinstance(entry, dict):
            raise ParseError("edge must be an object", where)
        src = _expect(entry, "from", str, where)
        dst = _expect(entry, "to", str, where)
        event = _expect(entry, "event", str, where)
        if src not in loc_idx:
            raise ParseError(f"unknown location {src!r}", f"{where}.from")
        if dst not in loc_idx:
            raise ParseError(f"unknown location {dst!r}", f"{where}.to")
        if event not in alphabet:
            raise ParseError(f"event {event!r} not in the alphabet", f"{where}.event")
        guard = _parse_guard(entry.get("guard", ""), clock_idx, f"{where}.guard")
        updates = _parse_updates(entry.get("update", ""), clock_idx, f"{where}.update")
        edges.append(Edge(loc_idx[src], event, guard, updates, loc_idx[dst]))

    a = TimedAutomaton(
        alphabet=alphabet,
        locations=tuple(names),
        initial=initial,
        accepting=frozenset(accepting),
        clocks=clocks,
        edges=tuple(edges),
        invariants=tuple(invariants),
    )
    a.validate_deterministic()
    return a


# -- DOT export --------------------------------------------------------------


def to_dot(a: TimedAutomaton) -> str:
    """Graphviz digraph with guards/updates as edge labels."""
    lines = ["digraph dta {", "  rankdir=LR;", '  __init [shape=point, label=""];']
    for i, name in enumerate(a.locations):
        shape = "doublecircle" if i in a.accepting else "circle"
        label = name
        if a.invariants[i]:
            label += "\\n" + render_guard(a.invariants[i], a.clocks)
        lines.append(f'  {_dot_id(name)} [shape={shape}, label="{label}"];')
    lines.append(f"  __init -> {_dot_id(a.locations[a.initial])};")
    for e in a.edges:
        parts = [e.event]
        if e.guard:
            parts.append(render_guard(e.guard, a.clocks))
        if e.updates:
            parts.append(render_updates(e.updates, a.clocks))
        label = " | ".join(parts)
        lines.append(
            f"  {_dot_id(a.locations[e.source])} -> {_dot_id(a.locations[e.target])}"
            f' [label="{label}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_id(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'
