"""Deterministic timed automata and their zone-based algebra.

Guards are conjunctions of per-clock bounds (diagonal-free), updates are
parallel assignments from {constant, copy-of-clock}; unlisted clocks keep
their value.  All right-hand sides read pre-update values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from .dbm import DBM, Bound, ZERO_BOUND, bound_lt
from .words import TimedWord

# (clock index, op, const) with op in < <= > >= ==
GuardAtom = tuple[int, str, int]
Guard = tuple[GuardAtom, ...]
# (target clock, kind, value) with kind "const" (value: constant),
# "copy" (value: source clock), or "shift" (value: (source clock, offset)).
# Constants and offsets may be Fractions, guards are always integral.
UpdateAtom = tuple[int, str, object]
Updates = tuple[UpdateAtom, ...]


class NondeterministicInput(ValueError):
    """Two guards on the same location/event overlap."""

    def __init__(self, location: str, event: str) -> None:
        super().__init__(f"overlapping guards at location {location!r} on {event!r}")
        self.location = location
        self.event = event


@dataclass(frozen=True)
class Edge:
    source: int
    event: str
    guard: Guard
    updates: Updates
    target: int


@dataclass(frozen=True)
class TimedAutomaton:
    alphabet: tuple[str, ...]
    locations: tuple[str, ...]
    initial: int
    accepting: frozenset[int]
    clocks: tuple[str, ...]
    edges: tuple[Edge, ...]
    # per-location invariant guard; () is top
    invariants: tuple[Guard, ...] = ()

    def __post_init__(self) -> None:
        if not self.invariants:
            object.__setattr__(self, "invariants", tuple(() for _ in self.locations))

    def edges_from(self, loc: int, event: str) -> list[Edge]:
        return [e for e in self.edges if e.source == loc and e.event == event]

    def validate_deterministic(self) -> None:
        k = len(self.clocks)
        by_key: dict[tuple[int, str], list[Edge]] = {}
        for e in self.edges:
            by_key.setdefault((e.source, e.event), []).append(e)
        for (loc, ev), group in by_key.items():
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    z = guard_zone(group[i].guard, k)
                    z.imprint(guard_zone(group[j].guard, k), list(range(k + 1)))
                    if not z.empty:
                        raise NondeterministicInput(self.locations[loc], ev)

    def max_constants(self) -> list[int]:
        """Per-clock maximum compared constant, propagated through copies."""
        k = len(self.clocks)
        consts = [0] * k
        for e in self.edges:
            for c, _, d in e.guard:
                consts[c] = max(consts[c], d)
            for t, kind, v in e.updates:
                if kind == "const":
                    consts[t] = max(consts[t], math.ceil(v))
        for inv in self.invariants:
            for c, _, d in inv:
                consts[c] = max(consts[c], d)
        # negative shift offsets can cycle, growing forever; cutting the
        # propagation short only coarsens extrapolation, never unsounds it
        for _ in range(2 * k + 4):
            changed = False
            for e in self.edges:
                for t, kind, v in e.updates:
                    if kind == "copy" and consts[v] < consts[t]:
                        consts[v] = consts[t]
                        changed = True
                    elif kind == "shift":
                        # value(t) = value(s) + d, so a bound c on t reads
                        # back as c - d on s
                        s, d = v
                        need = max(0, math.ceil(consts[t] - d))
                        if consts[s] < need:
                            consts[s] = need
                            changed = True
            if not changed:
                break
        return consts


# -- concrete semantics ---------------------------------------------------------

ClockValuation = tuple[Fraction, ...]


def guard_sat(guard: Guard, vals: Sequence[Fraction]) -> bool:
    for c, op, d in guard:
        v = vals[c]
        ok = (
            v < d if op == "<" else v <= d if op == "<=" else
            v > d if op == ">" else v >= d if op == ">=" else v == d
        )
        if not ok:
            return False
    return True


def apply_updates(vals: ClockValuation, updates: Updates) -> ClockValuation:
    out = list(vals)
    for t, kind, v in updates:
        if kind == "const":
            out[t] = Fraction(v)
        elif kind == "copy":
            out[t] = vals[v]
        else:
            s, d = v
            out[t] = vals[s] + d
    return tuple(out)


def simulate(a: TimedAutomaton, w: TimedWord) -> bool:
    """Deterministic run; a word with no enabled edge is rejected."""
    loc = a.initial
    vals: ClockValuation = tuple(Fraction(0) for _ in a.clocks)
    if not guard_sat(a.invariants[loc], vals):
        return False
    for k, ev in enumerate(w.events):
        vals = tuple(v + w.durations[k] for v in vals)
        if not guard_sat(a.invariants[loc], vals):
            return False
        chosen: Optional[Edge] = None
        for e in a.edges_from(loc, ev):
            if guard_sat(e.guard, vals):
                chosen = e
                break
        if chosen is None:
            return False
        vals = apply_updates(vals, chosen.updates)
        loc = chosen.target
        if not guard_sat(a.invariants[loc], vals):
            return False
    vals = tuple(v + w.durations[-1] for v in vals)
    if not guard_sat(a.invariants[loc], vals):
        return False
    return loc in a.accepting


# -- zones -----------------------------------------------------------------------

Zone = DBM  # over clocks x_1..x_k with the usual zero row/column


def nonneg_zone(k: int) -> Zone:
    z = DBM.universal(k)
    for i in range(1, k + 1):
        z.constrain(0, i, ZERO_BOUND)
    return z


def guard_zone(guard: Guard, k: int) -> Zone:
    z = nonneg_zone(k)
    constrain_guard(z, guard)
    return z


def constrain_guard(z: Zone, guard: Guard) -> None:
    for c, op, d in guard:
        i = c + 1
        if op in ("<", "<="):
            z.constrain(i, 0, (d, op == "<"))
        elif op in (">", ">="):
            z.constrain(0, i, (-d, op == ">"))
        else:
            z.constrain(i, 0, (d, False))
            z.constrain(0, i, (-d, False))


def zone_update(z: Zone, updates: Updates, k: int) -> Zone:
    """Parallel assignment with pre-read right-hand sides, via primed vars."""
    if not updates:
        return z.copy()
    ext = z.extended(k)  # 1..k old, k+1..2k primed
    assigned = {t for t, _, _ in updates}
    for t, kind, v in updates:
        pi = 1 + k + t
        if kind == "const":
            ext.constrain(pi, 0, (v, False))
            ext.constrain(0, pi, (-v, False))
        elif kind == "copy":
            si = 1 + v
            ext.constrain(pi, si, ZERO_BOUND)
            ext.constrain(si, pi, ZERO_BOUND)
        else:
            s, d = v
            si = 1 + s
            ext.constrain(pi, si, (d, False))
            ext.constrain(si, pi, (-d, False))
    for t in range(k):
        if t not in assigned:
            pi, si = 1 + k + t, 1 + t
            ext.constrain(pi, si, ZERO_BOUND)
            ext.constrain(si, pi, ZERO_BOUND)
    return ext.project([0] + list(range(k + 1, 2 * k + 1)))


def initial_zone(a: TimedAutomaton) -> Zone:
    k = len(a.clocks)
    z = nonneg_zone(k)
    for i in range(1, k + 1):
        z.constrain(i, 0, ZERO_BOUND)
    z = z.delay()
    constrain_guard(z, a.invariants[a.initial])
    return z


def update_denominator(a: TimedAutomaton) -> int:
    """LCM of denominators over update constants; 1 when all are integral."""
    den = 1
    for e in a.edges:
        for _, kind, v in e.updates:
            if kind == "const":
                den = math.lcm(den, Fraction(v).denominator)
            elif kind == "shift":
                den = math.lcm(den, Fraction(v[1]).denominator)
    return den


def time_scaled(a: TimedAutomaton, k: int) -> TimedAutomaton:
    """Stretch the time axis by k: w is accepted iff k*w is accepted here.

    Guard constants and constant updates multiply by k, copies are unaffected.
    With k a multiple of update_denominator(a) the result is purely integral,
    which the zone engine requires.
    """
    if k == 1:
        return a

    def scale(g: Guard) -> Guard:
        return tuple((c, op, d * k) for c, op, d in g)

    def clear(v) -> int:
        sv = Fraction(v) * k
        if sv.denominator != 1:
            raise ValueError(f"scale {k} does not clear constant {v}")
        return int(sv)

    edges = []
    for e in a.edges:
        ups = []
        for t, kind, v in e.updates:
            if kind == "const":
                ups.append((t, kind, clear(v)))
            elif kind == "shift":
                ups.append((t, kind, (v[0], clear(v[1]))))
            else:
                ups.append((t, kind, v))
        edges.append(replace(e, guard=scale(e.guard), updates=tuple(ups)))
    return replace(
        a, edges=tuple(edges), invariants=tuple(scale(g) for g in a.invariants)
    )


# -- reachability with counterexample extraction ----------------------------------


@dataclass
class _Node:
    loc: int
    zone: Zone
    parent: Optional["_Node"]
    edge: Optional[Edge]
    depth: int


class _PathClock:
    """Symbolic clock value along a fixed edge path: const + (now - s_anchor).

    ``anchor`` indexes the event at which the clock was last assigned
    (0 is the run start).
    """

    __slots__ = ("base", "anchor")

    def __init__(self, base: int, anchor: int) -> None:
        self.base = base
        self.anchor = anchor


def _solve_path(a: TimedAutomaton, path: list[Edge]) -> Optional[TimedWord]:
    """Concrete delays realizing the edge path, or None if infeasible.

    Variables are the absolute event times s_1..s_m; guard atoms become
    difference bounds against the anchor times of the symbolic clocks.
    """
    m = len(path)
    z = DBM.universal(m)
    if m:
        z.constrain(0, 1, ZERO_BOUND)  # s_1 >= 0
    for i in range(1, m):
        z.constrain(i, i + 1, ZERO_BOUND)  # s_{i+1} >= s_i
    clocks = [_PathClock(0, 0) for _ in a.clocks]
    for step, e in enumerate(path, start=1):
        for c, op, d in e.guard:
            pc = clocks[c]
            # value at event step: pc.base + s_step - s_anchor  (op)  d
            bound = d - pc.base
            i, j = step, pc.anchor
            if op in ("<", "<="):
                z.constrain(i, j, (bound, op == "<"))
            elif op in (">", ">="):
                z.constrain(j, i, (-bound, op == ">"))
            else:
                z.constrain(i, j, (bound, False))
                z.constrain(j, i, (-bound, False))
        new_clocks = list(clocks)
        for t, kind, v in e.updates:
            if kind == "const":
                new_clocks[t] = _PathClock(v, step)
            elif kind == "copy":
                src = clocks[v]
                new_clocks[t] = _PathClock(src.base, src.anchor)
            else:
                s, d = v
                src = clocks[s]
                new_clocks[t] = _PathClock(src.base + d, src.anchor)
        clocks = new_clocks
    if z.empty:
        return None
    s = z.sample_point()
    durations = []
    prev = Fraction(0)
    for v in s:
        durations.append(v - prev)
        prev = v
    durations.append(Fraction(0))
    return TimedWord(durations, tuple(e.event for e in path))


def reach_accepting_word(a: TimedAutomaton, max_depth: int = 10_000) -> Optional[TimedWord]:
    """Shortest-event-count accepted word, by zone BFS with extrapolation."""
    den = update_denominator(a)
    if den != 1:
        w = reach_accepting_word(time_scaled(a, den), max_depth)
        if w is None:
            return None
        return TimedWord(tuple(d / den for d in w.durations), w.events)
    k = len(a.clocks)
    consts = [0] + a.max_constants()
    start_zone = initial_zone(a).extrapolate(consts)
    root = _Node(a.initial, start_zone, None, None, 0)
    if start_zone.empty:
        return None
    if a.initial in a.accepting:
        return _finish(a, root)
    visited: dict[int, list[Zone]] = {a.initial: [start_zone]}
    queue: list[_Node] = [root]
    qi = 0
    edges_by_source: dict[int, list[Edge]] = {}
    for e in a.edges:
        edges_by_source.setdefault(e.source, []).append(e)
    while qi < len(queue):
        node = queue[qi]
        qi += 1
        if node.depth >= max_depth:
            continue
        for e in edges_by_source.get(node.loc, []):
            z = node.zone.copy()
            constrain_guard(z, e.guard)
            if z.empty:
                continue
            z = zone_update(z, e.updates, k)
            constrain_guard(z, a.invariants[e.target])
            if z.empty:
                continue
            z = z.delay()
            constrain_guard(z, a.invariants[e.target])
            z = z.extrapolate(consts)
            if z.empty:
                continue
            seen = visited.setdefault(e.target, [])
            if any(old.includes(z) for old in seen):
                continue
            seen.append(z)
            child = _Node(e.target, z, node, e, node.depth + 1)
            if e.target in a.accepting:
                word = _finish(a, child)
                if word is not None:
                    return word
            queue.append(child)
    return None


def _finish(a: TimedAutomaton, node: _Node) -> Optional[TimedWord]:
    path: list[Edge] = []
    cur: Optional[_Node] = node
    while cur is not None and cur.edge is not None:
        path.append(cur.edge)
        cur = cur.parent
    path.reverse()
    return _solve_path(a, path)


# -- complement and product ---------------------------------------------------------

Interval = tuple[Bound, Bound]  # (lower as (v, strict) meaning >=/>, upper)


def _guard_to_box(guard: Guard, k: int) -> Optional[list[Interval]]:
    """Per-clock interval form; None when the guard is contradictory."""
    box: list[Interval] = [((0, False), None)] * k
    for c, op, d in guard:
        lo, hi = box[c]
        if op in ("<", "<="):
            nb: Bound = (d, op == "<")
            if hi is None or bound_lt(nb, hi):
                hi = nb
        elif op in (">", ">="):
            nb = (d, op == ">")
            if nb[0] > lo[0] or (nb[0] == lo[0] and nb[1] and not lo[1]):
                lo = nb
        else:
            return _guard_to_box(
                tuple(g for g in guard if g != (c, op, d))
                + ((c, "<=", d), (c, ">=", d)),
                k,
            )
        box[c] = (lo, hi)
    for lo, hi in box:
        if hi is not None and (lo[0] > hi[0] or (lo[0] == hi[0] and (lo[1] or hi[1]))):
            return None
    return box


def _box_to_guard(box: Sequence[Interval]) -> Guard:
    atoms: list[GuardAtom] = []
    for c, (lo, hi) in enumerate(box):
        if hi is not None and not hi[1] and lo == (hi[0], False):
            atoms.append((c, "==", hi[0]))
            continue
        if lo != (0, False):
            atoms.append((c, ">" if lo[1] else ">=", lo[0]))
        if hi is not None:
            atoms.append((c, "<" if hi[1] else "<=", hi[0]))
    return tuple(atoms)


def _box_subtract(a: list[Interval], b: list[Interval]) -> list[list[Interval]]:
    """a minus b as disjoint boxes, splitting axis by axis."""
    pieces: list[list[Interval]] = []
    cur = list(a)
    for c in range(len(a)):
        alo, ahi = cur[c]
        blo, bhi = b[c]
        # region below b's lower bound on axis c
        low_hi: Bound = (blo[0], not blo[1])
        if _interval_nonempty(alo, _tighter_hi(ahi, low_hi)):
            piece = list(cur)
            piece[c] = (alo, _tighter_hi(ahi, low_hi))
            pieces.append(piece)
        if bhi is not None:
            high_lo = (bhi[0], not bhi[1])
            if _interval_nonempty(_tighter_lo(alo, high_lo), ahi):
                piece = list(cur)
                piece[c] = (_tighter_lo(alo, high_lo), ahi)
                pieces.append(piece)
        mid = (_tighter_lo(alo, blo), _tighter_hi(ahi, bhi))
        if not _interval_nonempty(*mid):
            return pieces
        cur[c] = mid
    return pieces


def _tighter_hi(a: Bound, b: Bound) -> Bound:
    if a is None:
        return b
    if b is None:
        return a
    return a if bound_lt(a, b) else b


def _tighter_lo(a: Bound, b: Bound) -> Bound:
    assert a is not None and b is not None
    if a[0] != b[0]:
        return a if a[0] > b[0] else b
    return a if a[1] else b


def _interval_nonempty(lo: Bound, hi: Bound) -> bool:
    assert lo is not None
    if hi is None:
        return True
    return lo[0] < hi[0] or (lo[0] == hi[0] and not lo[1] and not hi[1])


def complete(
    a: TimedAutomaton,
    alphabet: Optional[tuple[str, ...]] = None,
    sink_name: str = "sink",
) -> TimedAutomaton:
    """Total automaton: uncovered guard space feeds a rejecting sink.

    Location invariants are assumed top (the only shape this package
    emits); a non-top invariant would shrink the space needing cover.
    """
    if alphabet is None:
        alphabet = a.alphabet
    else:
        alphabet = tuple(sorted(set(alphabet) | set(a.alphabet)))
    k = len(a.clocks)
    sink = len(a.locations)
    new_edges = list(a.edges)
    needs_sink = False
    full_box: list[Interval] = [((0, False), None)] * k
    for loc in range(len(a.locations)):
        for ev in alphabet:
            covered = [
                g
                for g in (_guard_to_box(e.guard, k) for e in a.edges_from(loc, ev))
                if g is not None
            ]
            holes = [full_box]
            for g in covered:
                holes = [piece for h in holes for piece in _box_subtract(h, g)]
            for h in holes:
                needs_sink = True
                new_edges.append(Edge(loc, ev, _box_to_guard(h), (), sink))
    if not needs_sink:
        return replace(a, alphabet=alphabet)
    for ev in alphabet:
        new_edges.append(Edge(sink, ev, (), (), sink))
    return TimedAutomaton(
        alphabet=alphabet,
        locations=a.locations + (sink_name,),
        initial=a.initial,
        accepting=a.accepting,
        clocks=a.clocks,
        edges=tuple(new_edges),
        invariants=a.invariants + ((),),
    )


def complement(
    a: TimedAutomaton, alphabet: Optional[tuple[str, ...]] = None
) -> TimedAutomaton:
    """Complete, then flip the accepting set."""
    total = complete(a, alphabet)
    flipped = frozenset(
        i for i in range(len(total.locations)) if i not in total.accepting
    )
    return replace(total, accepting=flipped)


def _rebase_value(kind: str, v, off: int):
    """Shift the clock reference inside an update value by ``off``."""
    if kind == "copy":
        return v + off
    if kind == "shift":
        return (v[0] + off, v[1])
    return v


def product(a: TimedAutomaton, b: TimedAutomaton) -> TimedAutomaton:
    """Intersection product; clocks are kept disjoint by renaming."""
    alphabet = tuple(sorted(set(a.alphabet) | set(b.alphabet)))
    ka = len(a.clocks)
    names = tuple(f"A.{c}" for c in a.clocks) + tuple(f"B.{c}" for c in b.clocks)
    locs: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}
    for la in range(len(a.locations)):
        for lb in range(len(b.locations)):
            index[(la, lb)] = len(locs)
            locs.append((la, lb))
    edges: list[Edge] = []
    for ea in a.edges:
        for eb in b.edges:
            if ea.event != eb.event:
                continue
            guard = ea.guard + tuple((c + ka, op, d) for c, op, d in eb.guard)
            ups = ea.updates + tuple(
                (t + ka, kind, _rebase_value(kind, v, ka))
                for t, kind, v in eb.updates
            )
            edges.append(
                Edge(index[(ea.source, eb.source)], ea.event, guard, ups,
                     index[(ea.target, eb.target)])
            )
    invs = tuple(
        a.invariants[la] + tuple((c + ka, op, d) for c, op, d in b.invariants[lb])
        for la, lb in locs
    )
    return TimedAutomaton(
        alphabet=alphabet,
        locations=tuple(f"{a.locations[la]}|{b.locations[lb]}" for la, lb in locs),
        initial=index[(a.initial, b.initial)],
        accepting=frozenset(
            index[(la, lb)]
            for la, lb in locs
            if la in a.accepting and lb in b.accepting
        ),
        clocks=names,
        edges=tuple(edges),
        invariants=invs,
    )


def find_distinguishing_word(
    a: TimedAutomaton, b: TimedAutomaton
) -> Optional[TimedWord]:
    """A witness in the symmetric difference, or None when equivalent.

    Both directions are searched; the shorter witness wins (ties go to
    the L(a) minus L(b) direction).
    """
    sigma = tuple(sorted(set(a.alphabet) | set(b.alphabet)))
    w1 = reach_accepting_word(product(a, complement(b, sigma)))
    w2 = reach_accepting_word(product(complement(a, sigma), b))
    if w1 is None:
        return w2
    if w2 is None:
        return w1
    return w2 if len(w2) < len(w1) else w1


# -- simplification -------------------------------------------------------------


def simplify(a: TimedAutomaton) -> TimedAutomaton:
    """Language-preserving cleanup: drop dead locations, merge twin edges."""
    k = len(a.clocks)
    reachable = _reachable_locations(a)
    alive = _can_accept(a) & reachable | {a.initial}
    keep = sorted(alive)
    remap = {old: new for new, old in enumerate(keep)}
    edges = [
        e for e in a.edges
        if e.source in remap and e.target in remap
    ]
    edges = [replace(e, source=remap[e.source], target=remap[e.target]) for e in edges]
    merged = _merge_edges(edges, k)
    return TimedAutomaton(
        alphabet=a.alphabet,
        locations=tuple(a.locations[i] for i in keep),
        initial=remap[a.initial],
        accepting=frozenset(remap[i] for i in a.accepting if i in remap),
        clocks=a.clocks,
        edges=tuple(merged),
        invariants=tuple(a.invariants[i] for i in keep),
    )


def _reachable_locations(a: TimedAutomaton) -> set[int]:
    a = time_scaled(a, update_denominator(a))
    k = len(a.clocks)
    consts = [0] + a.max_constants()
    visited: dict[int, list[Zone]] = {}
    start = initial_zone(a).extrapolate(consts)
    visited[a.initial] = [start]
    stack = [(a.initial, start)]
    edges_by_source: dict[int, list[Edge]] = {}
    for e in a.edges:
        edges_by_source.setdefault(e.source, []).append(e)
    while stack:
        loc, zone = stack.pop()
        for e in edges_by_source.get(loc, []):
            z = zone.copy()
            constrain_guard(z, e.guard)
            if z.empty:
                continue
            z = zone_update(z, e.updates, k)
            constrain_guard(z, a.invariants[e.target])
            z = z.delay()
            constrain_guard(z, a.invariants[e.target])
            z = z.extrapolate(consts)
            if z.empty:
                continue
            seen = visited.setdefault(e.target, [])
            if any(old.includes(z) for old in seen):
                continue
            seen.append(z)
            stack.append((e.target, z))
    return set(visited)


def _can_accept(a: TimedAutomaton) -> set[int]:
    out = set(a.accepting)
    changed = True
    while changed:
        changed = False
        for e in a.edges:
            if e.target in out and e.source not in out:
                out.add(e.source)
                changed = True
    return out


def _merge_edges(edges: list[Edge], k: int) -> list[Edge]:
    groups: dict[tuple, list[Edge]] = {}
    for e in edges:
        groups.setdefault((e.source, e.target, e.event, e.updates), []).append(e)
    out: list[Edge] = []
    for (src, tgt, ev, ups), group in groups.items():
        boxes = [_guard_to_box(e.guard, k) for e in group]
        if any(b is None for b in boxes):
            out.extend(group)
            continue
        merged = _merge_boxes([b for b in boxes if b is not None])
        for box in merged:
            out.append(Edge(src, ev, _box_to_guard(box), ups, tgt))
    out.sort(key=lambda e: (e.source, e.event, e.target, e.guard))
    return out


def _merge_boxes(boxes: list[list[Interval]]) -> list[list[Interval]]:
    work = [list(b) for b in boxes]
    changed = True
    while changed:
        changed = False
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                m = _try_merge(work[i], work[j])
                if m is not None:
                    work[i] = m
                    del work[j]
                    changed = True
                    break
            if changed:
                break
    return work


def _try_merge(a: list[Interval], b: list[Interval]) -> Optional[list[Interval]]:
    diff = [c for c in range(len(a)) if a[c] != b[c]]
    if len(diff) > 1:
        return None
    if not diff:
        return list(a)
    c = diff[0]
    lo_a, hi_a = a[c]
    lo_b, hi_b = b[c]
    for first, second in (((lo_a, hi_a), (lo_b, hi_b)), ((lo_b, hi_b), (lo_a, hi_a))):
        f_lo, f_hi = first
        s_lo, s_hi = second
        if f_hi is not None and f_hi[0] == s_lo[0] and f_hi[1] != s_lo[1]:
            merged = list(a)
            merged[c] = (f_lo, s_hi)
            return merged
        if f_hi is not None and (
            s_lo[0] < f_hi[0] or (s_lo[0] == f_hi[0] and not s_lo[1] and not f_hi[1])
        ):
            hi = None if s_hi is None else (s_hi if bound_lt(f_hi, s_hi) else f_hi)
            lo = f_lo if f_lo[0] < s_lo[0] or (f_lo[0] == s_lo[0] and not f_lo[1]) else s_lo
            merged = list(a)
            merged[c] = (lo, hi)
            return merged
    return None
