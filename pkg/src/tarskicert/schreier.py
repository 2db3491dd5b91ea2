"""Finite windows of Schreier graphs of actions on coset spaces.

A window is the ball of a chosen radius around the base coset, expanded
lazily from a membership oracle.  Interior vertices carry all their
transitions; vertices at the boundary radius are marked frontier, and
every downstream verifier quantifies over interior vertices only.

Coset identification is by oracle calls on quotients w1 * w2^-1, pairwise
against the known cosets with memoized representatives; that cost is
quadratic per layer and is the scalability boundary of this path.
Oracles that carry an exact state key (a total ``step`` function whose
states are in bijection with cosets) expand by plain BFS over states and
produce the identical window; the two paths are compared in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import BudgetExceeded, InvariantViolation
from .freewords import Word, inv, mul, reduce_word
from .stallings import AbelianMap, CoreGraph

FRONTIER_EXIT = -1


@dataclass(frozen=True)
class Oracle:
    """Membership test for a subgroup H, optionally with an exact state key.

    ``predicate`` decides w ∈ H.  When ``step`` is given it must be a total
    function (state, letter) -> state whose states are in bijection with
    the cosets of H, with ``base_state`` the coset of H itself; expansion
    then keys cosets by state instead of pairwise membership calls.
    """

    name: str
    predicate: Callable[[Word], bool]
    rank: int
    step: Optional[Callable] = None
    base_state: object = None
    notes: str = ""

    def member(self, word: Word) -> bool:
        return bool(self.predicate(reduce_word(word)))


@dataclass(frozen=True)
class Window:
    """A radius-ball of the Schreier graph of F/H around the base coset.

    ``reps[v]`` is the shortlex-least word reaching coset v during BFS;
    ``trans[v]`` has one entry per letter, -1 where the window ends.
    ``frontier`` holds exactly the vertices at distance ``radius``; all
    others are interior and have total transition rows.  ``states`` echoes
    the oracle's state key per vertex when one was used (None otherwise).
    """

    rank: int
    oracle_name: str
    radius: int
    reps: tuple
    trans: tuple
    dist: tuple
    frontier: frozenset
    states: Optional[tuple] = field(default=None, compare=False)

    base = 0

    @property
    def n_vertices(self) -> int:
        return len(self.reps)

    def interior(self):
        return [v for v in range(len(self.reps)) if v not in self.frontier]

    def is_interior(self, v: int) -> bool:
        return v not in self.frontier


def oracle_fg(core: CoreGraph, name: Optional[str] = None) -> Oracle:
    """Membership oracle of the finitely generated subgroup of a core.

    The Schreier graph of F/H is the core with a reduced tree hanging off
    each unsaturated vertex, so (core vertex, hanging path) is an exact
    coset key and the oracle supports keyed expansion.
    """

    def predicate(w: Word) -> bool:
        return core.member(w)

    def step(state, d):
        v, tail = state
        if tail:
            if d == tail[-1] ^ 1:
                return (v, tail[:-1])
            return (v, tail + (d,))
        t = core.trans[v][d]
        if t >= 0:
            return (t, ())
        return (v, (d,))

    return Oracle(name=name or f"fg-core-{core.nv}v", predicate=predicate,
                  rank=core.rank, step=step, base_state=(0, ()),
                  notes="coset key: (core vertex, hanging reduced path)")


def oracle_gamma2(core: CoreGraph, am: Optional[AbelianMap] = None,
                  name: Optional[str] = None) -> Oracle:
    """Membership oracle for the commutator subgroup of a core's group.

    w lies in [K, K] iff w traces back to the base of K's core and the
    abelianized edge-vector of its loop vanishes.  The coset key extends
    the core key by the running abelian vector, advanced on core edges
    only (hanging-tree detours cancel exactly).
    """
    if am is None:
        am = AbelianMap(core)

    def predicate(w: Word) -> bool:
        return core.member(w) and am.loop_vector(w) == (0,) * len(am.basis)

    def step(state, d):
        v, tail, vec = state
        if tail:
            if d == tail[-1] ^ 1:
                return (v, tail[:-1], vec)
            return (v, tail + (d,), vec)
        t = core.trans[v][d]
        if t >= 0:
            s = am.step(v, d)
            if s is not None:
                i, sign = s
                vec = vec[:i] + (vec[i] + sign,) + vec[i + 1:]
            return (t, (), vec)
        return (v, (d,), vec)

    zero = (0,) * len(am.basis)
    return Oracle(name=name or f"gamma2-core-{core.nv}v", predicate=predicate,
                  rank=core.rank, step=step, base_state=(0, (), zero),
                  notes="coset key: (core vertex, hanging path, abelian vector)")


def oracle_conjugate(oracle: Oracle, g: Word, name: Optional[str] = None) -> Oracle:
    """Oracle of the conjugate subgroup g^-1 H g."""
    g = reduce_word(g)

    def predicate(w: Word) -> bool:
        return oracle.member(mul(g, w, inv(g)))

    step = None
    base_state = None
    if oracle.step is not None:
        step = oracle.step
        base_state = oracle.base_state
        for d in g:
            base_state = step(base_state, d)
    return Oracle(name=name or f"conj-{oracle.name}", predicate=predicate,
                  rank=oracle.rank, step=step, base_state=base_state,
                  notes=f"conjugate of {oracle.name}")


def oracle_generated_by_regions(spec) -> Oracle:
    """Oracle of the subgroup carried by an explicit regional structure.

    ``spec`` supplies a total coset step function (attribute ``step``), its
    base state (``base_state``) and a ``name``; membership is tracing back
    to the base state.  The towers module builds such specs out of a spine,
    attached automata and hanging trees.
    """
    step = spec.step
    base = spec.base_state

    def predicate(w: Word) -> bool:
        s = base
        for d in w:
            s = step(s, d)
        return s == base

    return Oracle(name=spec.name, predicate=predicate, rank=spec.rank,
                  step=step, base_state=base,
                  notes="explicit regional structure")


def expand(oracle: Oracle, radius: int, budget: int = 1 << 20) -> Window:
    """BFS ball of the Schreier graph around the base coset.

    Vertices are discovered in shortlex order of their least
    representatives; reverse edges are recorded as soon as an edge is,
    and rows of interior vertices end up total.  Vertices at distance
    exactly ``radius`` form the frontier.  Raises BudgetExceeded when the
    vertex budget is hit.
    """
    if radius < 0:
        raise InvariantViolation("radius must be nonnegative")
    keyed = oracle.step is not None
    rank = oracle.rank
    deg = 2 * rank

    reps: list = [()]
    dist: list = [0]
    rows: list = [[-1] * deg]
    states: list = [oracle.base_state] if keyed else []
    ids: dict = {}
    if keyed:
        ids[oracle.base_state] = 0

    def identify(word: Word, state) -> Optional[int]:
        if keyed:
            return ids.get(state)
        for u in range(len(reps)):
            if oracle.member(mul(word, inv(reps[u]))):
                return u
        return None

    v = 0
    while v < len(reps):
        if dist[v] >= radius:
            break
        for d in range(deg):
            if rows[v][d] >= 0:
                continue
            word = reduce_word(reps[v] + (d,))
            state = oracle.step(states[v], d) if keyed else None
            t = identify(word, state)
            if t is None:
                t = len(reps)
                if t >= budget:
                    raise BudgetExceeded(
                        f"window exceeds {budget} vertices at radius {radius}")
                reps.append(word)
                dist.append(dist[v] + 1)
                rows.append([-1] * deg)
                if keyed:
                    ids[state] = t
                    states.append(state)
            rows[v][d] = t
            back = rows[t][d ^ 1]
            if back >= 0 and back != v:
                raise InvariantViolation("conflicting reverse transition")
            rows[t][d ^ 1] = v
        v += 1

    frontier = frozenset(u for u in range(len(reps)) if dist[u] == radius)
    for u in range(len(reps)):
        if u not in frontier and any(t < 0 for t in rows[u]):
            raise InvariantViolation(f"interior vertex {u} has a partial row")

    return Window(rank=rank, oracle_name=oracle.name, radius=radius,
                  reps=tuple(reps), trans=tuple(tuple(r) for r in rows),
                  dist=tuple(dist), frontier=frontier,
                  states=tuple(states) if keyed else None)


def trace(window: Window, v: int, word: Word) -> int:
    """Follow ``word`` from vertex ``v``; FRONTIER_EXIT on leaving."""
    for d in word:
        t = window.trans[v][d]
        if t < 0:
            return FRONTIER_EXIT
        v = t
    return v


def export_json(window: Window, alphabet=None) -> dict:
    def name(d):
        return alphabet.letter_name(d) if alphabet is not None else d

    edges = []
    for v in range(window.n_vertices):
        for d in range(0, 2 * window.rank, 2):
            t = window.trans[v][d]
            if t >= 0:
                edges.append({"from": v, "to": t, "label": name(d)})
    return {
        "kind": "window",
        "oracle": window.oracle_name,
        "radius": window.radius,
        "rank": window.rank,
        "vertices": window.n_vertices,
        "base": 0,
        "frontier": sorted(window.frontier),
        "reps": [name_word(window.reps[v], alphabet)
                 for v in range(window.n_vertices)],
        "edges": edges,
    }


def name_word(word: Word, alphabet=None) -> object:
    if alphabet is not None:
        return alphabet.format(word)
    return list(word)


def export_dot(window: Window, alphabet=None) -> str:
    def name(d):
        return alphabet.letter_name(d) if alphabet is not None else str(d)

    lines = [
        "digraph window {",
        "  rankdir=LR;",
        f'  label="oracle: {window.oracle_name}, radius {window.radius}";',
    ]
    for v in range(window.n_vertices):
        shape = "doublecircle" if v == 0 else "circle"
        style = ', style=dashed' if v in window.frontier else ""
        lines.append(f"  {v} [shape={shape}{style}];")
    for v in range(window.n_vertices):
        for d in range(0, 2 * window.rank, 2):
            t = window.trans[v][d]
            if t >= 0:
                lines.append(f'  {v} -> {t} [label="{name(d)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
