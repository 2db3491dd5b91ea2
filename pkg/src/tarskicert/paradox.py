"""Paradoxical decompositions and their violation certificates.

A decomposition over a window consists of two translating sets S1, S2 and
disjoint pieces P1..Pm, Q1..Qn such that the P-translates and Q-translates
each cover the space; pieces need not cover anything themselves.  This
module verifies such data, constructs the classical one for free actions
of a rank-2 subgroup, and certifies failures of the matching (Hall)
condition that any decomposition would have to satisfy:

* ``hall_check`` runs maximum matching over two tagged copies of a pool
  and extracts a deficient pair (A1, A2) by alternating reachability when
  the matching is not left-saturating;
* ``doubling_check`` / ``forest_doubling_cert`` handle the three-translate
  doubling condition, the latter via a global spanning forest in which
  every interior vertex keeps two incoming labeled edges;
* ``folner_violation`` finds violating boxes in Z^k for abelian quotients;
* ``power_cycle_violation`` builds the little core on three power-cycles
  whose Hall condition fails at sets of size 2 and 3.

All verdicts are window-relative: SATISFIED means no violation inside this
window, while every returned violation re-verifies arithmetically and
involves no unresolved translate, so it is never a truncation artifact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    FreenessViolation,
    InvariantViolation,
    NonEquivariantMap,
    NotFound,
    ShapeError,
    UnresolvedTranslate,
)
from .freewords import Word, inv, mul, reduce_word
from .stallings import CoreGraph, core_graph
from .schreier import FRONTIER_EXIT, Window, trace

SATISFIED = "SATISFIED"


# --- decomposition data -------------------------------------------------------

@dataclass(frozen=True)
class TranslatingSets:
    """The two word lists whose translates must cover the space.

    Sizes at least 2 make a genuine decomposition; duplicates are legal
    (a certificate may use {1, b, c} with b = c).
    """

    s1: tuple
    s2: tuple

    @staticmethod
    def make(s1: Iterable[Word], s2: Iterable[Word]) -> "TranslatingSets":
        return TranslatingSets(tuple(tuple(w) for w in s1),
                               tuple(tuple(w) for w in s2))

    def to_json(self, alphabet=None) -> dict:
        def f(w):
            return alphabet.format(w) if alphabet is not None else list(w)

        return {"S1": [f(w) for w in self.s1], "S2": [f(w) for w in self.s2]}


def piece_tags(sets: TranslatingSets) -> list:
    return ([f"P{i + 1}" for i in range(len(sets.s1))]
            + [f"Q{j + 1}" for j in range(len(sets.s2))])


@dataclass(frozen=True)
class Decomposition:
    """Tagged pieces over a window, one vertex set per piece tag.

    ``pieces`` maps tags ("P1".."Pm", "Q1".."Qn") to vertex sets; a tag may
    be absent (empty piece).  Disjointness is a verified property, not a
    construction guarantee.
    """

    sets: TranslatingSets
    pieces: dict

    def tag_of(self, v: int) -> Optional[str]:
        for tag, vs in self.pieces.items():
            if v in vs:
                return tag
        return None

    def to_json(self, alphabet=None) -> dict:
        return {
            "kind": "decomposition",
            "sets": self.sets.to_json(alphabet),
            "pieces": {tag: sorted(vs) for tag, vs in sorted(self.pieces.items())},
        }


def make_decomposition(sets: TranslatingSets, pieces: dict) -> Decomposition:
    clean = {}
    tags = set(piece_tags(sets))
    for tag, vs in pieces.items():
        if tag not in tags:
            raise ShapeError(f"unknown piece tag {tag!r}")
        clean[tag] = frozenset(vs)
    return Decomposition(sets=sets, pieces=clean)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    problems: tuple
    checked: int
    unverifiable: int

    def to_json(self) -> dict:
        return {"kind": "decomposition-verdict", "ok": self.ok,
                "problems": list(self.problems), "checked": self.checked,
                "unverifiable": self.unverifiable}


def verify_decomposition(window: Window, d: Decomposition) -> VerifyReport:
    """Check disjointness and translate-covering on interior vertices.

    For every interior vertex v there must be some i with v·gᵢ⁻¹ ∈ Pᵢ and
    some j with v·hⱼ⁻¹ ∈ Qⱼ.  A vertex none of whose surviving translates
    covers it, but at least one of whose translates left the window, is
    counted unverifiable instead of failed.  Pieces need not cover the
    window and representatives may stay untagged.
    """
    problems: List[str] = []
    n = window.n_vertices
    for tag, vs in sorted(d.pieces.items()):
        for v in vs:
            if not (0 <= v < n):
                raise ShapeError(f"piece {tag} references unknown vertex {v}")

    tags = sorted(d.pieces.keys())
    for i, t1 in enumerate(tags):
        for t2 in tags[i + 1:]:
            overlap = d.pieces[t1] & d.pieces[t2]
            if overlap:
                problems.append(
                    f"pieces {t1} and {t2} overlap on {sorted(overlap)[:4]}")

    unverifiable = 0
    checked = 0

    def covered(v: int, words: Sequence[Word], prefix: str) -> Optional[bool]:
        exited = False
        for i, g in enumerate(words):
            t = trace(window, v, inv(g))
            if t == FRONTIER_EXIT:
                exited = True
                continue
            if t in d.pieces.get(f"{prefix}{i + 1}", ()):
                return True
        return None if exited else False

    for v in window.interior():
        checked += 1
        for words, prefix, side in ((d.sets.s1, "P", "P"), (d.sets.s2, "Q", "Q")):
            got = covered(v, words, prefix)
            if got is None:
                unverifiable += 1
            elif not got:
                problems.append(f"vertex {v} not covered by {side}-translates")
    return VerifyReport(ok=not problems, problems=tuple(problems),
                        checked=checked, unverifiable=unverifiable)


# --- the classical free decomposition -----------------------------------------

def free_action_decomposition(window: Window, x: Word, y: Word,
                              within: Optional[Iterable[int]] = None
                              ) -> Decomposition:
    """Classical 4-piece decomposition for a free action of ⟨x, y⟩.

    Every orbit inside the window picks its shortlex-least vertex as
    representative; each vertex is addressed as rep·w with w reduced over
    {x, y} and tagged by the last letter of w (x: P1, x⁻¹: P2, y: Q1,
    y⁻¹: Q2; the representative itself stays untagged).  Translating sets
    are {1, x} and {1, y}.  Finding two addresses for one vertex means a
    nontrivial short stabilizer: FreenessViolation with the witness word.

    ``within`` confines the addressing to a subset of vertices closed
    under the resolved moves; the action may do anything outside it.
    """
    x = reduce_word(x)
    y = reduce_word(y)
    if not x or not y:
        raise ShapeError("translating generators must be nontrivial")
    moves = (x, inv(x), y, inv(y))

    n = window.n_vertices
    allowed = None if within is None else frozenset(within)
    address: Dict[int, tuple] = {}
    owner: Dict[int, int] = {}
    roots = range(n) if allowed is None else sorted(allowed)
    for v in roots:
        if v in address:
            continue
        address[v] = ()
        owner[v] = v
        queue = deque([v])
        while queue:
            u = queue.popleft()
            addr = address[u]
            for code, move in enumerate(moves):
                if addr and code == addr[-1] ^ 1:
                    continue
                t = trace(window, u, move)
                if t == FRONTIER_EXIT or (allowed is not None
                                          and t not in allowed):
                    continue
                new = addr + (code,)
                if t in address:
                    old = address[t]
                    if old != new and owner[t] == v:
                        stab = reduce_word(_meta_to_word(new, moves)
                                           + inv(_meta_to_word(old, moves)))
                        if stab:
                            raise FreenessViolation(
                                f"vertex {v} is fixed by a nontrivial word",
                                witness=(v, stab))
                        raise FreenessViolation(
                            "translating words satisfy a relation",
                            witness=(v, stab))
                    continue
                address[t] = new
                owner[t] = v
                queue.append(t)

    tag_by_last = {0: "P1", 1: "P2", 2: "Q1", 3: "Q2"}
    pieces: Dict[str, set] = {"P1": set(), "P2": set(), "Q1": set(), "Q2": set()}
    for v, addr in address.items():
        if addr:
            pieces[tag_by_last[addr[-1]]].add(v)
    sets = TranslatingSets.make([(), x], [(), y])
    return make_decomposition(sets, pieces)


def _meta_to_word(addr: tuple, moves: tuple) -> Word:
    out: Word = ()
    for code in addr:
        out = mul(out, moves[code])
    return out


# --- Hall condition ------------------------------------------------------------

@dataclass(frozen=True)
class HallViolation:
    """A verified failure of the two-set matching condition.

    ``a1`` and ``a2`` are finite sets (window vertices, orbit points, or
    lattice vectors, per ``space``) with |A1·S1⁻¹ ∪ A2·S2⁻¹| = unionSize
    strictly below required = |A1| + |A2|; every translate resolved.
    """

    a1: frozenset
    a2: frozenset
    union_size: int
    required: int
    space: str = "window"

    def __post_init__(self):
        if self.union_size >= self.required:
            raise InvariantViolation("violation fails its own inequality")

    def to_json(self) -> dict:
        def key(s):
            try:
                return sorted(s)
            except TypeError:
                return sorted(s, key=repr)

        return {"kind": "hall_violation", "space": self.space,
                "A1": key(self.a1), "A2": key(self.a2),
                "unionSize": self.union_size, "required": self.required}


def _resolved_translates(window: Window, pool: Sequence[int],
                         words: Sequence[Word]) -> Dict[int, list]:
    out: Dict[int, list] = {}
    for v in pool:
        row = []
        for s in words:
            t = trace(window, v, inv(s))
            if t == FRONTIER_EXIT:
                raise UnresolvedTranslate(
                    f"translate of vertex {v} leaves the window")
            row.append(t)
        out[v] = row
    return out


def hall_check(window: Window, ts: TranslatingSets, pool: Sequence[int]):
    """SATISFIED, or a deficient pair extracted from a maximum matching.

    Two tagged copies of the pool form the left side of a bipartite graph
    (copy i adjacent to the Sᵢ⁻¹-translates); a left-saturating matching
    means the condition holds for every subset pair of this pool.  When
    the matching is deficient, alternating reachability from the exposed
    vertices yields (A1, A2) whose inequality is re-verified from scratch.
    """
    pool = sorted(set(pool))
    for v in pool:
        if v in window.frontier:
            raise ShapeError(f"pool vertex {v} is not interior")
    t1 = _resolved_translates(window, pool, ts.s1)
    t2 = _resolved_translates(window, pool, ts.s2)

    left = [(1, v) for v in pool] + [(2, v) for v in pool]
    adj = [sorted(set(t1[v])) if side == 1 else sorted(set(t2[v]))
           for side, v in left]
    match_l, match_r = _hopcroft_karp(len(left), adj)

    exposed = [i for i in range(len(left)) if match_l[i] < 0]
    if not exposed:
        return SATISFIED

    seen_l, seen_r = _alternating_reach(adj, match_l, match_r, exposed)
    a1 = frozenset(v for i, (side, v) in enumerate(left)
                   if seen_l[i] and side == 1)
    a2 = frozenset(v for i, (side, v) in enumerate(left)
                   if seen_l[i] and side == 2)

    union = set()
    for v in a1:
        union.update(t1[v])
    for v in a2:
        union.update(t2[v])
    required = len(a1) + len(a2)
    if len(union) >= required:
        raise InvariantViolation("deficient set failed arithmetic re-check")
    return HallViolation(a1=a1, a2=a2, union_size=len(union),
                         required=required, space="window")


def _hopcroft_karp(n_left: int, adj: List[list]):
    """Maximum bipartite matching; right vertices are arbitrary hashables."""
    match_l = [-1] * n_left
    match_r: dict = {}
    INF = float("inf")

    def bfs():
        dist = [INF] * n_left
        queue = deque()
        for i in range(n_left):
            if match_l[i] < 0:
                dist[i] = 0
                queue.append(i)
        found = False
        while queue:
            i = queue.popleft()
            for r in adj[i]:
                j = match_r.get(r, -1)
                if j < 0:
                    found = True
                elif dist[j] == INF:
                    dist[j] = dist[i] + 1
                    queue.append(j)
        return dist, found

    def dfs(i, dist):
        for r in adj[i]:
            j = match_r.get(r, -1)
            if j < 0 or (dist[j] == dist[i] + 1 and dfs(j, dist)):
                match_l[i] = r
                match_r[r] = i
                return True
        dist[i] = float("inf")
        return False

    while True:
        dist, found = bfs()
        if not found:
            break
        for i in range(n_left):
            if match_l[i] < 0:
                dfs(i, dist)
    ml = match_l
    return ml, match_r


def _alternating_reach(adj, match_l, match_r, exposed):
    """Vertices reachable from exposed left vertices along alternating
    paths (non-matching edges left-to-right, matching edges back)."""
    seen_l = [False] * len(adj)
    seen_r = set()
    queue = deque()
    for i in exposed:
        seen_l[i] = True
        queue.append(i)
    while queue:
        i = queue.popleft()
        for r in adj[i]:
            if match_l[i] == r:
                continue
            if r not in seen_r:
                seen_r.add(r)
                j = match_r.get(r, -1)
                if j >= 0 and not seen_l[j]:
                    seen_l[j] = True
                    queue.append(j)
    return seen_l, seen_r


def exhaustive_hall_search(window: Window, ts: TranslatingSets,
                           pool: Sequence[int]):
    """Brute-force minimum over all subset pairs of the pool; pools of at
    most 12 vertices.  SATISFIED or a HallViolation; used to spot-check
    the matching verdict."""
    pool = sorted(set(pool))
    if len(pool) > 12:
        raise ShapeError("exhaustive search is limited to pools of size 12")
    t1 = _resolved_translates(window, pool, ts.s1)
    t2 = _resolved_translates(window, pool, ts.s2)

    universe: Dict[int, int] = {}
    for row in list(t1.values()) + list(t2.values()):
        for t in row:
            if t not in universe:
                universe[t] = len(universe)
    if len(universe) > 63:
        raise ShapeError("translate universe too large for bitmask search")

    def mask_of(row):
        m = 0
        for t in row:
            m |= 1 << universe[t]
        return m

    m1 = [mask_of(t1[v]) for v in pool]
    m2 = [mask_of(t2[v]) for v in pool]
    k = len(pool)

    import numpy as np

    u1 = np.zeros(1 << k, dtype=np.uint64)
    u2 = np.zeros(1 << k, dtype=np.uint64)
    for sub in range(1, 1 << k):
        low = sub & -sub
        i = low.bit_length() - 1
        u1[sub] = u1[sub ^ low] | np.uint64(m1[i])
        u2[sub] = u2[sub ^ low] | np.uint64(m2[i])
    size = np.array([bin(s).count("1") for s in range(1 << k)], dtype=np.int64)

    best = None
    for sub1 in range(1 << k):
        union = np.bitwise_or(np.uint64(u1[sub1]), u2)
        cnt = np.bitwise_count(union).astype(np.int64)
        deficit = cnt - size[sub1] - size
        j = int(np.argmin(deficit))
        if deficit[j] < 0 and (best is None or deficit[j] < best[0]):
            best = (int(deficit[j]), sub1, j)
    if best is None:
        return SATISFIED
    _, sub1, sub2 = best
    a1 = frozenset(pool[i] for i in range(k) if sub1 >> i & 1)
    a2 = frozenset(pool[i] for i in range(k) if sub2 >> i & 1)
    union = set()
    for v in a1:
        union.update(t1[v])
    for v in a2:
        union.update(t2[v])
    return HallViolation(a1=a1, a2=a2, union_size=len(union),
                         required=len(a1) + len(a2), space="window")


# --- doubling ------------------------------------------------------------------

def doubling_check(window: Window, s_words: Sequence[Word],
                   a_set: Iterable[int]) -> bool:
    """Whether |A·S⁻¹ ∪ A| >= 2|A| for this particular interior set."""
    a_set = set(a_set)
    for v in a_set:
        if v in window.frontier:
            raise ShapeError(f"set vertex {v} is not interior")
    out = set(a_set)
    for v in a_set:
        for s in s_words:
            t = trace(window, v, inv(s))
            if t == FRONTIER_EXIT:
                raise UnresolvedTranslate(
                    f"translate of vertex {v} leaves the window")
            out.add(t)
    return len(out) >= 2 * len(a_set)


@dataclass(frozen=True)
class DoublingCert:
    """A global forest whose interior vertices keep two incoming labeled
    edges; this forces |A·S⁻¹ ∪ A| >= 2|A| for every interior A (the
    subgraph spanned by A and its translates has more vertices than edges
    but at least 2|A| edges)."""

    forest: frozenset  # geometric (u, letter, w) edges, even-letter direction
    indegree_table: dict

    def to_json(self) -> dict:
        return {"kind": "doubling_cert",
                "forestEdges": sorted(self.forest),
                "minInteriorIndegree": min(self.indegree_table.values(),
                                           default=0),
                "indegreeTable": {str(v): c for v, c in
                                  sorted(self.indegree_table.items())}}


def forest_doubling_cert(window: Window, s_words: Sequence[Word],
                         sparse_trees: Sequence = ()) -> DoublingCert:
    """Assemble the window forest and certify two incoming edges apiece.

    The forest is every geometric window edge minus the edges removed by
    the per-automaton thinning certificates (whose removed edges must
    already be expressed as window vertex pairs).  Verified here: no
    loops, global acyclicity, and indegree ≥ 2 at every interior vertex,
    counting incoming directed edges labeled by elements of S.
    """
    s_letters = set()
    for s in s_words:
        w = reduce_word(s)
        if len(w) != 1:
            raise ShapeError("doubling labels must be single letters")
        s_letters.add(w[0])

    removed = set()
    for cert in sparse_trees:
        for (u, d, w) in cert.removed_edges:
            removed.add((u, d, w))
            removed.add((w, d ^ 1, u))

    edges = []
    for v in range(window.n_vertices):
        for d in range(0, 2 * window.rank, 2):
            t = window.trans[v][d]
            if t < 0:
                continue
            if t == v:
                raise InvariantViolation(
                    f"loop at vertex {v}; certificate fails")
            if (v, d, t) in removed:
                continue
            edges.append((v, d, t))

    parent = list(range(window.n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (u, d, w) in edges:
        ru, rw = find(u), find(w)
        if ru == rw:
            raise InvariantViolation(
                f"cycle through edge ({u},{d},{w}); certificate fails")
        parent[ru] = rw

    indeg = {v: 0 for v in window.interior()}
    for (u, d, w) in edges:
        if w in indeg and d in s_letters:
            indeg[w] += 1
        if u in indeg and (d ^ 1) in s_letters:
            indeg[u] += 1

    bad = [v for v, c in indeg.items() if c < 2]
    if bad:
        raise InvariantViolation(
            f"interior vertex {bad[0]} keeps only {indeg[bad[0]]} incoming "
            "labeled edges; certificate fails")
    return DoublingCert(forest=frozenset(edges), indegree_table=indeg)


# --- abelian box violations ------------------------------------------------------

def folner_violation(s1_vecs: Sequence[tuple], s2_vecs: Sequence[tuple],
                     m_max: int = 64) -> HallViolation:
    """First box A = [0, M)^k with |A−S1 ∪ A−S2| < 2|A| in Z^k.

    Realizes non-paradoxicality of abelian quotients as a finite
    certificate: the returned violation uses A1 = A2 = A.  Raises NotFound
    past m_max (a budget artifact, not a disproof).
    """
    s1 = [tuple(v) for v in s1_vecs]
    s2 = [tuple(v) for v in s2_vecs]
    if not s1 or not s2:
        raise ShapeError("translating vector sets must be nonempty")
    k = len(s1[0])
    if k < 1 or any(len(v) != k for v in s1 + s2):
        raise ShapeError("inconsistent vector dimension")

    for m in range(1, m_max + 1):
        box = list(_box(k, m))
        union = set()
        for a in box:
            for s in s1:
                union.add(tuple(x - y for x, y in zip(a, s)))
            for s in s2:
                union.add(tuple(x - y for x, y in zip(a, s)))
        required = 2 * len(box)
        if len(union) < required:
            a = frozenset(box)
            return HallViolation(a1=a, a2=a, union_size=len(union),
                                 required=required, space="lattice")
    raise NotFound(f"no violating box up to side {m_max}")


def _box(k: int, m: int):
    if k == 0:
        yield ()
        return
    for rest in _box(k - 1, m):
        for x in range(m):
            yield rest + (x,)


# --- power-cycle certificate -----------------------------------------------------

def power_cycle_violation(a: Word, b: Word, c: Word, r: int,
                          rank: Optional[int] = None):
    """Hall violation on the coset space of ⟨aʳ, (aᵇ)ʳ, (aᶜ)ʳ⟩.

    The core consists of the base vertex o with an a-power cycle of length
    r, plus b- and c-conjugated copies (coinciding when b = c).  The set
    A1 = o·{aʲ, b⁻¹aʲ, c⁻¹aʲ} is closed under a⁻¹, and A2 = {o} has its
    three S2-translates inside A1, so with S1 = {1, a} and S2 = {1, b, c}
    the union has |A1| elements against the required |A1| + 1.  Returns
    (core, A1, A2, HallViolation); degenerate inputs that break the
    three-cycle shape raise ShapeError.
    """
    a, b, c = reduce_word(a), reduce_word(b), reduce_word(c)
    if r < 1:
        raise ShapeError("cycle length must be at least 1")
    if not a:
        raise ShapeError("a must be nontrivial")
    need = max((d >> 1 for w in (a, b, c) for d in w), default=0) + 1
    if rank is None:
        rank = need
    if rank < need:
        raise ShapeError("declared rank below the letters used")

    ar = reduce_word(a * r)
    gens = [ar, mul(inv(b), ar, b), mul(inv(c), ar, c)]
    core = core_graph(rank, gens)

    def at(word: Word) -> int:
        v = core.trace(word)
        if v is None:
            raise InvariantViolation("core trace left the graph")
        return v

    prefixes = [(), inv(b), inv(c)]
    cycles = []
    for pre in prefixes:
        cyc = []
        for j in range(r):
            cyc.append(at(reduce_word(mul(pre, a * j))))
        cycles.append(cyc)

    for cyc in cycles:
        if len(set(cyc)) != r:
            raise ShapeError(
                f"a-power cycle has {len(set(cyc))} distinct vertices, "
                f"expected {r}")
    same_bc = set(cycles[1]) == set(cycles[2])
    expected = 2 * r if (b == c or same_bc) else 3 * r
    a1 = frozenset(v for cyc in cycles for v in cyc)
    if len(a1) != expected:
        raise ShapeError(
            f"cycles overlap: {len(a1)} vertices, expected {expected}")
    if not same_bc and (set(cycles[0]) & set(cycles[1])
                        or set(cycles[0]) & set(cycles[2])
                        or set(cycles[1]) & set(cycles[2])):
        raise ShapeError("cycles are not pairwise disjoint")

    shifted = {at(reduce_word(mul(pre, a * j, inv(a))))
               for pre in prefixes for j in range(r)}
    if shifted != a1:
        raise ShapeError("A1 is not closed under the a-translate")

    a2 = frozenset([0])
    union = set(a1)
    for s in ((), b, c):
        union.add(at(inv(s)))
    violation = HallViolation(
        a1=a1, a2=a2, union_size=len(union), required=len(a1) + 1,
        space="core")
    return core, a1, a2, violation


# --- transport -------------------------------------------------------------------

def shift_sets(ts: TranslatingSets, g1: Word, g2: Word) -> TranslatingSets:
    """Right-translate both sets: a decomposition for (S1, S2) is one for
    (S1 g1, S2 g2) after shifting the pieces accordingly."""
    return TranslatingSets.make([mul(s, g1) for s in ts.s1],
                                [mul(s, g2) for s in ts.s2])


def restrict_to_orbit(d: Decomposition, orbit: Iterable[int]) -> Decomposition:
    orbit = frozenset(orbit)
    return Decomposition(
        sets=d.sets,
        pieces={tag: vs & orbit for tag, vs in d.pieces.items()})


def combine_orbits(parts: Sequence[Decomposition]) -> Decomposition:
    """Union of decompositions over pairwise disjoint action-closed orbits."""
    if not parts:
        raise ShapeError("nothing to combine")
    sets = parts[0].sets
    for p in parts[1:]:
        if p.sets != sets:
            raise ShapeError("translating sets differ between orbits")
    support = []
    pieces: Dict[str, set] = {}
    for p in parts:
        sup = set()
        for tag, vs in p.pieces.items():
            pieces.setdefault(tag, set()).update(vs)
            sup |= vs
        support.append(sup)
    for i in range(len(support)):
        for j in range(i + 1, len(support)):
            both = support[i] & support[j]
            if both:
                raise ShapeError(
                    f"orbit supports {i} and {j} overlap on {sorted(both)[:4]}")
    return Decomposition(sets=sets, pieces={t: frozenset(v)
                                            for t, v in pieces.items()})


def lift(d: Decomposition, fmap: dict, source: Window,
         target: Window) -> Decomposition:
    """Pull a decomposition back along an equivariant vertex map.

    ``fmap`` sends source-window vertices to target-window vertices and
    must commute with every letter transition on source interiors; a
    vertex where it does not is returned as the NonEquivariantMap witness.
    The lifted pieces are the fmap-preimages of the originals.
    """
    for v in source.interior():
        if v not in fmap:
            raise ShapeError(f"map undefined on interior vertex {v}")
        for dl in range(2 * source.rank):
            t = source.trans[v][dl]
            if t < 0 or t not in fmap:
                continue
            img = target.trans[fmap[v]][dl]
            if img < 0:
                continue
            if img != fmap[t]:
                raise NonEquivariantMap(
                    f"map does not commute with letter {dl} at vertex {v}",
                    witness=(v, dl))

    pieces: Dict[str, set] = {tag: set() for tag in d.pieces}
    for v, fv in fmap.items():
        for tag, vs in d.pieces.items():
            if fv in vs:
                pieces[tag].add(v)
    return Decomposition(sets=d.sets,
                         pieces={t: frozenset(v) for t, v in pieces.items()})
