"""Folded core graphs for finitely generated subgroups of free groups.

A subgroup is carried by its core: the folded, trimmed, base-connected
graph whose edges are labeled by letters (see freewords.py for letter codes).
Membership, rank, index, intersections and conjugates all read off the
core. The same row format (vertex -> tuple of targets, -1 for absent) is
shared with the partial action windows in schreier.py, so the subgraph
utilities at the bottom work on both.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    AlphabetMismatch,
    FiniteIndexError,
    GreedyStuck,
    InvariantViolation,
    ShapeError,
)
from .freewords import Word, inv, mul, reduce_word


@dataclass(frozen=True)
class CoreGraph:
    """Folded, trimmed letter graph with base vertex 0.

    trans[v][d] is the vertex reached from v along letter d, -1 if absent.
    Vertices are numbered by BFS from the base with letters in code order,
    so equal subgroups yield identical objects.
    """

    rank: int
    trans: tuple

    @property
    def nv(self) -> int:
        return len(self.trans)

    def trace(self, word, start: int = 0) -> Optional[int]:
        v = start
        for d in word:
            w = self.trans[v][d]
            if w < 0:
                return None
            v = w
        return v

    def member(self, word) -> bool:
        return self.trace(reduce_word(word)) == 0

    def out_degree(self, v: int) -> int:
        return sum(1 for w in self.trans[v] if w >= 0)

    def degree(self, v: int) -> int:
        """Incident geometric edges; a loop counts once."""
        row = self.trans[v]
        loops = sum(1 for w in row if w == v)
        return self.out_degree(v) - loops // 2

    def incoming_labels(self, v: int) -> set:
        """Letters read by some edge that enters v (directed sense)."""
        return {d ^ 1 for d, w in enumerate(self.trans[v]) if w >= 0}

    def graph_rank(self) -> int:
        ne2 = sum(1 for row in self.trans for w in row if w >= 0)
        return ne2 // 2 - self.nv + 1

    def index(self) -> Optional[int]:
        """Group-theoretic index; None when infinite. Finite exactly when
        every letter acts everywhere, and then it equals the vertex count."""
        full = 2 * self.rank
        for row in self.trans:
            if sum(1 for w in row if w >= 0) != full:
                return None
        return self.nv

    def geometric_edges(self):
        """Each edge once, in its even-letter direction, sorted."""
        out = []
        for v, row in enumerate(self.trans):
            for d in range(0, 2 * self.rank, 2):
                if row[d] >= 0:
                    out.append((v, d, row[d]))
        return out


class _Builder:
    """Union-find folding of a letter graph under construction."""

    def __init__(self, rank: int):
        self.rank = rank
        self.parent: list = []
        self.out: list = []
        self.queue: list = []

    def vertex(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        p = self.parent
        while p[v] != v:
            p[v] = p[p[v]]
            v = p[v]
        return v

    def add_edge(self, u: int, d: int, w: int) -> None:
        u, w = self.find(u), self.find(w)
        self._set(u, d, w)
        self._set(self.find(w), d ^ 1, self.find(u))
        self._drain()

    def _set(self, u: int, d: int, w: int) -> None:
        t = self.out[u].get(d)
        if t is None:
            self.out[u][d] = w
        else:
            self.queue.append((t, w))

    def _drain(self) -> None:
        while self.queue:
            a, b = self.queue.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if len(self.out[a]) < len(self.out[b]):
                a, b = b, a
            self.parent[b] = a
            merged = self.out[b]
            self.out[b] = {}
            for d, t in merged.items():
                cur = self.out[a].get(d)
                if cur is None:
                    self.out[a][d] = t
                else:
                    self.queue.append((cur, t))


def _extract(b: _Builder, base: int, trim: bool = True):
    """Reachable part from base, trimmed and relabeled canonically.

    Returns (core, index) where index maps builder roots to new ids.
    """
    base = b.find(base)
    adj = {}
    seen = {base}
    dq = deque([base])
    while dq:
        v = dq.popleft()
        row = {d: b.find(t) for d, t in b.out[v].items()}
        adj[v] = row
        for t in row.values():
            if t not in seen:
                seen.add(t)
                dq.append(t)

    if trim:
        dq = deque(v for v in adj if v != base and len(adj[v]) <= 1)
        while dq:
            v = dq.popleft()
            if v == base or v not in adj or len(adj[v]) > 1:
                continue
            row = adj.pop(v)
            for d, t in row.items():
                if t in adj:
                    del adj[t][d ^ 1]
                    if len(adj[t]) <= 1 and t != base:
                        dq.append(t)

    index = {base: 0}
    order = [base]
    dq = deque([base])
    while dq:
        v = dq.popleft()
        for d in range(2 * b.rank):
            t = adj[v].get(d)
            if t is not None and t not in index:
                index[t] = len(order)
                order.append(t)
                dq.append(t)
    trans = tuple(
        tuple(index[adj[v][d]] if d in adj[v] else -1 for d in range(2 * b.rank))
        for v in order
    )
    return CoreGraph(b.rank, trans), index


def core_graph(rank: int, words) -> CoreGraph:
    """Core of the subgroup generated by the given words."""
    b = _Builder(rank)
    base = b.vertex()
    for w in words:
        w = reduce_word(w)
        prev = base
        for i, d in enumerate(w):
            if i == len(w) - 1:
                b.add_edge(prev, d, base)
            else:
                nxt = b.vertex()
                b.add_edge(prev, d, nxt)
                prev = nxt
    core, _ = _extract(b, base)
    return core


def core_from_edges(rank: int, n_vertices: int, edges, base: int = 0,
                    trim: bool = True):
    """Fold an explicit edge list (u, letter, w) into a core.

    Returns (core, mapping) where mapping sends input vertex ids to new ids
    (None for vertices trimmed away or unreachable from the base).
    """
    b = _Builder(rank)
    for _ in range(n_vertices):
        b.vertex()
    for u, d, w in edges:
        b.add_edge(u, d, w)
    core, index = _extract(b, base, trim=trim)
    mapping = {v: index.get(b.find(v)) for v in range(n_vertices)}
    return core, mapping


def conjugate_core(core: CoreGraph, g) -> CoreGraph:
    """Core of g^-1 H g given the core of H."""
    b = _Builder(core.rank)
    for _ in range(core.nv):
        b.vertex()
    for v, d, w in core.geometric_edges():
        b.add_edge(v, d, w)
    stem = inv(reduce_word(g))
    cur = 0
    if stem:
        cur = b.vertex()
        new_base = cur
        for i, d in enumerate(stem):
            if i == len(stem) - 1:
                b.add_edge(cur, d, 0)
            else:
                nxt = b.vertex()
                b.add_edge(cur, d, nxt)
                cur = nxt
        out, _ = _extract(b, new_base)
        return out
    out, _ = _extract(b, 0)
    return out


def intersect(c1: CoreGraph, c2: CoreGraph) -> CoreGraph:
    """Core of the intersection, via the pullback of the two cores."""
    if c1.rank != c2.rank:
        raise AlphabetMismatch("cores over different ranks")
    pairs = {(0, 0): 0}
    order = [(0, 0)]
    edges = []
    dq = deque([(0, 0)])
    while dq:
        a, b2 = dq.popleft()
        u = pairs[(a, b2)]
        for d in range(2 * c1.rank):
            ta = c1.trans[a][d]
            tb = c2.trans[b2][d]
            if ta < 0 or tb < 0:
                continue
            key = (ta, tb)
            if key not in pairs:
                pairs[key] = len(order)
                order.append(key)
                dq.append(key)
            if d % 2 == 0:
                edges.append((u, d, pairs[key]))
    core, _ = core_from_edges(c1.rank, len(order), edges, base=0)
    return core


# --- abelianization --------------------------------------------------------

class AbelianMap:
    """Coordinates of subgroup elements in the abelianized subgroup.

    One basis coordinate per geometric edge outside a fixed BFS spanning
    tree of the core. loop_vector(w) is the image in Z^k of the element the
    closed word w traces; it only accumulates signs on non-tree edges, so
    conjugating the basepoint does not change it.
    """

    def __init__(self, core: CoreGraph):
        self.core = core
        tree = set()
        seen = {0}
        dq = deque([0])
        while dq:
            v = dq.popleft()
            for d in range(2 * core.rank):
                w = core.trans[v][d]
                if w >= 0 and w not in seen:
                    seen.add(w)
                    tree.add((v, d))
                    tree.add((w, d ^ 1))
                    dq.append(w)
        basis = []
        step_index = {}
        for u, d, w in core.geometric_edges():
            if (u, d) in tree:
                continue
            i = len(basis)
            basis.append((u, d, w))
            step_index[(u, d)] = (i, 1)
            step_index[(w, d ^ 1)] = (i, -1)
        self.basis = tuple(basis)
        self.rank_ab = len(basis)
        self._step = step_index

    def step(self, v: int, d: int):
        """(coordinate, sign) when (v, d) crosses a non-tree edge, else None."""
        return self._step.get((v, d))

    def path_vector(self, word, start: int = 0):
        """(end vertex, accumulated vector); None if the trace leaves."""
        v = start
        vec = [0] * self.rank_ab
        for d in word:
            w = self.core.trans[v][d]
            if w < 0:
                return None
            s = self._step.get((v, d))
            if s is not None:
                vec[s[0]] += s[1]
            v = w
        return v, tuple(vec)

    def loop_vector(self, word, start: int = 0):
        got = self.path_vector(word, start)
        if got is None:
            raise ShapeError("word leaves the core")
        v, vec = got
        if v != start:
            raise ShapeError("word does not close up")
        return vec

    def member_commutator_subgroup(self, word) -> bool:
        """Does the word lie in the commutator subgroup of the carried group?"""
        if not self.core.member(word):
            return False
        return not any(self.loop_vector(reduce_word(word)))


# --- letter-restricted subgraph analysis -----------------------------------

def closed_letters(letters) -> tuple:
    out = set()
    for d in letters:
        out.add(d)
        out.add(d ^ 1)
    return tuple(sorted(out))


def _components(rows, letters, vertices):
    """Yield (root, tree_words, tree_pairs) per component of the restricted
    subgraph; tree_words maps vertex -> reduced word from root."""
    letters = closed_letters(letters)
    seen = set()
    for root in vertices:
        if root in seen:
            continue
        tree_words = {root: ()}
        tree_pairs = set()
        seen.add(root)
        dq = deque([root])
        while dq:
            v = dq.popleft()
            for d in letters:
                w = rows[v][d]
                if w < 0:
                    continue
                if w not in tree_words:
                    tree_words[w] = tree_words[v] + (d,)
                    tree_pairs.add((v, d))
                    tree_pairs.add((w, d ^ 1))
                    seen.add(w)
                    dq.append(w)
        yield root, tree_words, tree_pairs


def _nontree_edges(rows, letters, tree_words, tree_pairs):
    out = []
    letters = closed_letters(letters)
    for v in tree_words:
        for d in letters:
            if d % 2:
                continue
            w = rows[v][d]
            if w >= 0 and w in tree_words and (v, d) not in tree_pairs:
                out.append((v, d, w))
    out.sort()
    return out


def _cycle_word(tree_words, edge) -> Word:
    a, d, b = edge
    w = reduce_word(tree_words[a] + (d,) + inv(tree_words[b]))
    if not w:
        raise InvariantViolation("restricted cycle reduced to nothing")
    return w


@dataclass(frozen=True)
class ForestReport:
    """Outcome of a letter-restricted acyclicity test.

    components lists (root, cycle_rank) pairs; witness, when present, is a
    (vertex, reduced word) pair tracing a nontrivial cycle at that vertex.
    """

    ok: bool
    witness: Optional[tuple]
    components: tuple


def subgroup_letters_forest_test(core_or_rows, letters,
                                 vertices=None) -> ForestReport:
    """Is the subgraph on the given letters a forest?

    A cycle is a reduced word over the letters fixing a vertex; its absence
    certifies that no nontrivial word in the letters stabilizes anything.
    """
    rows = getattr(core_or_rows, "trans", core_or_rows)
    if vertices is None:
        vertices = range(len(rows))
    comps = []
    witness = None
    for root, tree_words, tree_pairs in _components(rows, letters, vertices):
        nontree = _nontree_edges(rows, letters, tree_words, tree_pairs)
        comps.append((root, len(nontree)))
        if nontree and witness is None:
            witness = (root, _cycle_word(tree_words, nontree[0]))
    return ForestReport(witness is None, witness, tuple(comps))


def gamma2_forest_test(core: CoreGraph, letters, am: Optional[AbelianMap] = None,
                       vertices=None) -> ForestReport:
    """Does any nontrivial word over the letters fix a coset of the
    commutator subgroup of the carried group?

    Restricted component with cycle rank r fails exactly when r >= 2, or
    r = 1 and the fundamental cycle has zero abelianized vector: cycles at a
    vertex form a free group mapping to Z^k by the abelianized holonomy, and
    that map has nontrivial kernel precisely in those cases. Holonomy is
    basepoint-independent, so one test covers every fiber over the vertex.
    """
    if am is None:
        am = AbelianMap(core)
    rows = core.trans
    if vertices is None:
        vertices = range(len(rows))
    comps = []
    witness = None
    for root, tree_words, tree_pairs in _components(rows, letters, vertices):
        nontree = _nontree_edges(rows, letters, tree_words, tree_pairs)
        r = len(nontree)
        comps.append((root, r))
        if witness is not None:
            continue
        if r == 1:
            cyc = _cycle_word(tree_words, nontree[0])
            if not any(am.loop_vector(cyc, start=root)):
                witness = (root, cyc)
        elif r >= 2:
            c1 = _cycle_word(tree_words, nontree[0])
            c2 = _cycle_word(tree_words, nontree[1])
            w = reduce_word(mul(inv(c1), inv(c2), c1, c2))
            if not w:
                raise InvariantViolation("independent cycles commuted")
            witness = (root, w)
    return ForestReport(witness is None, witness, tuple(comps))


def find_j(core: CoreGraph, choices, am: Optional[AbelianMap] = None):
    """First label whose letter set passes gamma2_forest_test, else None.

    choices: iterable of (label, letters).
    """
    if am is None:
        am = AbelianMap(core)
    for label, letters in choices:
        if gamma2_forest_test(core, letters, am).ok:
            return label
    return None


def has_loops(core_or_rows) -> bool:
    rows = getattr(core_or_rows, "trans", core_or_rows)
    return any(w == v for v, row in enumerate(rows) for w in row)


def find_short_cycle(core_or_rows, letters, max_len: int, vertices=None):
    """Some (vertex, reduced word) cycle of length <= max_len in the
    letter-restricted subgraph, or None if the girth exceeds max_len.

    Multigraph cases first (loop -> length 1, parallel edges -> 2), then the
    standard per-root BFS collision scan, which realizes the girth of a
    simple graph. The returned cycle is the shortest one found.
    """
    rows = getattr(core_or_rows, "trans", core_or_rows)
    letters = closed_letters(letters)
    if vertices is None:
        vertices = range(len(rows))
    vset = set(vertices)

    for v in vertices:
        for d in letters:
            if rows[v][d] == v:
                return (v, (d,))
    parallel = {}
    for v in vertices:
        for d in letters:
            if d % 2:
                continue
            w = rows[v][d]
            if w >= 0 and w in vset and w != v:
                key = (min(v, w), max(v, w))
                prev = parallel.get(key)
                if prev is not None and prev != (v, d):
                    pv, pd = prev
                    if pv == v:
                        word = (d, pd ^ 1)
                    else:
                        word = (d, pd)
                    if max_len >= 2:
                        return (v, word)
                else:
                    parallel[key] = (v, d)

    best = None
    depth = (max_len + 1) // 2
    for root in vertices:
        dist = {root: 0}
        via = {root: None}  # vertex -> (parent, letter)
        dq = deque([root])
        while dq:
            v = dq.popleft()
            if dist[v] >= depth:
                continue
            for d in letters:
                w = rows[v][d]
                if w < 0 or w not in vset:
                    continue
                if w not in dist:
                    dist[w] = dist[v] + 1
                    via[w] = (v, d)
                    dq.append(w)
                elif via[v] is None or via[v][0] != w or (via[v][1] ^ 1) != d:
                    length = dist[v] + dist[w] + 1
                    if length <= max_len and (best is None or length < best[0]):
                        pa = _path_from(via, v)
                        pb = _path_from(via, w)
                        word = reduce_word(pa + (d,) + inv(pb))
                        if word:
                            best = (len(word), root, word)
        if best is not None and best[0] <= 2:
            break
    if best is None:
        return None
    return (best[1], best[2])


def _path_from(via, v) -> Word:
    out = []
    while via[v] is not None:
        u, d = via[v]
        out.append(d)
        v = u
    return tuple(reversed(out))


def sparse_spanning_forest(core_or_rows, letters, vertices=None):
    """Edges to delete so the letter-restricted subgraph becomes a forest,
    no vertex losing more than one incident edge.

    Greedy: while a cycle survives, take a shortest cycle through some
    surviving non-bridge edge and delete a cycle edge whose endpoints are
    both untouched so far. Raises GreedyStuck when no such edge exists.
    Returns the deleted (u, letter, w) edges (even-letter direction).
    """
    rows = getattr(core_or_rows, "trans", core_or_rows)
    letters = closed_letters(letters)
    if vertices is None:
        vertices = range(len(rows))
    vset = set(vertices)

    alive = set()
    for v in vertices:
        for d in letters:
            if d % 2:
                continue
            w = rows[v][d]
            if w >= 0 and w in vset:
                alive.add((v, d, w))

    deleted = []
    hit = set()
    while True:
        cycle = _some_cycle(alive, vset)
        if cycle is None:
            return deleted
        for e in cycle:
            u, d, w = e
            if u not in hit and w not in hit:
                alive.discard(e)
                deleted.append(e)
                hit.add(u)
                hit.add(w)
                break
        else:
            raise GreedyStuck(
                f"every edge of a cycle of length {len(cycle)} touches a "
                "previously hit vertex")


def _some_cycle(edges, vset):
    """A shortest cycle through the first detected non-forest edge, as a
    list of edges; None if the graph is a forest."""
    parent = {v: v for v in vset}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    bad = None
    for e in sorted(edges):
        u, d, w = e
        ru, rw = find(u), find(w)
        if ru == rw:
            bad = e
            break
        parent[ru] = rw
    if bad is None:
        return None
    u0, d0, w0 = bad
    if u0 == w0:
        return [bad]
    # shortest u0 -> w0 path avoiding bad, over surviving edges
    adj = {}
    for e in edges:
        if e == bad:
            continue
        u, d, w = e
        adj.setdefault(u, []).append((w, e))
        adj.setdefault(w, []).append((u, e))
    prev = {u0: None}
    dq = deque([u0])
    while dq:
        v = dq.popleft()
        if v == w0:
            break
        for t, e in adj.get(v, ()):
            if t not in prev:
                prev[t] = (v, e)
                dq.append(t)
    if w0 not in prev:
        raise InvariantViolation("cycle edge detected but no closing path")
    path = [bad]
    v = w0
    while prev[v] is not None:
        v, e = prev[v]
        path.append(e)
    return path


def indegree(core: CoreGraph, v: int) -> int:
    """Incoming edges at ``v``; a loop contributes exactly one.

    Every non-loop incident edge carries exactly one direction into ``v``
    and a loop is counted once, so this is the geometric incident count.
    """
    return core.degree(v)


def check_origin_indegree(core: CoreGraph, bound: int) -> bool:
    """Whether the base vertex has at most ``bound`` incoming edges."""
    return indegree(core, 0) <= bound


def find_low_indegree_vertex(core: CoreGraph) -> int:
    """Smallest vertex at which some letter does not act.

    Such a vertex exists exactly when the subgroup has infinite index;
    when every vertex carries all ``2 * rank`` letters the core is a full
    Schreier graph and FiniteIndexError is raised.  A letter ``c`` absent
    from the incoming labels of the returned vertex always exists, which
    is what attaching an extra edge there needs.  On loop-free cores the
    count agrees with :func:`indegree`.
    """
    full = 2 * core.rank
    for v in range(core.nv):
        if core.out_degree(v) < full:
            return v
    raise FiniteIndexError(
        f"all {core.nv} vertices carry every letter; index is {core.nv}")


@dataclass(frozen=True)
class ForestCert:
    """Certificate that deleting ``removed_edges`` leaves a spanning tree.

    Edges are geometric ``(u, letter, w)`` triples in the even-letter
    direction.  ``lost_count`` maps each vertex to the number of removed
    edges incident to it; validity demands every value is at most 1 and
    that ``kept_edges`` is acyclic and spans the graph.  Certificates
    produced by :func:`sparse_spanning_tree` are checked; ones built by
    hand (e.g. restrictions to a window) are not.
    """

    removed_edges: tuple
    kept_edges: tuple
    lost_count: dict

    @property
    def max_lost(self) -> int:
        return max(self.lost_count.values(), default=0)


def sparse_spanning_tree(core: CoreGraph, min_girth: Optional[int] = None) -> ForestCert:
    """Thin a core to a spanning tree, no vertex losing more than one edge.

    The caller promises every cycle has length at least ``min_girth`` (when
    given); with girth above 4 the greedy deletion always finds, on each
    surviving shortest cycle, an edge with both endpoints untouched.  A
    violated promise surfaces as GreedyStuck.  The returned certificate is
    verified: kept edges acyclic, connected, and covering every vertex.
    """
    removed = sparse_spanning_forest(core, range(2 * core.rank))
    removed_set = set(removed)
    kept = tuple(e for e in core.geometric_edges() if e not in removed_set)

    lost: dict = {v: 0 for v in range(core.nv)}
    for u, d, w in removed:
        lost[u] += 1
        if w != u:
            lost[w] += 1
    bad = [v for v, k in lost.items() if k > 1]
    if bad:
        raise InvariantViolation(f"vertices {bad} each lost more than one edge")

    parent = list(range(core.nv))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, d, w in kept:
        ru, rw = find(u), find(w)
        if ru == rw:
            raise InvariantViolation("kept edges contain a cycle")
        parent[ru] = rw
    if core.nv and sum(1 for v in range(core.nv) if find(v) == v) != 1:
        raise InvariantViolation("kept edges do not span the core")

    return ForestCert(removed_edges=tuple(removed), kept_edges=kept,
                      lost_count=lost)


# --- export -----------------------------------------------------------------

def core_to_json(core: CoreGraph, alphabet=None) -> dict:
    def name(d):
        return alphabet.letter_name(d) if alphabet is not None else d

    return {
        "rank": core.rank,
        "vertices": core.nv,
        "base": 0,
        "edges": [
            {"from": u, "to": w, "label": name(d)}
            for u, d, w in core.geometric_edges()
        ],
    }


def core_to_dot(core: CoreGraph, alphabet=None) -> str:
    def name(d):
        return alphabet.letter_name(d) if alphabet is not None else str(d)

    lines = ["digraph core {", '  rankdir=LR;', '  0 [shape=doublecircle];']
    for v in range(1, core.nv):
        lines.append(f"  {v} [shape=circle];")
    for u, d, w in core.geometric_edges():
        lines.append(f'  {u} -> {w} [label="{name(d)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
