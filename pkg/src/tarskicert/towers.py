"""Desk-scale builds of the two certified tower actions.

Two families of group actions are assembled here as finite windows, each
carrying enough structure to certify a Tarski-number bound at truncation
scale:

* ``build_tarski_tower`` realizes, for the free group on x, y_1..y_n, z,
  a spine of z-edges with one doorway per enumerated n-tuple of words;
  behind doorway i sits the coset structure of the commutator subgroup of
  K_i = ⟨tuple i⟩.  The partition of the window into classes Y_1..Y_n
  supports an (n+3)-piece decomposition (upper bound), while every small
  translating-set candidate is refuted through the abelian quotient of
  its own region (lower bound): jointly, window-relative evidence that
  the Tarski number of the action is exactly n+3.

* ``build_filtration_tower`` attaches, for the rank-3 free group, finite
  power-word automata drawn from a certified level of the mod-p series
  filtration along a labeled spine.  Its verifier certifies the
  degree-deficient origin, fixed points of the realized tuples, a global
  doubling forest, and the power-cycle violation — the evidence set for a
  Tarski number of exactly 6 at truncation scale.

All numeric verdicts are window-relative: reports carry the radius and
budgets that bound what was actually checked.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import InvariantViolation, ShapeError
from .filtration import find_m, power_tuple_stream, zassenhaus_member
from .freewords import inv, mul, reduce_word, word_key
from .stallings import (
    AbelianMap,
    CoreGraph,
    core_from_edges,
    core_graph,
    find_j,
    find_low_indegree_vertex,
    find_short_cycle,
    indegree,
    sparse_spanning_tree,
)
from .schreier import (
    Window,
    expand,
    oracle_fg,
    oracle_gamma2,
    oracle_generated_by_regions,
)
from .paradox import (
    Decomposition,
    DoublingCert,
    HallViolation,
    TranslatingSets,
    doubling_check,
    folner_violation,
    forest_doubling_cert,
    free_action_decomposition,
    make_decomposition,
    power_cycle_violation,
)


# --- deterministic tuple enumeration -------------------------------------------

def _compositions(total: int, parts: int):
    """Ordered compositions of ``total`` into ``parts`` positive parts."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _words_of_length(rank: int, length: int) -> list:
    if length == 0:
        return [()]
    out = []
    stack = [()]
    for _ in range(length):
        nxt = []
        for w in stack:
            for d in range(2 * rank):
                if w and d == w[-1] ^ 1:
                    continue
                nxt.append(w + (d,))
        stack = nxt
    return stack


def enumerate_word_tuples(rank: int, n: int, count: int) -> list:
    """First ``count`` n-tuples of nonempty reduced words over the rank.

    Tuples are ordered by total length, then entrywise shortlex; every
    n-tuple (repetitions and inverses included) appears exactly once, so
    any finite candidate set is eventually enumerated.
    """
    pools: Dict[int, list] = {}

    def pool(length: int) -> list:
        if length not in pools:
            pools[length] = _words_of_length(rank, length)
        return pools[length]

    out: list = []
    total = n
    while len(out) < count:
        batch = []
        for comp in _compositions(total, n):
            for entries in itertools.product(*(pool(c) for c in comp)):
                batch.append(entries)
        batch.sort(key=lambda t: tuple(word_key(e) for e in t))
        out.extend(batch)
        total += 1
    return out[:count]


# --- the diagonal tower ----------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Per-doorway data: the generating words, their core, its abelian
    coordinates, the doorway letter, and the class index j for which
    ⟨x, y_j⟩ passes the restricted-forest criterion on this core."""

    index: int
    words: tuple
    core: CoreGraph
    am: AbelianMap
    c: int
    j: Optional[int]


@dataclass(frozen=True)
class TarskiTowerSpec:
    n: int
    count: int
    radius: int
    tuples: tuple
    c_letters: dict
    regions: dict

    @property
    def rank(self) -> int:
        return self.n + 2

    @property
    def z_code(self) -> int:
        return 2 * (self.n + 1)


def build_tarski_tower(n: int, count: int, radius: int,
                       budget: int = 1 << 20):
    """Window of the spine-and-doorways action together with its spec.

    The base vertex starts a spine of ``count`` z-edges.  The k-th spine
    vertex opens through letter c_k into the coset structure of the
    commutator subgroup of K_k = ⟨tuple k⟩, whose origin has its
    c_k-return slot rerouted back to the spine; c_k is the smallest
    letter that is neither z-ish nor an incoming-edge label of the core
    base of K_k, so no folding or cancellation occurs.  Every remaining
    letter slot grows a regular tree.  Deterministic throughout.
    """
    if n < 1 or count < 1:
        raise ShapeError("need n >= 1 and at least one tuple")
    rank = n + 2
    zpos = 2 * (n + 1)
    zneg = zpos + 1

    tuples = tuple(enumerate_word_tuples(rank, n, count))
    choices = [(j, (0, 1, 2 * j, 2 * j + 1)) for j in range(1, n + 1)]

    regions: Dict[int, Region] = {}
    c_letters: Dict[int, int] = {}
    steps = {}
    bases = {}
    for i, words in enumerate(tuples, start=1):
        core = core_graph(rank, words)
        am = AbelianMap(core)
        blocked = {zpos, zneg} | core.incoming_labels(0)
        c = next((d for d in range(2 * rank) if d not in blocked), None)
        if c is None:
            raise InvariantViolation(
                f"no doorway letter left for tuple {i}")
        j = find_j(core, choices, am)
        regions[i] = Region(index=i, words=tuple(words), core=core, am=am,
                            c=c, j=j)
        c_letters[i] = c
        steps[i] = oracle_gamma2(core, am).step
        bases[i] = (0, (), (0,) * am.rank_ab)

    def step(state, d):
        kind = state[0]
        if kind == "s":
            k = state[1]
            if d == zpos and k < count:
                return ("s", k + 1)
            if d == zneg and k > 0:
                return ("s", k - 1)
            if 1 <= k and d == c_letters.get(k, -2):
                return ("r", k, bases[k])
            return ("t", state, (d,))
        if kind == "r":
            i, st = state[1], state[2]
            if st == bases[i] and d == (c_letters[i] ^ 1):
                return ("s", i)
            return ("r", i, steps[i](st, d))
        anchor, path = state[1], state[2]
        if d == path[-1] ^ 1:
            return anchor if len(path) == 1 else ("t", anchor, path[:-1])
        return ("t", anchor, path + (d,))

    spec_obj = _OracleSpec(step=step, base_state=("s", 0),
                           name=f"tower-n{n}-N{count}", rank=rank)
    window = expand(oracle_generated_by_regions(spec_obj), radius,
                    budget=budget)
    return window, TarskiTowerSpec(n=n, count=count, radius=radius,
                                   tuples=tuples, c_letters=c_letters,
                                   regions=regions)


@dataclass(frozen=True)
class _OracleSpec:
    step: object
    base_state: object
    name: str
    rank: int


# --- window partition ------------------------------------------------------------

@dataclass(frozen=True)
class YPartition:
    """Interior classes Y_1..Y_n with their reachability evidence.

    ``assignment`` maps interior vertices to classes; ``reached`` records
    which region's automaton each vertex sees through z-free edges (None
    for no region: class 1); ``component_class`` extends the class to
    every vertex of an assigned z-free component, frontier included.
    """

    assignment: dict
    reached: dict
    classes: dict
    component_class: dict

    def members(self, j: int) -> list:
        return sorted(v for v, c in self.assignment.items() if c == j)


def partition_Y(window: Window, spec: TarskiTowerSpec) -> YPartition:
    """Assign every interior vertex to its class by z-free reachability.

    Components of the window minus z-edges are computed once; a component
    reaching the automaton of region i (a rerouted commutator-coset
    vertex with empty hanging path) takes class j(i), a component
    reaching none takes class 1.  Two distinct regions inside one
    component would falsify the partition lemma and raise.
    """
    if window.states is None:
        raise ShapeError("window carries no construction states")
    zpos = spec.z_code
    n = window.n_vertices
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for v in range(n):
        for d in range(2 * spec.rank):
            if d == zpos or d == zpos + 1:
                continue
            t = window.trans[v][d]
            if t >= 0:
                ra, rb = find(v), find(t)
                if ra != rb:
                    parent[ra] = rb

    comp_regions: Dict[int, set] = {}
    for v in range(n):
        st = window.states[v]
        if st[0] == "r" and not st[2][1]:
            comp_regions.setdefault(find(v), set()).add(st[1])

    classes = {}
    for root, found in comp_regions.items():
        if len(found) > 1:
            raise InvariantViolation(
                f"z-free component of vertex {root} reaches regions "
                f"{sorted(found)}; the partition lemma fails here")
        i = next(iter(found))
        j = spec.regions[i].j
        if j is None:
            raise InvariantViolation(
                f"region {i} admits no class: every restricted subgraph "
                "carries a vanishing cycle")
        classes[root] = (i, j)

    assignment = {}
    reached = {}
    component_class = {}
    interior = set(window.interior())
    for v in range(n):
        got = classes.get(find(v))
        reached[v] = got[0] if got else None
        cls = got[1] if got else 1
        component_class[v] = cls
        if v in interior:
            assignment[v] = cls
    region_classes = {i: r.j for i, r in spec.regions.items()}
    return YPartition(assignment=assignment, reached=reached,
                      classes=region_classes,
                      component_class=component_class)


# --- free-action verification -----------------------------------------------------

@dataclass(frozen=True)
class FreeActionReport:
    ok: bool
    j: int
    max_len: int
    vertices: int
    words: int
    witness: Optional[tuple]


def verify_free_on_Yj(window: Window, part: YPartition, j: int,
                      max_len: int) -> FreeActionReport:
    """Exhaustively trace every reduced ⟨x, y_j⟩-word of bounded length
    from every interior class-j vertex; any fixed point is returned as a
    (vertex, word) witness.  Traces that leave the window are skipped.
    """
    verts = np.array(part.members(j), dtype=np.int64)
    if max_len < 1 or len(verts) == 0:
        return FreeActionReport(ok=True, j=j, max_len=max_len,
                                vertices=len(verts), words=0, witness=None)
    rank = window.rank
    rows = np.full((window.n_vertices + 1, 2 * rank), -1, dtype=np.int64)
    for v in range(window.n_vertices):
        rows[v] = window.trans[v]

    letters = (0, 1, 2 * j, 2 * j + 1)
    words = 0
    stack: List[tuple] = [((), verts)]
    while stack:
        prefix, at = stack.pop()
        for d in letters:
            if prefix and d == prefix[-1] ^ 1:
                continue
            w = prefix + (d,)
            words += 1
            cur = rows[at, d]
            hits = (cur == verts)
            if hits.any():
                v = int(verts[int(np.argmax(hits))])
                return FreeActionReport(ok=False, j=j, max_len=max_len,
                                        vertices=len(verts), words=words,
                                        witness=(v, w))
            if len(w) < max_len:
                stack.append((w, cur))
    return FreeActionReport(ok=True, j=j, max_len=max_len,
                            vertices=len(verts), words=words, witness=None)


# --- upper bound -------------------------------------------------------------------

def tarski_upper_decomposition(window: Window, part: YPartition,
                               n: int) -> Decomposition:
    """(n+3)-piece decomposition with S1 = {1, x}, S2 = {1, y_1..y_n}.

    Each class Y_j is decomposed classically for the pair (x, y_j); the
    two P-pieces and the translator-1 Q-piece are shared across classes,
    while the y_j-translated piece of Y_j occupies Q-slot j+1.  Classes
    are unions of z-free components, so the per-class addressing never
    leaks across classes.
    """
    sets = TranslatingSets.make(
        [(), (0,)], [()] + [(2 * j,) for j in range(1, n + 1)])
    pieces: Dict[str, set] = {"P1": set(), "P2": set(), "Q1": set()}
    for j in range(1, n + 1):
        pieces[f"Q{j + 1}"] = set()

    for j in range(1, n + 1):
        yset = {v for v, c in part.component_class.items() if c == j}
        if not yset:
            continue
        d_j = free_action_decomposition(window, (0,), (2 * j,), within=yset)
        pieces["P1"] |= d_j.pieces["P1"]
        pieces["P2"] |= d_j.pieces["P2"]
        pieces["Q1"] |= d_j.pieces["Q1"]
        pieces[f"Q{j + 1}"] |= d_j.pieces["Q2"]
    return make_decomposition(sets, pieces)


# --- lower bound -------------------------------------------------------------------

REJECTED = "REJECTED"
COVERAGE_GAP = "COVERAGE_GAP"
TRANSPORTED = "TRANSPORTED"


@dataclass(frozen=True)
class CandidateReport:
    """Outcome for one translating-set candidate.

    TRANSPORTED: the tuple generated by the candidate sits at enumeration
    index ``index``; on the orbit of that region's origin the action
    factors through the abelianization (coordinates via the region's
    core), where ``violation`` exhibits a box defeating the matching
    condition.  COVERAGE_GAP: the tuple lies beyond the realized
    truncation.  REJECTED: the candidate is degenerate (fewer than two
    distinct translates on either side).
    """

    s1: tuple
    s2: tuple
    status: str
    index: Optional[int] = None
    abelian_rank: Optional[int] = None
    violation: Optional[HallViolation] = None
    note: str = ""

    def to_json(self, alphabet=None) -> dict:
        def f(w):
            return alphabet.format(w) if alphabet is not None else list(w)

        out = {"kind": "candidate", "S1": [f(w) for w in self.s1],
               "S2": [f(w) for w in self.s2], "status": self.status,
               "note": self.note}
        if self.index is not None:
            out["tupleIndex"] = self.index
        if self.abelian_rank is not None:
            out["abelianRank"] = self.abelian_rank
        if self.violation is not None:
            out["violation"] = self.violation.to_json()
        return out


def tarski_lower_report(spec: TarskiTowerSpec,
                        candidates: Sequence[TranslatingSets],
                        m_max: int = 32) -> list:
    """Refute every candidate pair of translating sets within truncation.

    Candidates are first shifted so the identity lies in both sets (a
    decomposition survives right-translation of its sets), then the
    nonidentity elements S, padded with repetitions to an n-tuple, are
    looked up in the tower's enumeration.  The orbit of that region's
    origin is, by construction, the coset space of the commutator
    subgroup inside K = ⟨S⟩, on which the action is the abelian group
    K/[K,K]; the box violation found there transports back verbatim.
    """
    out = []
    for cand in candidates:
        s1 = [reduce_word(w) for w in cand.s1]
        s2 = [reduce_word(w) for w in cand.s2]
        if not s1 or not s2:
            out.append(CandidateReport(tuple(s1), tuple(s2), REJECTED,
                                       note="empty translating set"))
            continue
        if () not in s1:
            g = inv(min(s1, key=word_key))
            s1 = [mul(w, g) for w in s1]
        if () not in s2:
            g = inv(min(s2, key=word_key))
            s2 = [mul(w, g) for w in s2]
        set1 = sorted(set(s1), key=word_key)
        set2 = sorted(set(s2), key=word_key)
        if len(set1) < 2 or len(set2) < 2:
            out.append(CandidateReport(tuple(cand.s1), tuple(cand.s2),
                                       REJECTED,
                                       note="both sides need two or more "
                                            "distinct translates"))
            continue
        s_words = sorted({w for w in set1 + set2 if w}, key=word_key)
        if len(s_words) > spec.n:
            out.append(CandidateReport(
                tuple(cand.s1), tuple(cand.s2), REJECTED,
                note=f"{len(s_words)} distinct nonidentity translates "
                     f"exceed n={spec.n}"))
            continue
        padded = tuple(s_words) + (s_words[-1],) * (spec.n - len(s_words))
        index = None
        for i, tup in enumerate(spec.tuples, start=1):
            if tup == padded:
                index = i
                break
        if index is None:
            out.append(CandidateReport(
                tuple(cand.s1), tuple(cand.s2), COVERAGE_GAP,
                note=f"tuple {padded} is enumerated beyond the realized "
                     f"{spec.count}"))
            continue
        region = spec.regions[index]
        am = region.am
        vecs1 = [am.loop_vector(w) for w in set1]
        vecs2 = [am.loop_vector(w) for w in set2]
        violation = folner_violation(vecs1, vecs2, m_max)
        out.append(CandidateReport(
            tuple(cand.s1), tuple(cand.s2), TRANSPORTED, index=index,
            abelian_rank=am.rank_ab, violation=violation,
            note=("orbit of the region origin is the abelianization of "
                  "the candidate subgroup; box violation transports "
                  "exactly")))
    return out


# --- the filtration tower ----------------------------------------------------------

@dataclass(frozen=True)
class FiltrationTowerSpec:
    p: int
    pairs: tuple               # alpha(k) enumeration: ((n, i), ...)
    m_values: dict             # n -> certified m(n)
    tuples: dict               # (n, i) -> tuple of power words
    attach_vertices: dict      # (n, i) -> vertex id in the assembled core
    c_letters: dict            # (n, i) -> doorway letter
    spine_labels: tuple        # label of edge k (1-based list)
    spine_vertices: tuple      # core ids of spine vertices t_0..t_K
    radius: int
    core: CoreGraph
    automata: dict             # (n, i) -> (local core, {local: core id})

    @property
    def rank(self) -> int:
        return 3


def _pair_stream(n_max: int):
    k = 2
    while True:
        for n in range(1, n_max + 1):
            i = k - n
            if i >= 1:
                yield (n, i)
        k += 1


def build_filtration_tower(p: int, n_max: int, pairs: int, radius: int,
                           budget: int = 1 << 20, m_values: Optional[dict] = None):
    """Assemble the spine-with-automata core and expand its window.

    For each realized pair (n, i), automaton (n, i) is the core of the
    subgroup generated by the i-th n-tuple of q-th powers from level m(n)
    of the mod-p filtration (q the least p-power at or above m(n)); it is
    attached by a doorway at its lowest letter-deficient vertex, the
    doorway letter being the smallest letter not incoming there.  Spine
    labels are chosen greedily smallest-first under the non-cancellation
    constraint: the first label avoids the inverse of doorway 1, and
    label k avoids the previous label's inverse, the previous doorway,
    and the inverse of doorway k.  The assembled graph must fold-free
    embed into the window's Schreier structure; any fold raises.
    """
    if pairs < 1 or n_max < 1:
        raise ShapeError("need at least one pair and n_max >= 1")
    if m_values is None:
        m_values = {}
        for n in range(1, n_max + 1):
            m_values[n] = find_m(n, p).m
    alpha = tuple(itertools.islice(_pair_stream(n_max), pairs))

    per_n_count = {}
    for (n, i) in alpha:
        per_n_count[n] = max(per_n_count.get(n, 0), i)
    streams = {n: power_tuple_stream(m_values[n], p, n, count)
               for n, count in per_n_count.items()}

    autos = {}
    attach_local = {}
    c_letters = {}
    tuples = {}
    for (n, i) in alpha:
        words = streams[n][i - 1]
        core = core_graph(3, words)
        o = find_low_indegree_vertex(core)
        blocked = core.incoming_labels(o)
        c = next((d for d in range(6) if d not in blocked), None)
        if c is None:
            raise InvariantViolation(
                f"no doorway letter available at automaton {(n, i)}")
        autos[(n, i)] = core
        attach_local[(n, i)] = o
        c_letters[(n, i)] = c
        tuples[(n, i)] = words

    labels = []
    for k in range(1, pairs + 1):
        blocked = {c_letters[alpha[k - 1]] ^ 1}
        if k > 1:
            blocked.add(labels[-1] ^ 1)
            blocked.add(c_letters[alpha[k - 2]])
        l = next((d for d in range(6) if d not in blocked), None)
        if l is None:
            raise InvariantViolation(f"no spine label available at edge {k}")
        labels.append(l)

    edges = []
    offsets = {}
    total = pairs + 1
    for (n, i) in alpha:
        offsets[(n, i)] = total
        total += autos[(n, i)].nv
    for k in range(1, pairs + 1):
        edges.append((k - 1, labels[k - 1], k))
        key = alpha[k - 1]
        edges.append((k, c_letters[key], offsets[key] + attach_local[key]))
    for key in alpha:
        off = offsets[key]
        for (u, d, w) in autos[key].geometric_edges():
            edges.append((off + u, d, off + w))

    assembled, mapping = core_from_edges(3, total, edges, base=0, trim=False)
    image = [mapping[v] for v in range(total)]
    if None in image or len(set(image)) != total:
        raise InvariantViolation(
            "assembled graph folded; the doorway or spine constraints "
            "were violated")

    spine_vertices = tuple(mapping[k] for k in range(pairs + 1))
    attach_vertices = {key: mapping[offsets[key] + attach_local[key]]
                       for key in alpha}
    automata = {key: (autos[key],
                      {u: mapping[offsets[key] + u]
                       for u in range(autos[key].nv)})
                for key in alpha}

    window = expand(oracle_fg(assembled, name=f"filtration-tower-p{p}"),
                    radius, budget=budget)
    spec = FiltrationTowerSpec(
        p=p, pairs=alpha, m_values=dict(m_values), tuples=tuples,
        attach_vertices=attach_vertices, c_letters=c_letters,
        spine_labels=tuple(labels), spine_vertices=spine_vertices,
        radius=radius, core=assembled, automata=automata)
    return window, spec


@dataclass(frozen=True)
class FiltrationTowerReport:
    """Bundle of certificates for one built filtration tower window."""

    ok: bool
    deficient_vertex: tuple          # (core vertex, degree, bound)
    fixed_points: tuple              # ((n,i), word, vertex) triples checked
    girths: dict                     # (n,i) -> verified lower bound
    attachment_indegrees: dict       # (n,i) -> incoming degree before doors
    spine_ok: bool
    membership_checks: tuple         # ((n,i), word, level) verified members
    doubling: DoublingCert
    doubling_samples: int
    power_cycle: HallViolation

    def to_json(self, alphabet=None) -> dict:
        def f(w):
            return alphabet.format(w) if alphabet is not None else list(w)

        return {
            "kind": "filtration-tower-report",
            "ok": self.ok,
            "deficientVertex": list(self.deficient_vertex),
            "fixedPoints": [[list(k), f(w), v]
                            for k, w, v in self.fixed_points],
            "girths": {str(k): g for k, g in sorted(self.girths.items())},
            "attachmentIndegrees": {str(k): d for k, d in
                                    sorted(self.attachment_indegrees.items())},
            "spineOk": self.spine_ok,
            "membershipChecks": [[list(k), f(w), lvl]
                                 for k, w, lvl in self.membership_checks],
            "doubling": self.doubling.to_json(),
            "doublingSamples": self.doubling_samples,
            "powerCycle": self.power_cycle.to_json(),
        }


def verify_filtration_tower(window: Window, spec: FiltrationTowerSpec,
                            samples: int = 100, seed: int = 0,
                            power_cycle_r: int = 4) -> FiltrationTowerReport:
    """Run every certificate the built tower supports.

    (a) a core vertex of deficient degree (rules out normal subgroups of
    the carried group at this scale); (b) each realized tuple word fixes
    its attachment vertex; (c) automaton girths and pre-attachment
    indegrees; (d) the spine constraint; (e) every tuple entry re-checked
    against its filtration level; (f) a global doubling forest (automata
    thinned by their per-automaton certificates) plus random doubling
    spot-checks; (g) the power-cycle violation at a small exponent.
    """
    core = spec.core
    deg, vertex = min((core.out_degree(v), v) for v in range(core.nv))
    if deg >= 6:
        raise InvariantViolation("no degree-deficient vertex in the core")
    deficient = (vertex, deg, 6)

    fixed = []
    for key, words in sorted(spec.tuples.items()):
        o = spec.attach_vertices[key]
        for w in words:
            got = core.trace(w, start=o)
            if got != o:
                raise InvariantViolation(
                    f"tuple word at {key} does not fix its attachment "
                    f"vertex: reached {got}")
            fixed.append((key, w, o))

    girths = {}
    attach_deg = {}
    for key, (auto, _) in sorted(spec.automata.items()):
        n = key[0]
        bound = 12 * n
        if find_short_cycle(auto, range(6), bound - 1) is not None:
            raise InvariantViolation(
                f"automaton {key} has a cycle shorter than {bound}")
        girths[key] = bound
        attach_deg[key] = indegree(auto, _local_attach(spec, key))
        if attach_deg[key] >= 6:
            raise InvariantViolation(
                f"attachment vertex of {key} already carries 6 edges")

    for k in range(1, len(spec.spine_labels) + 1):
        l = spec.spine_labels[k - 1]
        bad = (l == (spec.c_letters[spec.pairs[k - 1]] ^ 1))
        if k > 1:
            bad = bad or l == (spec.spine_labels[k - 2] ^ 1)
            bad = bad or l == spec.c_letters[spec.pairs[k - 2]]
        if bad:
            raise InvariantViolation(f"spine label {k} breaks the "
                                     "non-cancellation constraint")
    spine_ok = True

    membership = []
    for key, words in sorted(spec.tuples.items()):
        n = key[0]
        m = spec.m_values[n]
        for w in words:
            if not zassenhaus_member(w, m, spec.p):
                raise InvariantViolation(
                    f"tuple word at {key} is not in filtration level {m}")
            membership.append((key, w, m))

    core_to_window = {}
    for wv in range(window.n_vertices):
        st = window.states[wv] if window.states else None
        if st is not None and not st[1]:
            core_to_window[st[0]] = wv
    erasures = []
    for key, (auto, to_core) in sorted(spec.automata.items()):
        cert = sparse_spanning_tree(auto)
        removed = []
        for (u, d, w) in cert.removed_edges:
            wu = core_to_window.get(to_core[u])
            ww = core_to_window.get(to_core[w])
            if wu is not None and ww is not None:
                removed.append((wu, d, ww))
        erasures.append(_WindowErasure(tuple(removed)))
    s_words = [(0,), (2,), (4,)]
    doubling = forest_doubling_cert(window, s_words, erasures)

    rng = random.Random(seed)
    interior = sorted(window.interior())
    for _ in range(samples):
        a = rng.sample(interior, rng.randint(1, min(16, len(interior))))
        if not doubling_check(window, s_words, a):
            raise InvariantViolation(
                f"doubling fails on sampled set {sorted(a)[:6]}")

    _, _, _, pc = power_cycle_violation((0,), (2,), (4,), power_cycle_r)

    return FiltrationTowerReport(
        ok=True, deficient_vertex=deficient, fixed_points=tuple(fixed),
        girths=girths, attachment_indegrees=attach_deg, spine_ok=spine_ok,
        membership_checks=tuple(membership), doubling=doubling,
        doubling_samples=samples, power_cycle=pc)


def _local_attach(spec: FiltrationTowerSpec, key) -> int:
    auto, to_core = spec.automata[key]
    target = spec.attach_vertices[key]
    for local, cv in to_core.items():
        if cv == target:
            return local
    raise InvariantViolation(f"attachment vertex of {key} left the core")


@dataclass(frozen=True)
class _WindowErasure:
    removed_edges: tuple
