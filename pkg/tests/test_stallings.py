"""Subgroup cores: folding, membership, abelianization, and forests."""

import random

import pytest

from tarskicert import kernels
from tarskicert.errors import GreedyStuck, InvariantViolation, ShapeError
from tarskicert.freewords import (
    Alphabet,
    commutator,
    conj,
    inv,
    mul,
    nielsen_reduce,
    random_reduced_word,
    reduced_words,
)
from tarskicert.stallings import (
    AbelianMap,
    CoreGraph,
    conjugate_core,
    core_from_edges,
    core_graph,
    core_to_dot,
    core_to_json,
    find_j,
    find_low_indegree_vertex,
    find_short_cycle,
    gamma2_forest_test,
    has_loops,
    indegree,
    intersect,
    sparse_spanning_tree,
)

A2 = Alphabet(("x", "y"))
A3 = Alphabet(("x", "y", "z"))
P2, P3 = A2.parse, A3.parse


def brute_members(core, max_len):
    impl = kernels.word_impl(core.rank)
    flat = [t for row in core.trans for t in row]
    return impl.loop_words(flat, core.nv, 2 * core.rank, 0, max_len)


def nielsen_members(gens, max_len):
    basis = nielsen_reduce(gens)
    factors = []
    for q in basis:
        factors.append(bytes(q))
        factors.append(bytes(inv(q)))
    impl = kernels.word_impl(max((d >> 1 for q in basis for d in q),
                                 default=0) + 1)
    return impl.nielsen_products(factors, max_len, max_len)


def test_core_x2_y_golden():
    core = core_graph(2, (P2("x^2"), P2("y")))
    assert core.nv == 2
    assert core.trans == ((1, 1, 0, 0), (0, 0, -1, -1))
    assert not core.member(P2("x"))
    assert core.member(P2("x^2"))
    assert core.member(P2("y x^2 y^-1"))
    assert core.member(P2("1"))
    assert core.graph_rank() == 2
    assert core.index() is None


def test_core_equal_subgroups_equal_objects():
    a = core_graph(2, (P2("x^2"), P2("y")))
    b = core_graph(2, (P2("y"), P2("x^-2"), P2("x^2 y x^-2")))
    assert a == b


def test_index_two_subgroup():
    core = core_graph(2, (P2("x^2"), P2("y"), P2("x y x^-1")))
    assert core.index() == 2
    assert core.graph_rank() == 3  # 1 + 2 * (2 - 1) by the index formula


def test_membership_against_nielsen_brute_force():
    rng = random.Random(2)
    for _ in range(40):
        k = rng.randint(1, 3)
        gens = tuple(random_reduced_word(rng, 3, rng.randint(1, 6))
                     for _ in range(k))
        core = core_graph(3, gens)
        assert brute_members(core, 6) == nielsen_members(gens, 6)


def test_rank_equals_nielsen_basis_size():
    rng = random.Random(3)
    for _ in range(60):
        k = rng.randint(1, 3)
        gens = tuple(random_reduced_word(rng, 3, rng.randint(1, 6))
                     for _ in range(k))
        assert core_graph(3, gens).graph_rank() == len(nielsen_reduce(gens))


def test_intersect_powers():
    a = core_graph(2, (P2("x^2"), P2("y")))
    b = core_graph(2, (P2("x^3"),))
    c = intersect(a, b)
    assert c == core_graph(2, (P2("x^6"),))
    assert c.graph_rank() == 1


def test_intersect_finite_index():
    a = core_graph(2, (P2("x^2"), P2("y"), P2("x y x^-1")))
    b = core_graph(2, (P2("y^2"), P2("x"), P2("y x y^-1")))
    c = intersect(a, b)
    assert c.index() == 4


def test_conjugate_core():
    core = core_graph(2, (P2("x^2"),))
    moved = conjugate_core(core, P2("y"))
    assert moved == core_graph(2, (P2("y^-1 x^2 y"),))


def test_trace_and_degree_conventions():
    core = core_graph(2, (P2("x^2"),))
    assert core.trace(P2("x")) == 1
    assert core.trace(P2("x"), start=1) == 0
    assert core.trace(P2("y")) is None
    # the x^2 cycle: each vertex has two incident geometric edges,
    # two directed incoming edges, and out-degree two
    for v in (0, 1):
        assert core.degree(v) == 2
        assert core.out_degree(v) == 2
        assert indegree(core, v) == 2
    loop = core_graph(2, (P2("x"),))
    assert loop.degree(0) == 1  # a loop is one geometric edge
    assert loop.out_degree(0) == 2
    assert indegree(loop, 0) == 1  # declared convention: a loop counts once


def test_incoming_labels():
    core = core_graph(2, (P2("x^2"), P2("y")))
    assert core.incoming_labels(0) == {0, 1, 2, 3}
    assert core.incoming_labels(1) == {0, 1}


def test_core_from_edges_folds_and_maps():
    # two parallel x-edges from 0 fold together
    core, mapping = core_from_edges(2, 3, [(0, 0, 1), (0, 0, 2), (1, 2, 1)])
    assert core.nv == 2
    assert mapping[1] == mapping[2]
    assert core.member(P2("x y x^-1"))  # the y loop folded onto vertex 1


def test_abelian_map_basics():
    core = core_graph(2, (P2("x^2"), P2("y")))
    am = AbelianMap(core)
    assert am.rank_ab == 2
    vx = am.loop_vector(P2("x^2"))
    vy = am.loop_vector(P2("y"))
    assert sorted(map(abs, vx)) == [0, 1]
    assert sorted(map(abs, vy)) == [0, 1]
    assert vx != vy
    assert am.loop_vector(commutator(P2("x^2"), P2("y"))) == (0, 0)
    double = am.loop_vector(P2("x^4"))
    assert double == tuple(2 * t for t in vx)


def test_abelian_map_basepoint_independence():
    core = core_graph(2, (P2("x^2"), P2("y")))
    am = AbelianMap(core)
    w = P2("x^2 y")
    assert am.loop_vector(conj(w, P2("x^2"))) == am.loop_vector(w)


def test_gamma2_forest_test_detects_rank_two_restriction():
    # K = <x, y>: restricting to {x, y} keeps cycle rank 2
    core = core_graph(2, (P2("x"), P2("y")))
    report = gamma2_forest_test(core, (0, 1, 2, 3))
    assert not report.ok
    # K = <x^2, y x y^-1>: x-letters alone leave one cycle with
    # nonvanishing abelianized image, which is fine
    core2 = core_graph(2, (P2("x^2"), P2("y x y^-1")))
    report2 = gamma2_forest_test(core2, (0, 1))
    assert report2.ok


def test_find_j_prefers_first_passing_class():
    core = core_graph(4, [(0, 0), (0, 1)])  # <x^2, x x^-1> over rank 4
    am = AbelianMap(core)
    choices = [(j, (0, 1, 2 * j, 2 * j + 1)) for j in (1, 2)]
    assert find_j(core, choices, am) == 1


def test_find_j_random_two_tuples_always_land():
    rng = random.Random(4)
    for _ in range(30):
        gens = tuple(random_reduced_word(rng, 4, rng.randint(1, 5))
                     for _ in range(2))
        core = core_graph(4, gens)
        am = AbelianMap(core)
        j = find_j(core, [(j, (0, 1, 2 * j, 2 * j + 1)) for j in (1, 2)], am)
        assert j in (1, 2)


def test_find_short_cycle():
    core = core_graph(3, (P3("x^6"),))
    assert find_short_cycle(core, range(6), 5) is None
    assert find_short_cycle(core, range(6), 6) is not None
    wedge = core_graph(2, (P2("x"), P2("y")))
    assert find_short_cycle(wedge, range(4), 1) is not None


def test_sparse_spanning_tree_on_conjugate_power_core():
    a, b, c = P3("x"), P3("y"), P3("z")
    gens = (tuple(a * 36), conj(tuple(a * 36), b), conj(tuple(a * 36), c))
    core = core_graph(3, gens)
    assert not has_loops(core)
    cert = sparse_spanning_tree(core, min_girth=36)
    assert cert.max_lost <= 1
    assert len(cert.kept_edges) == core.nv - 1
    assert len(cert.removed_edges) == core.graph_rank()


def test_sparse_spanning_tree_rejects_tight_cycles():
    with pytest.raises((GreedyStuck, InvariantViolation)):
        sparse_spanning_tree(core_graph(2, (P2("x"), P2("y"))))


def test_find_low_indegree_vertex():
    core = core_graph(3, (P3("x^4"),))
    v = find_low_indegree_vertex(core)
    assert core.out_degree(v) < 6
    assert indegree(core, v) < 6


def test_core_exports():
    core = core_graph(2, (P2("x^2"), P2("y")))
    doc = core_to_json(core, A2)
    assert doc["vertices"] == 2
    assert {"from": 0, "to": 0, "label": "y"} in doc["edges"]
    dot = core_to_dot(core, A2)
    assert "digraph core" in dot and '0 -> 1 [label="x"]' in dot


def test_membership_window_relative_honesty():
    # the brute-force ball and the core agree on every word, including
    # words longer than every generator
    gens = (P2("x y"), P2("y x"))
    core = core_graph(2, gens)
    members = brute_members(core, 8)
    assert bytes(P2("x y")) in members
    assert bytes(P2("x x")) not in members
    assert members == nielsen_members(gens, 8)
