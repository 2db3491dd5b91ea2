"""Tests for the two tower constructions and their certificate bundles.

The expensive builds come from session fixtures; goldens below were
frozen from independent runs and hand-checked counts (tree-ball sizes,
piece cardinalities, abelian box arithmetic).
"""

from collections import Counter

import pytest

from tarskicert.errors import FreenessViolation, InvariantViolation, ShapeError
from tarskicert.filtration import zassenhaus_member
from tarskicert.freewords import inv, mul
from tarskicert.paradox import (
    TranslatingSets,
    free_action_decomposition,
    verify_decomposition,
)
from tarskicert.towers import (
    COVERAGE_GAP,
    REJECTED,
    TRANSPORTED,
    FiltrationTowerReport,
    build_filtration_tower,
    build_tarski_tower,
    enumerate_word_tuples,
    partition_Y,
    tarski_lower_report,
    tarski_upper_decomposition,
    verify_filtration_tower,
    verify_free_on_Yj,
)

X = (0,)


def test_enumerate_word_tuples_golden():
    tuples = enumerate_word_tuples(4, 2, 3)
    assert tuples == [((0,), (0,)), ((0,), (1,)), ((0,), (2,))]
    many = enumerate_word_tuples(2, 2, 40)
    assert len(set(many)) == 40
    totals = [sum(len(w) for w in t) for t in many]
    assert totals == sorted(totals)
    for t in many:
        assert all(w != () for w in t)
    with pytest.raises(ShapeError):
        build_tarski_tower(0, 1, 2)


def test_tower_build_golden(tower6):
    window, spec = tower6
    assert window.n_vertices == 156861
    assert len(window.interior()) == 22409
    assert spec.rank == 4
    assert spec.z_code == 6
    assert spec.c_letters == {1: 2, 2: 2, 3: 4}
    assert {i: r.j for i, r in spec.regions.items()} == {1: 1, 2: 1, 3: 2}
    assert spec.tuples == (((0,), (0,)), ((0,), (1,)), ((0,), (2,)))


def test_tower_partition_golden(tower6, tower6_partition):
    window, spec = tower6
    part = tower6_partition
    sizes = Counter(part.assignment.values())
    assert sizes == Counter({1: 22372, 2: 37})
    assert part.members(2) == sorted(
        v for v, c in part.assignment.items() if c == 2)
    reached = Counter(v for v in part.reached.values() if v is not None)
    assert reached == Counter({1: 4687, 2: 937, 3: 183})
    assert part.classes == {1: 1, 2: 1, 3: 2}
    # interior assignment agrees with the component extension
    for v, c in part.assignment.items():
        assert part.component_class[v] == c


def test_tower_partition_closed_under_zfree_edges(tower6, tower6_partition):
    window, spec = tower6
    part = tower6_partition
    zpos = spec.z_code
    for v in range(window.n_vertices):
        cls = part.component_class[v]
        for d in range(2 * spec.rank):
            if d in (zpos, zpos + 1):
                continue
            t = window.trans[v][d]
            if t >= 0:
                assert part.component_class[t] == cls


def test_tower_partition_requires_states(tower6):
    window, spec = tower6
    from tarskicert.schreier import Window
    stripped = Window(rank=window.rank, oracle_name=window.oracle_name,
                      radius=window.radius, reps=window.reps,
                      trans=window.trans, dist=window.dist,
                      frontier=window.frontier, states=None)
    with pytest.raises(ShapeError):
        partition_Y(stripped, spec)


def test_tower_free_actions(tower6, tower6_partition):
    window, spec = tower6
    for j in (1, 2):
        report = verify_free_on_Yj(window, tower6_partition, j, 4)
        assert report.ok
        assert report.witness is None
        assert report.j == j
        assert report.words == 160  # reduced {x, y_j}-words of length <= 4


def test_tower_global_action_is_not_free(tower6):
    # the region realizing the pair (x, y_1) has its origin fixed by the
    # commutator, so addressing the whole window by that pair must fail
    window, spec = tower6
    with pytest.raises(FreenessViolation) as exc:
        free_action_decomposition(window, (0,), (2,))
    v, word = exc.value.witness
    assert word != ()


def test_tower_upper_decomposition(tower6, tower6_partition):
    window, spec = tower6
    d = tarski_upper_decomposition(window, tower6_partition, spec.n)
    assert d.sets == TranslatingSets.make(
        [(), (0,)], [(), (2,), (4,)])
    assert {t: len(vs) for t, vs in sorted(d.pieces.items())} == {
        "P1": 19608, "P2": 19608, "Q1": 19608, "Q2": 19577, "Q3": 31}
    report = verify_decomposition(window, d)
    assert report.ok
    assert report.checked == 22409
    assert report.unverifiable == 0


def test_tower_lower_report_single_letters(tower6):
    window, spec = tower6
    letters = [(d,) for d in range(2 * spec.rank)]
    cands = [TranslatingSets.make([(), g], [(), h])
             for g in letters for h in letters]
    reports = tarski_lower_report(spec, cands)
    assert len(reports) == 64
    statuses = Counter(r.status for r in reports)
    assert statuses == Counter({COVERAGE_GAP: 59, TRANSPORTED: 5})
    transported = [(r.index, r.violation.union_size, r.violation.required,
                    r.abelian_rank)
                   for r in reports if r.status == TRANSPORTED]
    assert sorted(transported) == [
        (1, 3, 4, 1), (2, 5, 6, 1), (2, 5, 6, 1),
        (3, 15, 18, 2), (3, 15, 18, 2)]
    for r in reports:
        if r.status == TRANSPORTED:
            v = r.violation
            assert v.union_size < v.required
            assert v.space == "lattice"
            js = r.to_json()
            assert js["status"] == TRANSPORTED
            assert js["violation"]["kind"] == "hall_violation"


def test_tower_lower_report_shift_and_rejections(tower6):
    window, spec = tower6
    y1 = (2,)
    shifted = TranslatingSets.make(
        [X, mul(X, X)], [y1, mul(y1, y1)])
    degenerate = TranslatingSets.make([(), ()], [(), X])
    toowide = TranslatingSets.make([(), X], [(), y1, (4,)])
    reports = tarski_lower_report(spec, [shifted, degenerate, toowide])
    assert reports[0].status == TRANSPORTED
    assert reports[0].index == 3  # normalizes to the pair (x, y_1)
    assert reports[1].status == REJECTED
    assert reports[2].status == REJECTED
    assert "exceed" in reports[2].note


def test_tower_small_build():
    window, spec = build_tarski_tower(1, 1, 4)
    part = partition_Y(window, spec)
    assert set(part.assignment.values()) <= {1}
    d = tarski_upper_decomposition(window, part, 1)
    report = verify_decomposition(window, d)
    assert report.ok


def test_filtration_tower_build_golden(ftower6):
    window, spec = ftower6
    assert window.n_vertices == 23437
    assert len(window.interior()) == 4687
    assert spec.core.nv == 35
    assert spec.p == 2
    assert spec.pairs == ((1, 1), (1, 2))
    assert spec.m_values == {1: 9}
    assert spec.attach_vertices == {(1, 1): 3, (1, 2): 4}
    assert spec.c_letters == {(1, 1): 2, (1, 2): 0}
    assert spec.spine_labels == (0, 0)
    assert spec.spine_vertices == (0, 1, 2)
    # realized tuples are the 16th powers of x and y
    assert spec.tuples == {(1, 1): ((0,) * 16,), (1, 2): ((2,) * 16,)}
    for (n, i), words in spec.tuples.items():
        for w in words:
            assert zassenhaus_member(w, spec.m_values[n], spec.p)


def test_filtration_tower_explicit_m_matches(ftower6):
    window, spec = ftower6
    window2, spec2 = build_filtration_tower(2, 1, 2, 3, m_values={1: 9})
    assert spec2.tuples == spec.tuples
    assert spec2.spine_labels == spec.spine_labels
    # BFS discovery order is distance-monotone, so the radius-3 window's
    # representatives are a prefix of the radius-6 window's
    assert window2.reps == window.reps[:window2.n_vertices]
    with pytest.raises(ShapeError):
        build_filtration_tower(2, 0, 1, 2)


def test_filtration_tower_report(ftower6):
    window, spec = ftower6
    report = verify_filtration_tower(window, spec, samples=100, seed=0)
    assert isinstance(report, FiltrationTowerReport)
    assert report.ok
    assert report.deficient_vertex == (0, 1, 6)
    assert report.girths == {(1, 1): 12, (1, 2): 12}
    assert report.attachment_indegrees == {(1, 1): 2, (1, 2): 2}
    assert report.spine_ok
    assert len(report.fixed_points) == 2
    assert len(report.membership_checks) == 2
    assert len(report.doubling.forest) == 23436
    assert min(report.doubling.indegree_table.values()) >= 2
    assert report.doubling_samples == 100
    assert (report.power_cycle.union_size,
            report.power_cycle.required) == (12, 13)
    js = report.to_json()
    assert js["kind"] == "filtration-tower-report"
    assert js["ok"] is True


def test_filtration_tower_report_deterministic(ftower6):
    window, spec = ftower6
    r1 = verify_filtration_tower(window, spec, samples=25, seed=7)
    r2 = verify_filtration_tower(window, spec, samples=25, seed=7)
    assert r1.to_json() == r2.to_json()


def test_filtration_tower_fixed_points_on_core(ftower6):
    window, spec = ftower6
    for key, words in spec.tuples.items():
        o = spec.attach_vertices[key]
        for w in words:
            assert spec.core.trace(w, start=o) == o
            assert spec.core.trace(inv(w), start=o) == o
