"""Shared fixtures; expensive builds are session-scoped and reused."""

import pytest

from tarskicert import (
    build_filtration_tower,
    build_tarski_tower,
    core_graph,
    expand,
    find_m,
    oracle_fg,
    partition_Y,
)


@pytest.fixture(scope="session")
def f2_ball5():
    return expand(oracle_fg(core_graph(2, [])), 5)


@pytest.fixture(scope="session")
def f2_ball8():
    return expand(oracle_fg(core_graph(2, [])), 8)


@pytest.fixture(scope="session")
def tower6():
    return build_tarski_tower(2, 3, 6)


@pytest.fixture(scope="session")
def tower6_partition(tower6):
    window, spec = tower6
    return partition_Y(window, spec)


@pytest.fixture(scope="session")
def ftower6():
    return build_filtration_tower(2, 1, 2, 6)


@pytest.fixture(scope="session")
def findm12():
    return find_m(1, 2)
