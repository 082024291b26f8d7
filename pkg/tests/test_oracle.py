import pytest

from sepkit.errors import CapacityError, InputError
from sepkit.graph import complete_graph, dumbbell, path_graph
from sepkit.oracle import (
    OracleBudget, enumerate_separations, min_distinguishing_order, powerset_separations,
    separations_with_boundary_in,
)
from sepkit.profiles import enumerate_profile_levels

from conftest import random_graphs


def test_order_zero_is_trivial():
    G = path_graph("abc")
    assert enumerate_separations(G, 0) == [0, G.full]
    assert enumerate_separations(G, -1) == []


def test_small_counts():
    assert len(enumerate_separations(path_graph("abc"), 1)) == 4
    G = dumbbell()
    assert len(enumerate_separations(G, 1)) == 6
    assert len(enumerate_separations(G, 2)) == 28


@pytest.mark.parametrize("G", random_graphs(15, seed=5, n_range=(3, 8), max_m=14))
def test_matches_power_set_filter(G):
    for k in (0, 1, 2):
        assert enumerate_separations(G, k) == powerset_separations(G, k)


def test_boundary_inside_separator(db):
    S = db.vmask(["3", "4"])
    for X in separations_with_boundary_in(db, S):
        assert not db.boundary_mask(X) & ~S


def test_budget_limits():
    with pytest.raises(CapacityError):
        enumerate_separations(complete_graph("abcdef"), 2, OracleBudget(max_vertices=5))
    with pytest.raises(CapacityError):
        enumerate_separations(path_graph("ab"), 4, OracleBudget(max_k=3))
    with pytest.raises(CapacityError):
        powerset_separations(complete_graph("abcdefg"), 1)


def test_min_order_on_dumbbell(db):
    lv = enumerate_profile_levels(db, 1)[1]
    orders = sorted(min_distinguishing_order(db, P, Q)
                    for i, P in enumerate(lv) for Q in lv[i + 1:])
    assert orders == [1, 1, 1]
    with pytest.raises(InputError):
        min_distinguishing_order(db, lv[0], lv[0])
