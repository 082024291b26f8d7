import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from sepkit.errors import InputError, NotInducibleError
from sepkit.graph import Graph, cycle_graph
from sepkit.oracle import enumerate_separations, min_distinguishing_order
from sepkit.profiles import (
    check_profile_axioms, distinguishes, enumerate_profile_levels, enumerate_profiles,
    is_good_haven, is_r_robust,
)
from sepkit.separations import nested
from sepkit.torso import (
    blocks, check_torso_clique, induce_haven, induce_profile, induce_separation, inducible,
    profile_sets_per_block, torso_of, torsos,
)

from conftest import connected_graphs


def names(G, masks):
    return sorted(sorted(G.names(B)) for B in masks)


def random_nested(G, rng, k=2, tries=30):
    seps = [X for X in enumerate_separations(G, k) if X and X != G.full]
    N = []
    for _ in range(tries):
        if not seps:
            break
        X = rng.choice(seps)
        if X not in N and all(nested(G, X, Z) for Z in N):
            N.append(X)
    return N


def left(G):
    return G.sep(["1|2", "1|3", "2|3"])


def side_profile(G, profs, v):
    return next(P for P in profs if v in G.names(P.choice[G.vmask(["3"])])
                and v in G.names(P.choice[G.vmask(["4"])]))


# -- blocks -------------------------------------------------------------------

def test_no_separations_one_block(db):
    assert blocks(db, []) == [db.vfull]


def test_path_blocks(pabcd):
    G = pabcd
    assert names(G, blocks(G, [G.sep(["a|b"])])) == [["a", "b"], ["b", "c", "d"]]


def test_dumbbell_blocks(db):
    G = db
    X = G.sep(["1|2", "1|3", "2|3", "3|4"])
    assert names(G, blocks(G, [X])) == [["1", "2", "3", "4"], ["4", "5", "6"]]
    R = G.sep(["4|5", "4|6", "5|6"])
    assert names(G, blocks(G, [left(G), R])) == [["1", "2", "3"], ["3", "4"], ["4", "5", "6"]]


def test_blocks_reject_crossing_system():
    G = cycle_graph("abcd")
    with pytest.raises(InputError):
        blocks(G, [G.sep(["a|b", "b|c"]), G.sep(["b|c", "c|d"])])


@settings(max_examples=25)
@given(connected_graphs(min_n=3, max_n=7), st.integers(0, 1000))
def test_blocks_are_maximal_and_cover(G, seed):
    N = random_nested(G, random.Random(seed))
    B = blocks(G, N)
    cover = 0
    for b in B:
        cover |= b
        for X in N:
            for u in G.names(b):
                for v in G.names(b):
                    VX, VXc = G.vert_of(X), G.vert_of(G.full & ~X)
                    iu, iv = G.index[u], G.index[v]
                    assert not (VX >> iu & 1 and not VXc >> iu & 1 and VXc >> iv & 1 and not VX >> iv & 1)
        # adding any outside vertex makes it separated
        for w in G.vertices:
            if b >> G.index[w] & 1:
                continue
            bigger = b | G.vmask([w])
            assert not any(not bigger & ~other for other in B)
    assert cover == G.vfull


# -- torsos ----------------------------------------------------------------------

def test_torso_without_separations_is_the_graph(db):
    T = torso_of(db, [], db.vfull)
    assert sorted(T.graph.edge_ids) == sorted(db.edge_ids)


def test_singleton_boundary_adds_no_edge(pabcd):
    G = pabcd
    T = torso_of(G, [G.sep(["a|b"])], G.vmask("bcd"))
    assert sorted(T.graph.edge_ids) == ["b|c", "c|d"]


def test_four_cycle_torso_gets_virtual_edge():
    G = cycle_graph("abcd")
    X = G.sep(["a|b", "a|d"])
    T = torso_of(G, [X], G.vmask("bcd"))
    assert "b|d*" in T.graph.edge_ids
    assert T.provenance["b|d*"] == [X]
    assert T.graph.virtual == {"b|d*"}


def test_torso_rejects_bad_block(pabcd):
    with pytest.raises(InputError):
        torso_of(pabcd, [], 0)


@settings(max_examples=25)
@given(connected_graphs(min_n=3, max_n=7), st.integers(0, 1000))
def test_outside_neighbourhoods_are_cliques(G, seed):
    N = random_nested(G, random.Random(seed))
    for B in blocks(G, N):
        assert check_torso_clique(G, N, B) is None


@settings(max_examples=25)
@given(connected_graphs(min_n=3, max_n=7), st.integers(0, 1000))
def test_virtual_edges_match_boundary_pairs(G, seed):
    N = random_nested(G, random.Random(seed))
    for T in torsos(G, N):
        expect = set()
        for X in N:
            S = sorted(G.names(G.boundary_mask(X) & T.block))
            expect |= {frozenset(p) for p in combinations(S, 2)}
        real = {frozenset(e.split("|")) for e in T.graph.edge_ids if not e.endswith("*")}
        virt = {frozenset(e[:-1].split("|")) for e in T.graph.edge_ids if e.endswith("*")}
        assert virt == expect - real
        assert all(G.edge_of(*sorted(p)) is not None for p in real)


# -- induced separations -----------------------------------------------------------

def test_induced_separation_trivial_cases(db):
    T = torso_of(db, [], db.vfull)
    Y = left(db)
    assert T.graph.sorted_ids(induce_separation(T, Y)) == db.sorted_ids(Y)
    assert induce_separation(T, 0) == 0


def test_induced_separation_on_dumbbell(db):
    G = db
    N = [left(G)]
    Y = G.sep(["1|2", "1|3", "2|3", "3|4"])
    for T in torsos(G, N):
        YB = induce_separation(T, Y)
        assert T.to_host_vertices(T.graph.boundary_mask(YB)) & ~G.boundary_mask(Y) == 0


def test_induced_separation_needs_nesting():
    G = cycle_graph("abcd")
    X = G.sep(["a|b", "b|c"])
    T = torso_of(G, [X], G.vmask("acd"))
    with pytest.raises(InputError):
        induce_separation(T, G.sep(["b|c", "c|d"]))


@settings(max_examples=25)
@given(connected_graphs(min_n=3, max_n=7), st.integers(0, 1000))
def test_induced_boundary_shrinks(G, seed):
    rng = random.Random(seed)
    N = random_nested(G, rng)
    cands = [Y for Y in enumerate_separations(G, 3) if all(nested(G, Y, X) for X in N)]
    for T in torsos(G, N):
        for Y in rng.sample(cands, min(8, len(cands))):
            YB = induce_separation(T, Y)
            assert not T.to_host_vertices(T.graph.boundary_mask(YB)) & ~G.boundary_mask(Y)


# -- induced havens and profiles --------------------------------------------------------

def test_induced_haven_without_separations(db):
    T = torso_of(db, [], db.vfull)
    for P in enumerate_profiles(db, 1):
        assert induce_haven(T, P.haven).choice == P.choice


def test_left_profile_induces_on_left_block(db):
    G = db
    profs = enumerate_profiles(G, 1)
    P = side_profile(G, profs, "1")
    T = next(T for T in torsos(G, [left(G)]) if T.block == G.vmask("123"))
    H = induce_haven(T, P.haven)
    assert is_good_haven(T.graph, H)
    PB = induce_profile(T, P)
    assert PB.order == 2 and check_profile_axioms(T.graph, PB)


def test_right_profile_does_not_induce_on_left_block(db):
    G = db
    R = side_profile(G, enumerate_profiles(G, 1), "6")
    T = next(T for T in torsos(G, [left(G)]) if T.block == G.vmask("123"))
    assert not inducible(T, R.haven)
    with pytest.raises(NotInducibleError) as info:
        induce_haven(T, R.haven)
    assert info.value.witness[0] == {"3"}


def ladder():
    """Two K4s joined by two disjoint edges, with a triangle hanging off d."""
    pairs = (list(combinations("abcd", 2)) + list(combinations("wxyz", 2))
             + [("a", "w"), ("b", "x"), ("d", "t"), ("d", "u"), ("t", "u")])
    return Graph.from_pairs("abcdwxyztu", pairs)


def test_efficient_distinguisher_survives_in_its_block():
    G = ladder()
    lv = enumerate_profile_levels(G, 2)
    ab = G.vmask("ab")
    P = next(p for p in lv[2] if "c" in G.names(p.choice[ab]) and "a" in G.names(p.choice[G.vmask("d")]))
    Q = next(p for p in lv[2] if "w" in G.names(p.choice[ab]))
    N = [G.sep(["d|t", "d|u", "t|u"])]
    Y = G.s_mask(G.vmask("wxyz"))
    assert distinguishes(G, Y, P, Q) and G.order(Y) == min_distinguishing_order(G, P, Q) == 2
    home = [B for B in blocks(G, N) if not G.boundary_mask(Y) & ~B]
    assert len(home) == 1
    T = torso_of(G, N, home[0])
    PB, QB = induce_profile(T, P), induce_profile(T, Q)
    assert PB.order == QB.order == 3
    assert is_r_robust(T.graph, PB, None) and is_r_robust(T.graph, QB, None)
    YB = induce_separation(T, Y)
    assert distinguishes(T.graph, YB, PB, QB)
    assert T.graph.order(YB) == min_distinguishing_order(T.graph, PB, QB)


# -- profile sets per block ----------------------------------------------------------

def counts(G, d):
    return {"".join(sorted(G.names(B))): len(v) for B, v in d.items()}


def test_per_block_empty_when_all_lower_distinguished(db):
    G = db
    lv = enumerate_profile_levels(G, 1)
    assert counts(G, profile_sets_per_block(G, [left(G)], lv[1], 1)) == {"123": 0, "3456": 0}


def test_per_block_collects_higher_order_pairs():
    G = ladder()
    lv = enumerate_profile_levels(G, 2)
    N = [G.sep(["d|t", "d|u", "t|u"])]
    assert counts(G, profile_sets_per_block(G, N, lv[2], 1)) == {"abcdwxyz": 2, "dtu": 0}
    assert counts(G, profile_sets_per_block(G, [], lv[2], 1)) == {"abcdtuwxyz": 2}


def test_per_block_with_no_system(db):
    lv = enumerate_profile_levels(db, 1)
    assert counts(db, profile_sets_per_block(db, [], lv[1], 0)) == {"123456": 3}
