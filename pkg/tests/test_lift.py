import json
import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from sepkit.distinguisher import build_nested_distinguishing_set
from sepkit.errors import InputError
from sepkit.graph import Graph
from sepkit.lift import (
    attached_separations, block_side, forcing_violations, hat, lift_across_blocks, tilde,
)
from sepkit.profiles import distinguishes, enumerate_profile_levels
from sepkit.separations import nested
from sepkit.torso import check_nested, induce_profile, induce_separation, torso_of, torsos

from conftest import connected_graphs, random_graphs


def naive_hat(T, Y):
    """Forcing closure on plain name sets."""
    G, TG = T.host, T.graph
    C = set(TG.names(TG.vert_of(Y)))
    D = set(TG.names(TG.vert_of(TG.full & ~Y)))
    M = [set(G.sorted_ids(X)) for X in attached_separations(T)]
    forced = {e for e in G.edge_ids if set(e.split("|")) & (C - D)}
    grew = True
    while grew:
        grew = False
        for X in M:
            if X & forced and not X <= forced:
                forced |= X
                grew = True
    return forced


def right_torso(G):
    N = [G.sep(["1|2", "1|3", "2|3"])]
    return next(T for T in torsos(G, N) if T.block == G.vmask("3456"))


def fixed_order(_, fam):
    return list(fam)


# -- hat ------------------------------------------------------------------------

def test_hat_without_system_is_step_one(pabcd):
    G = pabcd
    T = torso_of(G, [], G.vfull)
    Y = G.sep(["a|b"])
    F, trace = hat(T, Y)
    assert G.sorted_ids(F) == ["a|b"]            # only a lies on the Y side alone
    assert set(trace.edge_step.values()) == {1}
    assert hat(T, 0)[0] == 0


def test_hat_swallows_far_side(db):
    G = db
    T = right_torso(G)
    Y = T.graph.sep(["3|4"])
    F, trace = hat(T, Y)
    assert G.sorted_ids(F) == ["1|2", "1|3", "2|3", "3|4"]
    assert set(G.sorted_ids(F)) == naive_hat(T, Y)
    assert trace.edge_step[G.eindex["1|2"]] == 3
    assert all(nested(G, F, X) for X in T.nested_set)
    doc = json.loads(json.dumps(trace.to_json(G)))
    assert doc["forced"] == G.sorted_ids(F)


def test_hat_rejects_foreign_separation(db):
    T = right_torso(db)
    with pytest.raises(InputError):
        hat(T, 1 << 40)


def random_setups(count, seed):
    out = []
    for G in random_graphs(count, seed, n_range=(5, 8), max_m=13):
        res = build_nested_distinguishing_set(G, k_max=2)
        for host, N, B in res.trace.torsos:
            out.append(torso_of(host, N, B))
    return out


SETUPS = random_setups(12, seed=21)


@pytest.mark.parametrize("T", SETUPS[:40])
def test_forcing_facts_on_constructed_torsos(T):
    rng = random.Random(T.graph.m)
    TG = T.graph
    for _ in range(20):
        Y = rng.randrange(TG.full + 1)
        assert forcing_violations(T, Y) == []
        F, _ = hat(T, Y)
        assert set(T.host.sorted_ids(F)) == naive_hat(T, Y)
        assert all(nested(T.host, F, X) for X in T.nested_set)


@pytest.mark.parametrize("T", SETUPS[:40])
def test_hat_is_monotone(T):
    rng = random.Random(T.graph.m + 1)
    TG = T.graph
    for _ in range(20):
        Z = rng.randrange(TG.full + 1)
        Y = Z & rng.randrange(TG.full + 1)
        assert not hat(T, Y)[0] & ~hat(T, Z)[0]


def test_block_side_tie_break(pabcd):
    G = pabcd
    X = G.sep(["a|b", "b|c"])
    # c lies on both sides: the smaller side wins
    assert block_side(G, X, G.vmask("c")) == G.sep(["c|d"])
    assert block_side(G, X, G.vmask("b")) == X


# -- tilde ------------------------------------------------------------------------

def test_single_member_lifts_to_its_hat(db):
    T = right_torso(db)
    Y = T.graph.sep(["3|4"])
    ext = tilde(T, [Y])
    assert ext.lifted == (hat(T, Y)[0],)


def test_chain_inclusion_preserved(db):
    T = right_torso(db)
    TG = T.graph
    Y0 = TG.sep(["3|4"])
    Y1 = TG.sep(["3|4", "4|5", "4|6"])
    ext = tilde(T, [Y0, Y1], order=fixed_order)
    t0, t1 = ext.lifted
    assert not t0 & ~t1
    for Y, tY in zip(ext.family, ext.lifted):
        assert not db.boundary_mask(tY) & ~T.to_host_vertices(TG.boundary_mask(Y))


def test_tilde_rejects_crossing_family(db):
    T = torso_of(db, [], db.vfull)
    G = T.graph
    with pytest.raises(InputError):
        tilde(T, [G.sep(["1|2", "1|3"]), G.sep(["1|3", "2|3"])])
    with pytest.raises(InputError):
        tilde(T, [G.sep(["1|2"]), G.sep(["1|2"])], order=fixed_order)


@pytest.mark.parametrize("T", SETUPS[:40])
def test_tilde_guarantees_on_random_chains(T):
    rng = random.Random(T.graph.m + 2)
    TG = T.graph
    fam = []
    for _ in range(12):
        Y = rng.randrange(TG.full + 1)
        if Y not in fam and all(nested(TG, Y, Z) for Z in fam):
            fam.append(Y)
    ext = tilde(T, fam)
    G = T.host
    assert check_nested(G, list(ext.lifted) + list(T.nested_set)) is None
    for Y, tY, F, Fc in zip(ext.family, ext.lifted, ext.forced, ext.forced_c):
        assert not G.boundary_mask(tY) & ~T.to_host_vertices(TG.boundary_mask(Y))
        assert not F & Fc
        assert not F & ~tY and not Fc & tY


def literal_rule_example():
    E = ("v0v1 v0v5 v0v7 v0v8 v1v4 v1v5 v1v7 v2v8 v3v6 v3v7 v3v8 v4v5 v4v7 v4v8 "
         "v5v6 v5v7 v6v7 v6v8").split()
    G = Graph.from_pairs([f"v{i}" for i in range(9)], [(e[:2], e[2:]) for e in E])
    Y0 = G.sep(["v2|v8"])
    Y1 = G.sep(["v0|v1", "v0|v5", "v0|v7", "v0|v8", "v1|v4", "v1|v5", "v1|v7",
                "v4|v5", "v4|v7", "v4|v8"])
    Y2 = Y1 | G.sep(["v5|v6", "v5|v7"])
    return G, [Y0, Y1, Y2]


def test_literal_complement_rule_overlaps_on_unforced_boundary_edges():
    # v6v7 and v6v8 join boundary vertices of the last member and nobody forces
    # them; the "above" clause hands them to both the member and its complement
    G, fam = literal_rule_example()
    ext = tilde(torso_of(G, [], G.vfull), fam, order=fixed_order)
    assert ext.complement_mismatches() == [2]
    assert G.sorted_ids(ext.overlaps[2]) == ["v6|v7", "v6|v8"]
    # the stored complement is the plain one and every guarantee still holds
    assert check_nested(G, list(ext.lifted)) is None


# -- lifting across blocks -----------------------------------------------------------

def test_empty_families_keep_the_system(db):
    N = [db.sep(["1|2", "1|3", "2|3"])]
    assert lift_across_blocks(db, N, {}) == N
    assert lift_across_blocks(db, [], {db.vfull: []}) == []


def test_two_blocks_one_cut_each(db):
    G = db
    N = [G.sep(["1|2", "1|3", "2|3"]), G.sep(["4|5", "4|6", "5|6"])]
    fams = {}
    for T in torsos(G, N):
        if T.block == G.vmask("123"):
            fams[T.block] = [T.graph.sep(["1|2", "1|3"])]
        elif T.block == G.vmask("456"):
            fams[T.block] = [T.graph.sep(["4|6", "5|6"])]
    out = lift_across_blocks(G, N, fams)
    assert len(out) == 4
    assert all(nested(G, X, Y) for X, Y in combinations(out, 2))


def test_lift_keeps_distinguishing():
    from test_torso import ladder
    G = ladder()
    lv = enumerate_profile_levels(G, 2)
    ab = G.vmask("ab")
    P = next(p for p in lv[2] if "c" in G.names(p.choice[ab]) and "a" in G.names(p.choice[G.vmask("d")]))
    Q = next(p for p in lv[2] if "w" in G.names(p.choice[ab]))
    N = [G.sep(["d|t", "d|u", "t|u"])]
    T = next(T for T in torsos(G, N) if T.block & G.vmask("w"))
    YB = induce_separation(T, G.s_mask(G.vmask("wxyz")))
    assert distinguishes(T.graph, YB, induce_profile(T, P), induce_profile(T, Q))
    (tY,) = tilde(T, [YB]).lifted
    assert distinguishes(G, tY, P, Q)


@settings(max_examples=20)
@given(connected_graphs(min_n=4, max_n=7), st.integers(0, 99))
def test_lifted_blocks_nested_with_system(G, seed):
    rng = random.Random(seed)
    res = build_nested_distinguishing_set(G, k_max=1)
    N = res.nested
    fams = {}
    for T in torsos(G, N):
        fam = []
        for _ in range(6):
            Y = rng.randrange(T.graph.full + 1)
            if Y not in fam and all(nested(T.graph, Y, Z) for Z in fam):
                fam.append(Y)
        fams[T.block] = fam
    out = lift_across_blocks(G, N, fams)
    assert check_nested(G, out) is None
