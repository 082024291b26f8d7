"""Nested sets of separations distinguishing profiles efficiently.

``build_nested_distinguishing_set`` grows nested systems N_{-1} = {} within
N_0 within N_1 ... level by level.  At each level and each N_k-block it works in the
torso, first cutting off junk (the S-set), then choosing tight
non-disqualified distinguishers inside the torsos of the S-blocks, and finally
lifting everything back to G twice.  Each step that the construction relies
on is checked and reported as a :class:`ConsistencyError` with a witness if
it fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .errors import ConsistencyError, InputError, NotInducibleError
from .graph import Graph, popcount
from .lift import ExtendedFamily, tilde
from .oracle import DEFAULT_BUDGET, OracleBudget, enumerate_separations
from .profiles import (Haven, Profile, close_under_restriction, differing_separators,
                       distinguishers_at, distinguishes, distinguishing_order,
                       enumerate_profile_levels, good_haven_witness, is_haven, normalize_r)
from .separations import disqualifies, is_tight_mask, nested, sep_key
from .torso import Torso, blocks, check_nested, induce_profile, torso_of


def _pairs(Pset: Sequence[Profile]):
    for i, j in combinations(range(len(Pset)), 2):
        m = distinguishing_order(Pset[i], Pset[j])
        if m is not None:
            yield i, j, m


def _canonical(G: Graph, X: int) -> int:
    return min(X, G.full & ~X)


def R_set(G: Graph, k: int, r, Pset: Sequence[Profile]) -> set[int]:
    """Separations of order <= k distinguishing two members efficiently.

    r only names the robustness of the profile set; it does not bound the order.
    """
    out: set[int] = set()
    for i, j, m in _pairs(Pset):
        if m > k:
            continue
        P, Q = Pset[i], Pset[j]
        for S in differing_separators(P, Q, m):
            for X in distinguishers_at(G, P, Q, S):
                out.add(X)
                out.add(G.full & ~X)
    return out


def S_set(G: Graph, k: int, r, Pset: Sequence[Profile], R: set[int] | None = None) -> set[int]:
    """s_C for components C of G - dX with d(s_C) a proper subset of dX, X in R."""
    if R is None:
        R = R_set(G, k, r, Pset)
    out: set[int] = set()
    seen: set[int] = set()
    for X in R:
        S = G.boundary_mask(X)
        if S in seen:
            continue
        seen.add(S)
        for C in G.components(S):
            s = G.s_mask(C)
            if G.boundary_mask(s) != S:
                out.add(s)
    return out


def in_pool(G: Graph, Y: int, R_rr: set[int]) -> bool:
    """Y is tight and not disqualified by any member of R_rr."""
    return is_tight_mask(G, Y) and not any(disqualifies(G, X, Y) for X in R_rr)


def candidate_pool(G: Graph, k: int, r, Pset: Sequence[Profile],
                   budget: OracleBudget = DEFAULT_BUDGET) -> list[int]:
    """U: tight separations of order <= k not disqualified by R(r, r)."""
    r = normalize_r(G, r)
    R_rr = R_set(G, r, r, Pset)
    return [Y for Y in enumerate_separations(G, k, budget)
            if Y and Y != G.full and in_pool(G, Y, R_rr)]


@dataclass
class DistinguisherTrace:
    extensions: list = field(default_factory=list)   # every ExtendedFamily computed
    torsos: list = field(default_factory=list)       # (host graph, nested tuple, block)
    checkpoints: list = field(default_factory=list)  # names of passed checks


@dataclass
class DistinguisherResult:
    graph: Graph
    r: int
    profiles: list
    nested: list
    levels: dict
    trace: DistinguisherTrace
    certificates: dict

    def ids(self) -> list[list[str]]:
        return [self.graph.sorted_ids(X) for X in self.nested]


def _block_profiles(host: Graph, N: Sequence[int], blks: Sequence[int],
                    Pset: Sequence[Profile], threshold: int) -> dict[int, set[int]]:
    """Indices of profiles efficiently distinguished from another one by some Y
    nested with N, of order >= threshold and with dY inside the block."""
    assign = {B: set() for B in blks}
    for i, j, m in _pairs(Pset):
        if m < threshold:
            continue
        P, Q = Pset[i], Pset[j]
        found = False
        for S in differing_separators(P, Q, m):
            for Y in distinguishers_at(host, P, Q, S):
                if all(nested(host, Y, X) for X in N):
                    for B in blks:
                        if not S & ~B:
                            assign[B].update((i, j))
                            found = True
                    break
        if not found:
            raise ConsistencyError("nested system is not extendable for a profile pair",
                                   (i, j, m))
    return assign


def _induce_all(T: Torso, Pset: Sequence[Profile]) -> list[Profile]:
    out: dict[tuple, Profile] = {}
    for P in Pset:
        try:
            PB = induce_profile(T, P)
        except NotInducibleError as exc:
            raise ConsistencyError("profile does not induce on its torso", exc.witness) from exc
        out.setdefault(PB.key(), PB)
    return [out[key] for key in sorted(out)]


def _select(TG: Graph, Pset: Sequence[Profile], level: int, r: int, maximal: bool,
            budget: OracleBudget) -> list[int]:
    """Nested tight non-disqualified separations of order <= level distinguishing
    every pair of Pset; greedy in ascending (order, edge ids)."""
    R_rr = R_set(TG, r, r, Pset)
    cands = sorted((X for X in R_set(TG, level, r, Pset) if X and X != TG.full),
                   key=lambda X: sep_key(TG, X))
    chosen: list[int] = []
    for i, j, m in sorted(_pairs(Pset), key=lambda t: (t[2], t[0], t[1])):
        if m > level:
            continue
        if m < level:
            raise ConsistencyError("profile pair distinguishable below the current level",
                                   (i, j, m))
        P, Q = Pset[i], Pset[j]
        if any(TG.order(X) == m and distinguishes(TG, X, P, Q) for X in chosen):
            continue
        for X in cands:
            if TG.order(X) == m and distinguishes(TG, X, P, Q) \
                    and all(nested(TG, X, Y) for Y in chosen):
                if not in_pool(TG, X, R_rr):
                    raise ConsistencyError("efficient distinguisher outside the tight pool",
                                           TG.sorted_ids(X))
                chosen.append(X)
                break
        else:
            raise ConsistencyError("no nested efficient distinguisher for a pair", (i, j, m))
    if maximal:
        have = {_canonical(TG, X) for X in chosen}
        for Y in enumerate_separations(TG, level, budget):
            if not Y or Y == TG.full or _canonical(TG, Y) in have:
                continue
            if in_pool(TG, Y, R_rr) and all(nested(TG, Y, X) for X in chosen):
                chosen.append(Y)
                have.add(_canonical(TG, Y))
    return chosen


def _dedupe(G: Graph, family: Sequence[int]) -> list[int]:
    out, seen = [], set()
    for X in family:
        c = _canonical(G, X)
        if c not in seen and X and X != G.full:
            seen.add(c)
            out.append(X)
    return out


def certify(G: Graph, N: Sequence[int], Pset: Sequence[Profile]) -> dict:
    """For each distinguishable pair (i, j), a member of N distinguishing it at
    the least possible order; raises if some pair has none."""
    certs = {}
    for i, j, m in _pairs(Pset):
        for X in N:
            if G.order(X) == m and distinguishes(G, X, Pset[i], Pset[j]):
                certs[(i, j)] = X
                break
        else:
            raise ConsistencyError("pair not distinguished efficiently", (i, j, m))
    return certs


def build_nested_distinguishing_set(G: Graph, r=None, profiles: Sequence[Profile] | None = None,
                                    k_max: int | None = None, maximal: bool = False,
                                    budget: OracleBudget = DEFAULT_BUDGET) -> DistinguisherResult:
    if not G.is_connected():
        raise InputError("graph must be connected")
    r = normalize_r(G, r)
    if profiles is None:
        top = min(G.n - 1, budget.max_k) if k_max is None else k_max
        lv = enumerate_profile_levels(G, top, r, budget=budget)
        Pset = [p for level in lv for p in level]
    else:
        for P in profiles:
            if P.graph != G:
                raise InputError("profile belongs to a different graph")
        Pset = close_under_restriction(profiles)
    Pset = sorted(Pset, key=lambda P: P.key())
    trace = DistinguisherTrace()
    orders = [m for _, _, m in _pairs(Pset)]
    N: list[int] = []
    levels = {-1: []}
    for k in range(-1, max(orders, default=-1)):
        if k + 1 not in orders:
            levels[k + 1] = list(N)
            continue
        blks = blocks(G, N)
        assign = _block_profiles(G, N, blks, Pset, k + 1)
        new: list[int] = []
        for B in blks:
            idx = sorted(assign[B])
            if len(idx) < 2:
                continue
            T = torso_of(G, N, B)
            trace.torsos.append((G, tuple(N), B))
            PB = _induce_all(T, [Pset[i] for i in idx])
            inner = _level_in_torso(T, PB, k, r, maximal, budget, trace)
            if inner:
                ext = tilde(T, inner)
                trace.extensions.append(ext)
                new.extend(ext.lifted)
        N = _dedupe(G, N + new)
        w = check_nested(G, N)
        if w is not None:
            raise ConsistencyError("level system is not nested", w)
        for i, j, m in _pairs(Pset):
            if m == k + 1 and not any(G.order(X) == m and distinguishes(G, X, Pset[i], Pset[j])
                                      for X in N):
                raise ConsistencyError("level misses an efficient distinguisher", (i, j, m))
        trace.checkpoints.append(f"level {k + 1}")
        levels[k + 1] = list(N)
    certs = certify(G, N, Pset)
    return DistinguisherResult(G, r, Pset, N, levels, trace, certs)


def _level_in_torso(T: Torso, PB: list[Profile], k: int, r: int, maximal: bool,
                    budget: OracleBudget, trace: DistinguisherTrace) -> list[int]:
    """N_{k+1}(B) inside the torso T: the S-set plus lifted per-block selections."""
    TG = T.graph
    for i, j, m in _pairs(PB):
        if m <= k:
            raise ConsistencyError("torso profiles distinguishable at a finished level",
                                   (i, j, m))
    S1 = sorted(_dedupe(TG, S_set(TG, k + 1, r, PB)), key=lambda X: sep_key(TG, X))
    w = check_nested(TG, S1)
    if w is not None:
        raise ConsistencyError("junk separations are not nested", w)
    blks = blocks(TG, S1)
    assign = _block_profiles(TG, S1, blks, PB, k + 1)
    inner = list(S1)
    for B2 in blks:
        idx = sorted(assign[B2])
        if len(idx) < 2:
            continue
        T2 = torso_of(TG, S1, B2)
        trace.torsos.append((TG, tuple(S1), B2))
        PB2 = _induce_all(T2, [PB[i] for i in idx])
        leftover = S_set(T2.graph, k + 1, r, PB2)
        if leftover:
            raise ConsistencyError("junk remains after cutting it off",
                                   [T2.graph.sorted_ids(X) for X in sorted(leftover)])
        chosen = _select(T2.graph, PB2, k + 1, r, maximal, budget)
        if chosen:
            ext = tilde(T2, chosen)
            trace.extensions.append(ext)
            inner.extend(ext.lifted)
    inner = _dedupe(TG, inner)
    w = check_nested(TG, inner)
    if w is not None:
        raise ConsistencyError("torso system is not nested", w)
    return sorted(inner, key=lambda X: sep_key(TG, X))


# -- end profiles on truncations -------------------------------------------------

def end_haven(G: Graph, cls: Sequence[str], ray: Sequence[str], k: int) -> Haven:
    """Haven of a frontier class: pick the component holding the class; if the
    separator swallows the class, follow the ray back to its last free vertex."""
    W = G.vmask(cls)
    ray_idx = [G.index[v] for v in ray]
    choice = {}
    for S in G.separators(k):
        comps = G.components(S)
        rest = W & ~S
        if rest:
            hits = [C for C in comps if C & rest]
            if len(hits) != 1:
                raise ConsistencyError("separator splits a frontier class", sorted(G.names(S)))
            choice[S] = hits[0]
            continue
        free = [v for v in ray_idx if not S >> v & 1]
        if not free:
            raise ConsistencyError("separator covers the whole surrogate ray", sorted(G.names(S)))
        choice[S] = G.component_of(S, free[-1])
    return Haven(G, k, choice)


def end_profile(F, end_id: str, k: int) -> Profile:
    """Profile of the end surrogate ``end_id`` of a truncated family.

    Verified to be a good haven; singletons are allowed since leaves of a
    truncation are legitimate stand-ins for ends.
    """
    if end_id not in F.classes:
        raise InputError(f"unknown end surrogate {end_id!r}")
    G = F.graph
    H = end_haven(G, sorted(F.classes[end_id]), F.ray(end_id), k)
    if not is_haven(G, H):
        raise ConsistencyError("end choice is not a haven", end_id)
    w = good_haven_witness(G, H)
    if w is not None:
        raise ConsistencyError("end haven is not good", w)
    return Profile(H, singletons="none")


def end_lives_in(G: Graph, cls: Sequence[str], X: int) -> bool | None:
    """True/False if the class lies on one side away from dX; None if dX meets
    or splits it (the truncation does not decide)."""
    W = G.vmask(cls)
    S = G.boundary_mask(X)
    if W & S:
        return None
    VX = G.vert_of(X)
    if not W & ~VX:
        return True
    if not W & VX:
        return False
    return None
