"""Definitional reference computations on plain Python sets.

Everything here works on edge-name sets and adjacency dicts only, so it
shares no code with the package under test.
"""

from itertools import combinations


def edges_of(G):
    return {e: tuple(e.split("|")) for e in G.edge_ids}


def vset(G, X):
    E = edges_of(G)
    return {v for e in X for v in E[e]}


def bnd(G, X):
    X = set(X)
    rest = set(G.edge_ids) - X
    return vset(G, X) & vset(G, rest)


def all_subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        for c in combinations(items, r):
            yield frozenset(c)


def separations_up_to(G, k):
    return {X for X in all_subsets(G.edge_ids) if len(bnd(G, X)) <= k}


def comps(G, removed):
    adj = {v: set() for v in G.vertices if v not in removed}
    for a, b in edges_of(G).values():
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)
    seen, out = set(), []
    for v in sorted(adj):
        if v in seen:
            continue
        stack, C = [v], set()
        while stack:
            x = stack.pop()
            if x in C:
                continue
            C.add(x)
            stack.extend(adj[x] - C)
        seen |= C
        out.append(frozenset(C))
    return out


def s_of(G, W):
    return frozenset(e for e, (a, b) in edges_of(G).items() if a in W or b in W)


def nested_naive(G, X, Y):
    E = set(G.edge_ids)
    X, Y = set(X), set(Y)
    return any(a <= b for a in (X, E - X) for b in (Y, E - Y))


def L(G, X, Y):
    E = set(G.edge_ids)
    return vset(G, X) & vset(G, Y) & (vset(G, E - set(X)) | vset(G, E - set(Y)))


def is_componental_naive(G, X):
    X = frozenset(X)
    S = bnd(G, X)
    return any(s_of(G, C) == X for C in comps(G, S))


def profile_axioms(G, k, P, singletons=True):
    """P0-P3 and the single-edge clause for an explicit member set P."""
    E = frozenset(G.edge_ids)
    seps = separations_up_to(G, k)
    for X in seps:
        if (X in P) == (E - X in P):
            return "P0"
    for X in P:
        for Y in P:
            if not X & Y:
                return "P1"
    for X in P:
        for Y in P:
            if len(L(G, X, Y)) <= k and X & Y not in P:
                return "P2"
    for X in P:
        if not any(Y <= X and is_componental_naive(G, Y) for Y in P):
            return "P3"
    if singletons and any(len(X) == 1 for X in P):
        return "singleton"
    return None


def all_profiles(G, k, singletons=True):
    """Every member set satisfying the axioms, by choosing one side per pair."""
    from itertools import product
    E = frozenset(G.edge_ids)
    seps = separations_up_to(G, k)
    pairs = []
    seen = set()
    for X in sorted(seps, key=lambda s: sorted(s)):
        if X in seen:
            continue
        seen |= {X, E - X}
        pairs.append((X, E - X))
    out = []
    for pick in product((0, 1), repeat=len(pairs)):
        P = frozenset(p[b] for p, b in zip(pairs, pick))
        if profile_axioms(G, k, P, singletons) is None:
            out.append(P)
    return out
