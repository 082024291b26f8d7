"""Blocks of nested separation systems, torsos and induced objects.

A torso keeps the vertex names and real edge ids of its host graph and adds
virtual edges named ``"x|y*"`` for every pair of block vertices lying together
in the boundary of some nested separation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConsistencyError, InputError, NotInducibleError
from .graph import Graph, bits, edge_id, popcount
from .profiles import (Haven, Profile, differing_separators, distinguishers_at,
                       distinguishing_order, good_haven_witness)
from .separations import nested


def check_nested(G: Graph, N: Sequence[int]) -> tuple[int, int] | None:
    """First non-nested pair of N, or None."""
    N = list(N)
    for i in range(len(N)):
        for j in range(i + 1, len(N)):
            if not nested(G, N[i], N[j]):
                return (N[i], N[j])
    return None


def blocks(G: Graph, N: Iterable[int]) -> list[int]:
    """Maximal vertex sets not separated by any member of N (vertex masks)."""
    N = list(N)
    if check_nested(G, N) is not None:
        raise InputError("separation system is not nested")
    parts = [G.vfull]
    full = G.full
    for X in N:
        VX, VXc = G.vert_of(X), G.vert_of(full & ~X)
        nxt = set()
        for B in parts:
            if not B & ~VX or not B & ~VXc:
                nxt.add(B)
                continue
            for piece in (B & VX, B & VXc):
                if piece:
                    nxt.add(piece)
        parts = _maximal(nxt)
    return sorted(parts, key=lambda B: sorted(G.names(B)))


def _maximal(sets: Iterable[int]) -> list[int]:
    sets = sorted(set(sets), key=popcount, reverse=True)
    keep: list[int] = []
    for B in sets:
        if not any(not B & ~K for K in keep):
            keep.append(B)
    return keep


def separates_vertices(G: Graph, X: int, u: int, v: int) -> bool:
    VX, VXc = G.vert_of(X), G.vert_of(G.full & ~X)
    return bool((VX >> u & 1 and not VXc >> u & 1 and VXc >> v & 1 and not VX >> v & 1)
                or (VXc >> u & 1 and not VX >> u & 1 and VX >> v & 1 and not VXc >> v & 1))


@dataclass
class Torso:
    """The torso of ``block`` (a vertex mask of ``host``) w.r.t. ``nested_set``."""

    host: Graph
    nested_set: tuple[int, ...]
    block: int
    graph: Graph
    provenance: dict = field(default_factory=dict)

    def to_host_vertices(self, W: int) -> int:
        return self.host.remap_vertices(self.graph, W)

    def to_torso_vertices(self, W: int) -> int:
        return self.graph.remap_vertices(self.host, W & self.block)

    def real_edges(self) -> int:
        """Torso edges that are edges of the host graph."""
        m = 0
        for i, e in enumerate(self.graph.edge_ids):
            if e in self.host.eindex:
                m |= 1 << i
        return m

    def host_edges(self, X: int) -> int:
        """Host edge mask of the real edges of torso separation X."""
        m = 0
        eindex = self.host.eindex
        for e in self.graph.sorted_ids(X):
            i = eindex.get(e)
            if i is not None:
                m |= 1 << i
        return m

    def ends_in_host(self, i: int) -> tuple[int, int]:
        a, b = self.graph.ends[i]
        idx = self.host.index
        return idx[self.graph.vertices[a]], idx[self.graph.vertices[b]]


def virtual_id(u: str, v: str) -> str:
    return edge_id(u, v) + "*"


def torso_of(G: Graph, N: Sequence[int], B: int) -> Torso:
    """G[B] plus a virtual edge xy for x, y in B sharing some boundary dX, X in N."""
    if not B or B & ~G.vfull:
        raise InputError("block must be a nonempty vertex set of the graph")
    N = tuple(N)
    base = G.induced(B)
    edges = [(eid, base.vertices[a], base.vertices[b])
             for eid, (a, b) in zip(base.edge_ids, base.ends)]
    present = {frozenset((u, v)) for _, u, v in edges}
    provenance: dict[str, list[int]] = {}
    virtual = set(base.virtual)
    added: dict[frozenset, str] = {}
    for X in N:
        S = G.boundary_mask(X) & B
        vs = [G.vertices[i] for i in bits(S)]
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                pair = frozenset((vs[i], vs[j]))
                if pair in present and pair not in added:
                    continue
                if pair not in added:
                    eid = virtual_id(vs[i], vs[j])
                    added[pair] = eid
                    edges.append((eid, vs[i], vs[j]))
                    virtual.add(eid)
                    present.add(pair)
                provenance.setdefault(added[pair], []).append(X)
    T = Graph(base.vertices, edges, virtual)
    return Torso(G, N, B, T, provenance)


def torsos(G: Graph, N: Sequence[int]) -> list[Torso]:
    return [torso_of(G, N, B) for B in blocks(G, N)]


def check_torso_clique(G: Graph, N: Sequence[int], B: int):
    """Each component C of G - B has N(C) inside some dX (X in N), hence complete
    in the torso.  Returns the first failing component mask, or None."""
    T = torso_of(G, N, B)
    full = G.full
    for C in G.components(B):
        NC = G.nbhd(C)
        if not any(not NC & ~(G.vert_of(X) & G.vert_of(full & ~X)) for X in N):
            return C
        names = [G.vertices[i] for i in bits(NC)]
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                if T.graph.edge_of(names[i], names[j]) is None \
                        and virtual_id(names[i], names[j]) not in T.graph.eindex:
                    return C
    return None


def induce_separation(T: Torso, Y: int) -> int:
    """Y_B: the real edges of Y inside B plus every torso edge xy with x, y in dX
    for some X in N such that V(X) or V(X^c) is contained in V(Y)."""
    G, TG = T.host, T.graph
    for X in T.nested_set:
        if not nested(G, X, Y):
            raise InputError("separation is not nested with the system")
    full = G.full
    VY = G.vert_of(Y)
    good_bounds = []
    for X in T.nested_set:
        if not G.vert_of(X) & ~VY or not G.vert_of(full & ~X) & ~VY:
            good_bounds.append(G.boundary_mask(X))
    out = 0
    for i, eid in enumerate(TG.edge_ids):
        j = G.eindex.get(eid)
        if j is not None and Y >> j & 1:
            out |= 1 << i
            continue
        a, b = T.ends_in_host(i)
        pair = (1 << a) | (1 << b)
        if any(not pair & ~S for S in good_bounds):
            out |= 1 << i
    return out


def induce_haven(T: Torso, H: Haven) -> Haven:
    """H_B: for S inside B pick the torso component of T - S containing C_S & B."""
    G, TG = T.host, T.graph
    if H.graph != G:
        raise InputError("haven belongs to a different graph")
    choice = {}
    for S in TG.separators(H.k):
        SG = T.to_host_vertices(S)
        C = H.choice[SG]
        CB = T.to_torso_vertices(C)
        if not CB:
            raise NotInducibleError("chosen component misses the block",
                                    (G.names(SG), G.names(C)))
        hits = [D for D in TG.components(S) if D & CB]
        if len(hits) != 1 or CB & ~hits[0]:
            raise NotInducibleError("chosen component splits in the torso",
                                    (G.names(SG), G.names(C)))
        choice[S] = hits[0]
    return Haven(TG, H.k, choice)


def inducible(T: Torso, H: Haven) -> bool:
    try:
        induce_haven(T, H)
    except NotInducibleError:
        return False
    return True


def induce_profile(T: Torso, P: Profile, verify: bool = True) -> Profile:
    HB = induce_haven(T, P.haven)
    if verify:
        w = good_haven_witness(T.graph, HB)
        if w is not None:
            raise ConsistencyError("induced haven is not good", w)
    return Profile(HB, singletons=P.singletons)


def profile_sets_per_block(G: Graph, N: Sequence[int], Pset: Sequence[Profile],
                           k: int) -> dict[int, list[Profile]]:
    """For each N-block B, the induced profiles P_B of those P that some other
    member of Pset is distinguished from efficiently by a Y nested with N,
    of order at least k+1 and with dY inside B."""
    N = list(N)
    blks = blocks(G, N)
    hit: dict[int, set[int]] = {B: set() for B in blks}
    Pset = list(Pset)
    for i in range(len(Pset)):
        for j in range(i + 1, len(Pset)):
            P, Q = Pset[i], Pset[j]
            m = distinguishing_order(P, Q)
            if m is None or m < k + 1:
                continue
            for S in differing_separators(P, Q, m):
                if not any(all(nested(G, Y, X) for X in N) for Y in distinguishers_at(G, P, Q, S)):
                    continue
                for B in blks:
                    if not S & ~B:
                        hit[B].update((i, j))
    out = {}
    for B in blks:
        T = torso_of(G, N, B)
        seen: dict[tuple, Profile] = {}
        for i in sorted(hit[B]):
            PB = induce_profile(T, Pset[i])
            seen.setdefault(PB.key(), PB)
        out[B] = [seen[key] for key in sorted(seen)]
    return out
