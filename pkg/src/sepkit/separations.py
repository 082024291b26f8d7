"""The separation calculus: boundaries, nestedness, links, tightness.

Separations are edge bitsets over a fixed :class:`~sepkit.graph.Graph`;
vertex sets returned by the public functions are frozensets of vertex names.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

from .errors import InputError
from .graph import Graph, bits, popcount


def boundary(G: Graph, X: int) -> frozenset[str]:
    """Vertices incident with an edge of X and an edge of its complement."""
    return G.names(G.boundary_mask(G.check_sep(X)))


def incident_edges(G: Graph, W: Iterable[str]) -> int:
    """s_W, the edges with at least one endvertex in W."""
    return G.s_mask(G.vmask(W))


def is_componental_mask(G: Graph, X: int) -> bool:
    S = G.boundary_mask(X)
    return any(G.s_mask(C) == X for C in G.components(S))


def is_componental(G: Graph, X: int) -> bool:
    return is_componental_mask(G, G.check_sep(X))


def nested(G: Graph, X: int, Y: int) -> bool:
    full = G.full
    Xc = full & ~X
    Yc = full & ~Y
    return not (X & Y) or not (X & Yc) or not (Xc & Y) or not (Xc & Yc)


def is_nested(G: Graph, X: int, Y: int) -> bool:
    G.check_sep(X)
    G.check_sep(Y)
    return nested(G, X, Y)


def links(G: Graph, X: int, Y: int) -> tuple[frozenset, frozenset, frozenset, frozenset]:
    """(dY minus V(X), dY minus V(X^c), dX minus V(Y), dX minus V(Y^c))."""
    full = G.full
    VX, VXc = G.vert_of(X), G.vert_of(full & ~X)
    VY, VYc = G.vert_of(Y), G.vert_of(full & ~Y)
    dX, dY = VX & VXc, VY & VYc
    return (G.names(dY & ~VX), G.names(dY & ~VXc),
            G.names(dX & ~VY), G.names(dX & ~VYc))


def link_overlap_mask(G: Graph, X: int, Y: int) -> int:
    full = G.full
    return (G.vert_of(X) & G.vert_of(Y)
            & (G.vert_of(full & ~X) | G.vert_of(full & ~Y)))


def link_overlap(G: Graph, X: int, Y: int) -> frozenset[str]:
    """L(X, Y) = (V(X) & V(Y)) & (V(X^c) | V(Y^c))."""
    return G.names(link_overlap_mask(G, X, Y))


def is_tight_mask(G: Graph, X: int) -> bool:
    S = G.boundary_mask(X)
    return all(G.boundary_mask(G.s_mask(C)) == S for C in G.components(S))


def is_tight(G: Graph, X: int) -> bool:
    return is_tight_mask(G, G.check_sep(X))


def _separates(G: Graph, S: int, v: int, w: int) -> bool:
    return not any(C >> v & 1 and C >> w & 1 for C in G.components(S))


def separates_minimally(G: Graph, S: Iterable[str], v: str, w: str) -> bool:
    """Each component of G - S containing v or w has all of S as neighbours."""
    Sm = G.vmask(S)
    vi, wi = G.index.get(v), G.index.get(w)
    if vi is None or wi is None:
        raise InputError("unknown vertex")
    if Sm >> vi & 1 or Sm >> wi & 1:
        raise InputError("v and w must lie outside S")
    if not _separates(G, Sm, vi, wi):
        raise InputError("S does not separate v from w")
    return _minimal(G, Sm, vi, wi)


def _minimal(G: Graph, S: int, vi: int, wi: int) -> bool:
    for C in G.components(S):
        if C >> vi & 1 or C >> wi & 1:
            if G.nbhd(C) & S != S:
                return False
    return True


def enumerate_minimal_separators(G: Graph, v: str, w: str, k: int) -> list[frozenset[str]]:
    """All separators of size <= k separating v from w minimally.

    Ordered by size, then lexicographically by sorted vertex names.
    """
    vi, wi = G.index.get(v), G.index.get(w)
    if vi is None or wi is None:
        raise InputError("unknown vertex")
    if vi == wi or k < 0:
        raise InputError("need distinct vertices and k >= 0")
    others = [i for i in range(G.n) if i not in (vi, wi)]
    found = []
    for size in range(0, min(k, len(others)) + 1):
        for combo in combinations(others, size):
            S = sum(1 << i for i in combo)
            if _separates(G, S, vi, wi) and _minimal(G, S, vi, wi):
                found.append(G.names(S))
    found.sort(key=lambda s: (len(s), sorted(s)))
    return found


def strongly_disqualifies(G: Graph, X: int, Y: int) -> bool:
    """|dY| exceeds both |L(X, Y)| and |L(X^c, Y)|."""
    dY = G.order(Y)
    return (dY > popcount(link_overlap_mask(G, X, Y))
            and dY > popcount(link_overlap_mask(G, G.full & ~X, Y)))


def disqualifies(G: Graph, X: int, Y: int) -> bool:
    return strongly_disqualifies(G, X, Y) or strongly_disqualifies(G, X, G.full & ~Y)


def componental_parts(G: Graph, X: int) -> list[int]:
    """Componental edge sets s_C of G - dX lying inside X."""
    S = G.boundary_mask(X)
    out = []
    for C in G.components(S):
        s = G.s_mask(C)
        if s and not s & ~X:
            out.append(s)
    return out


def sep_key(G: Graph, X: int) -> tuple:
    """Deterministic ordering key: order, then sorted edge ids."""
    return (G.order(X), G.sorted_ids(X))


__all__ = [
    "boundary", "incident_edges", "is_componental", "is_nested", "nested", "links",
    "link_overlap", "link_overlap_mask", "is_tight", "is_tight_mask",
    "separates_minimally", "enumerate_minimal_separators", "strongly_disqualifies",
    "disqualifies", "componental_parts", "sep_key", "bits",
]
