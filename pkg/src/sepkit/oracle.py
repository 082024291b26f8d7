"""Exhaustive brute-force oracles.

``enumerate_separations`` is the workhorse: every separation of order at most
k, found through the characterization that dX lies inside a separator S of
size <= k, so X is a union of componental edge sets of G - S plus a subset of
the edges inside S.  ``powerset_separations`` is the independent 2^|E| route it
is checked against.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator

from .errors import CapacityError, InputError
from .graph import Graph, bits, popcount


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 14
    max_k: int = 5
    max_seconds: float = 120.0
    max_items: int = 2_000_000

    def check(self, G: Graph, k: int) -> None:
        if G.n > self.max_vertices:
            raise CapacityError(f"{G.n} vertices exceed the oracle budget {self.max_vertices}")
        if k > self.max_k:
            raise CapacityError(f"order {k} exceeds the oracle budget {self.max_k}")


DEFAULT_BUDGET = OracleBudget()


def _subsets(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def separations_with_boundary_in(G: Graph, S: int) -> Iterator[int]:
    """Every X with dX contained in S (possibly repeated across calls)."""
    parts = [G.s_mask(C) for C in G.components(S)]
    internal = G.internal_edges(S)
    for choice in range(1 << len(parts)):
        base = 0
        for i, p in enumerate(parts):
            if choice >> i & 1:
                base |= p
        for sub in _subsets(internal):
            yield base | sub


def enumerate_separations(G: Graph, k: int, budget: OracleBudget = DEFAULT_BUDGET) -> list[int]:
    """All separations of order <= k, each exactly once, in ascending mask order."""
    if k < 0:
        return []
    budget.check(G, k)
    start = time.monotonic()
    seen: set[int] = set()
    for S in G.separators(k):
        for X in separations_with_boundary_in(G, S):
            seen.add(X)
        if len(seen) > budget.max_items:
            raise CapacityError("too many separations for the oracle budget")
        if time.monotonic() - start > budget.max_seconds:
            raise CapacityError("oracle wall-clock budget exceeded")
    return sorted(seen)


def powerset_separations(G: Graph, k: int, max_edges: int = 20) -> list[int]:
    """Direct filter of all 2^|E| edge sets by boundary size."""
    if G.m > max_edges:
        raise CapacityError("power-set oracle limited to small edge counts")
    return [X for X in range(G.full + 1) if popcount(G.boundary_mask(X)) <= k]


def min_distinguishing_order(G: Graph, P, Q, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Least order of a separation lying in one profile with its complement in the other."""
    if P == Q:
        raise InputError("profiles are equal; distinguishing order undefined")
    top = min(P.k, Q.k)
    done: set[int] = set()
    for k in range(0, top + 1):
        for X in enumerate_separations(G, k, budget):
            if X in done:
                continue
            done.add(X)
            Xc = G.full & ~X
            if (P.member(X) and Q.member(Xc)) or (Q.member(X) and P.member(Xc)):
                return k
    raise CapacityError("profiles not distinguishable within their common order")


__all__ = [
    "OracleBudget", "DEFAULT_BUDGET", "enumerate_separations", "powerset_separations",
    "separations_with_boundary_in", "min_distinguishing_order", "bits",
]
