"""Finite simple graphs with stable vertex and edge identifiers.

Separations are edge sets.  Internally both edge sets and vertex sets are
Python ints used as bitsets over the graph's sorted edge ids and sorted vertex
names; ``Graph.sep``/``Graph.ids`` and ``Graph.vmask``/``Graph.names`` convert
between the bitset and the identifier views.
"""

from __future__ import annotations

import json
import random
from itertools import combinations
from typing import Iterable, Iterator

from .errors import InputError

SCHEMA = "sepkit/1"


def bits(x: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``x`` in ascending order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def popcount(x: int) -> int:
    return bin(x).count("1")


def edge_id(u: str, v: str) -> str:
    if u > v:
        u, v = v, u
    return f"{u}|{v}"


class Graph:
    """Immutable finite simple graph.

    ``edges`` is an iterable of ``(edge_id, u, v)``.  Edge ids listed in
    ``virtual`` are flagged as torso-added edges.
    """

    __slots__ = (
        "vertices", "index", "edge_ids", "eindex", "ends", "inc", "adj",
        "full", "vfull", "virtual", "_comp_cache",
    )

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str, str]],
                 virtual: Iterable[str] = ()):
        verts = sorted(set(vertices))
        self.vertices = tuple(verts)
        self.index = {v: i for i, v in enumerate(verts)}
        elist = sorted(edges)
        seen_ids: set[str] = set()
        seen_pairs: set[frozenset] = set()
        for eid, u, v in elist:
            if eid in seen_ids:
                raise InputError(f"duplicate edge id {eid!r}")
            if u == v:
                raise InputError(f"loop at {u!r}")
            if u not in self.index or v not in self.index:
                raise InputError(f"edge {eid!r} has an endpoint outside the vertex set")
            pair = frozenset((u, v))
            if pair in seen_pairs:
                raise InputError(f"parallel edge {eid!r}")
            seen_ids.add(eid)
            seen_pairs.add(pair)
        self.edge_ids = tuple(e[0] for e in elist)
        self.eindex = {e: i for i, e in enumerate(self.edge_ids)}
        self.ends = tuple(tuple(sorted((self.index[u], self.index[v]))) for _, u, v in elist)
        inc = [0] * len(verts)
        adj = [0] * len(verts)
        for i, (a, b) in enumerate(self.ends):
            inc[a] |= 1 << i
            inc[b] |= 1 << i
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        self.inc = tuple(inc)
        self.adj = tuple(adj)
        self.full = (1 << len(elist)) - 1
        self.vfull = (1 << len(verts)) - 1
        virtual = frozenset(virtual)
        if not virtual <= seen_ids:
            raise InputError("virtual edge ids must be edges of the graph")
        self.virtual = virtual
        self._comp_cache: dict[int, tuple[int, ...]] = {}

    # -- construction -------------------------------------------------------

    @classmethod
    def from_pairs(cls, vertices: Iterable[str], pairs: Iterable[tuple[str, str]]) -> "Graph":
        vertices = list(vertices)
        return cls(vertices, [(edge_id(u, v), u, v) for u, v in pairs])

    @classmethod
    def from_json(cls, doc: dict | str) -> "Graph":
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            verts = [str(v) for v in doc["vertices"]]
            pairs = [(str(u), str(v)) for u, v in doc["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed graph document: {exc}") from exc
        virtual = set()
        if "virtual" in doc:
            virtual = {edge_id(str(u), str(v)) for u, v in doc["virtual"]}
        return cls(verts, [(edge_id(u, v), u, v) for u, v in pairs], virtual)

    def to_json(self) -> dict:
        edges = []
        virtual = []
        for eid, (a, b) in zip(self.edge_ids, self.ends):
            pair = sorted((self.vertices[a], self.vertices[b]))
            edges.append(pair)
            if eid in self.virtual:
                virtual.append(pair)
        doc = {"schema": SCHEMA, "vertices": list(self.vertices), "edges": edges}
        if virtual:
            doc["virtual"] = virtual
        return doc

    def to_dot(self, highlight: int | None = None) -> str:
        """DOT rendering; boundary vertices of ``highlight`` are double-circled."""
        marked = self.boundary_mask(highlight) if highlight is not None else 0
        lines = ["graph G {"]
        for i, v in enumerate(self.vertices):
            shape = "doublecircle" if marked >> i & 1 else "circle"
            lines.append(f'  "{v}" [shape={shape}];')
        for eid, (a, b) in zip(self.edge_ids, self.ends):
            attrs = []
            if eid in self.virtual:
                attrs.append("style=dashed")
            if highlight is not None and highlight >> self.eindex[eid] & 1:
                attrs.append("color=red")
            suffix = f" [{', '.join(attrs)}]" if attrs else ""
            lines.append(f'  "{self.vertices[a]}" -- "{self.vertices[b]}"{suffix};')
        lines.append("}")
        return "\n".join(lines) + "\n"

    # -- identifier conversion ---------------------------------------------

    def vmask(self, names: Iterable[str]) -> int:
        m = 0
        for v in names:
            try:
                m |= 1 << self.index[v]
            except KeyError:
                raise InputError(f"unknown vertex {v!r}") from None
        return m

    def names(self, vmask: int) -> frozenset[str]:
        return frozenset(self.vertices[i] for i in bits(vmask))

    def sep(self, ids: Iterable[str]) -> int:
        m = 0
        for e in ids:
            try:
                m |= 1 << self.eindex[e]
            except KeyError:
                raise InputError(f"unknown edge id {e!r}") from None
        return m

    def ids(self, X: int) -> frozenset[str]:
        return frozenset(self.edge_ids[i] for i in bits(X))

    def sorted_ids(self, X: int) -> list[str]:
        return [self.edge_ids[i] for i in bits(X)]

    def remap_vertices(self, other: "Graph", vmask: int) -> int:
        """Translate a vertex mask of ``other`` into this graph's indexing."""
        m = 0
        for i in bits(vmask):
            m |= 1 << self.index[other.vertices[i]]
        return m

    def remap_edges(self, other: "Graph", X: int) -> int:
        m = 0
        for i in bits(X):
            m |= 1 << self.eindex[other.edge_ids[i]]
        return m

    # -- basic structure ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edge_ids)

    def check_sep(self, X: int) -> int:
        if X < 0 or X & ~self.full:
            raise InputError("separation contains unknown edges")
        return X

    def complement(self, X: int) -> int:
        return self.full & ~X

    def vert_of(self, X: int) -> int:
        """V(X): vertices incident with an edge of X."""
        m = 0
        ends = self.ends
        for i in bits(X):
            a, b = ends[i]
            m |= (1 << a) | (1 << b)
        return m

    def boundary_mask(self, X: int) -> int:
        return self.vert_of(X) & self.vert_of(self.full & ~X)

    def order(self, X: int) -> int:
        return popcount(self.boundary_mask(X))

    def s_mask(self, W: int) -> int:
        """s_W: edges with at least one endvertex in W."""
        m = 0
        inc = self.inc
        for i in bits(W):
            m |= inc[i]
        return m

    def internal_edges(self, S: int) -> int:
        """Edges with both endvertices in S."""
        m = 0
        for i, (a, b) in enumerate(self.ends):
            if S >> a & 1 and S >> b & 1:
                m |= 1 << i
        return m

    def nbhd(self, C: int) -> int:
        """N(C): vertices outside C adjacent to C."""
        m = 0
        adj = self.adj
        for i in bits(C):
            m |= adj[i]
        return m & ~C

    def components(self, S: int = 0) -> tuple[int, ...]:
        """Vertex masks of the components of G - S, ordered by least vertex."""
        cached = self._comp_cache.get(S)
        if cached is not None:
            return cached
        adj = self.adj
        rest = self.vfull & ~S
        comps = []
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                nxt = 0
                for i in bits(frontier):
                    nxt |= adj[i]
                nxt &= rest & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            rest &= ~comp
        result = tuple(comps)
        if len(self._comp_cache) < 200_000:
            self._comp_cache[S] = result
        return result

    def component_of(self, S: int, v: int) -> int:
        for c in self.components(S):
            if c >> v & 1:
                return c
        raise InputError("vertex lies in the separator")

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components(0)) == 1

    def touches(self, C: int, D: int) -> bool:
        return bool(C & D) or bool(self.nbhd(C) & D)

    def induced(self, W: int) -> "Graph":
        names = self.names(W)
        edges = [(eid, self.vertices[a], self.vertices[b])
                 for eid, (a, b) in zip(self.edge_ids, self.ends)
                 if W >> a & 1 and W >> b & 1]
        return Graph(names, edges, {e for e, _, _ in edges if e in self.virtual})

    def separators(self, max_size: int) -> Iterator[int]:
        """All vertex sets of size <= max_size, by size then lexicographically."""
        for size in range(0, min(max_size, self.n) + 1):
            for combo in combinations(range(self.n), size):
                m = 0
                for i in combo:
                    m |= 1 << i
                yield m

    def edge_of(self, u: str, v: str) -> str | None:
        eid = edge_id(u, v)
        if eid in self.eindex:
            return eid
        return None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.vertices == other.vertices
                and self.edge_ids == other.edge_ids and self.ends == other.ends)

    def __hash__(self) -> int:
        return hash((self.vertices, self.edge_ids))


# -- named graphs used throughout tests and examples -------------------------

def path_graph(names: Iterable[str]) -> Graph:
    names = list(names)
    return Graph.from_pairs(names, zip(names, names[1:]))


def cycle_graph(names: Iterable[str]) -> Graph:
    names = list(names)
    return Graph.from_pairs(names, zip(names, names[1:] + names[:1]))


def complete_graph(names: Iterable[str]) -> Graph:
    names = list(names)
    return Graph.from_pairs(names, combinations(names, 2))


def star_graph(center: str, leaves: Iterable[str]) -> Graph:
    leaves = list(leaves)
    return Graph.from_pairs([center, *leaves], [(center, x) for x in leaves])


def dumbbell() -> Graph:
    """Two triangles 1-2-3 and 4-5-6 joined by the bridge 3-4."""
    return Graph.from_pairs("123456", [("1", "2"), ("1", "3"), ("2", "3"),
                                       ("4", "5"), ("4", "6"), ("5", "6"),
                                       ("3", "4")])


def triangle_spider() -> Graph:
    """Three triangles sharing the center vertex c."""
    pairs = []
    for x in "abd":
        pairs += [("c", f"{x}1"), ("c", f"{x}2"), (f"{x}1", f"{x}2")]
    return Graph.from_pairs(["c"] + [f"{x}{i}" for x in "abd" for i in (1, 2)], pairs)


def random_connected_graph(n: int, m: int, rng: random.Random) -> Graph:
    """Uniform random spanning tree plus random extra edges, ``m`` edges total."""
    names = [f"v{i}" for i in range(n)]
    pairs = set()
    order = names[:]
    rng.shuffle(order)
    for i in range(1, n):
        u = order[i]
        v = order[rng.randrange(i)]
        pairs.add(tuple(sorted((u, v))))
    candidates = [p for p in combinations(names, 2) if p not in pairs]
    rng.shuffle(candidates)
    extra = max(0, min(m, n * (n - 1) // 2) - len(pairs))
    pairs.update(candidates[:extra])
    return Graph.from_pairs(names, sorted(pairs))
