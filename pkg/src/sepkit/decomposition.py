"""Tree-decompositions from nested systems, and the end-hosting decompositions
built on finite truncations (star decompositions, their recursive refinement
and end-faithful spanning trees).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import ConsistencyError, InputError
from .graph import SCHEMA, Graph, bits, popcount
from .separations import nested
from .torso import check_nested


# -- tree-decompositions ---------------------------------------------------------

@dataclass
class TreeDecomposition:
    graph: Graph
    nodes: list[str]
    tree_edges: list[tuple[str, str]]   # (parent, child) when rooted
    parts: dict                         # node -> (vertex mask, edge mask)
    root: str | None = None

    def part_vertices(self, t: str) -> frozenset:
        return self.graph.names(self.parts[t][0])

    def part_edges(self, t: str) -> list[str]:
        return self.graph.sorted_ids(self.parts[t][1])

    def neighbours(self) -> dict[str, list[str]]:
        nb = {t: [] for t in self.nodes}
        for a, b in self.tree_edges:
            nb[a].append(b)
            nb[b].append(a)
        return nb

    def children(self) -> dict[str, list[str]]:
        ch = {t: [] for t in self.nodes}
        for a, b in self.tree_edges:
            ch[a].append(b)
        return ch

    def depth_of(self) -> dict[str, int]:
        if self.root is None:
            raise InputError("decomposition is not rooted")
        nb = self.neighbours()
        dist = {self.root: 0}
        queue = deque([self.root])
        while queue:
            t = queue.popleft()
            for u in nb[t]:
                if u not in dist:
                    dist[u] = dist[t] + 1
                    queue.append(u)
        return dist

    def side(self, t: str, u: str) -> int:
        """Edges in parts on u's side of the tree edge tu."""
        nb = self.neighbours()
        seen = {t, u}
        stack = [u]
        X = 0
        while stack:
            w = stack.pop()
            X |= self.parts[w][1]
            for x in nb[w]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return X

    def adhesion(self) -> int:
        return max((popcount(self.parts[a][0] & self.parts[b][0]) for a, b in self.tree_edges),
                   default=0)

    def to_json(self) -> dict:
        G = self.graph
        return {
            "schema": SCHEMA,
            "nodes": list(self.nodes),
            "tree_edges": [[a, b] for a, b in self.tree_edges],
            "root": self.root,
            "parts": {t: {"vertices": sorted(G.names(self.parts[t][0])),
                          "edges": [sorted(e.split("|")) for e in G.sorted_ids(self.parts[t][1])]}
                      for t in self.nodes},
        }

    def to_dot(self) -> str:
        lines = ["graph T {"]
        for t in self.nodes:
            label = ",".join(sorted(self.part_vertices(t)))
            lines.append(f'  "{t}" [label="{t}\\n{label}"];')
        for a, b in self.tree_edges:
            adh = popcount(self.parts[a][0] & self.parts[b][0])
            lines.append(f'  "{a}" -- "{b}" [label="{adh}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def restrict_ball(self, radius: int) -> dict:
        """Nodes within ``radius`` of the root with their parent and part."""
        dist = self.depth_of()
        parent = {b: a for a, b in self.tree_edges}
        G = self.graph
        return {t: (parent.get(t), frozenset(G.names(self.parts[t][0])),
                    frozenset(G.ids(self.parts[t][1])))
                for t in self.nodes if dist[t] <= radius}


@dataclass
class TDReport:
    ok: bool
    violations: list = field(default_factory=list)
    adhesion: int = 0

    def __bool__(self) -> bool:
        return self.ok


def validate_td(G: Graph, TD: TreeDecomposition) -> TDReport:
    out = []
    nodes = list(TD.nodes)
    if not nodes:
        return TDReport(False, ["no nodes"])
    if len(set(nodes)) != len(nodes):
        out.append(("duplicate node", None))
    T = nx.Graph()
    T.add_nodes_from(nodes)
    T.add_edges_from(TD.tree_edges)
    if T.number_of_nodes() != len(nodes) or not nx.is_tree(T):
        out.append(("not a tree", None))
    covered = 0
    seen_edges: dict[int, str] = {}
    for t in nodes:
        V, E = TD.parts[t]
        covered |= V
        if G.vert_of(E) & ~V:
            out.append(("edge endpoint outside its part", t))
        for e in bits(E):
            if e in seen_edges:
                out.append(("edge in two parts", (G.edge_ids[e], seen_edges[e], t)))
            seen_edges[e] = t
    if covered != G.vfull:
        out.append(("vertex in no part", sorted(G.names(G.vfull & ~covered))))
    missing = G.full & ~sum(1 << e for e in seen_edges)
    if missing:
        out.append(("edge in no part", G.sorted_ids(missing)))
    if not out:
        for v in range(G.n):
            holding = [t for t in nodes if TD.parts[t][0] >> v & 1]
            if not nx.is_connected(T.subgraph(holding)):
                out.append(("vertex parts not connected", G.vertices[v]))
        for a, b in TD.tree_edges:
            for t, u in ((a, b), (b, a)):
                X = TD.side(t, u)
                VX, VXc = G.vert_of(X), G.vert_of(G.full & ~X)
                if G.boundary_mask(X) & ~(TD.parts[t][0] & TD.parts[u][0]):
                    out.append(("boundary outside the adhesion set", (t, u)))
                for i in bits(G.full):
                    x, y = G.ends[i]
                    ax, bx = VX >> x & 1 and not VXc >> x & 1, VXc >> x & 1 and not VX >> x & 1
                    ay, by = VX >> y & 1 and not VXc >> y & 1, VXc >> y & 1 and not VX >> y & 1
                    if (ax and by) or (bx and ay):
                        out.append(("not a vertex-separation", (t, u)))
                        break
    return TDReport(not out, out, TD.adhesion() if not out else 0)


def nested_to_tree_decomposition(G: Graph, N: Sequence[int]) -> TreeDecomposition:
    """Tree-decomposition whose tree-edge separations are N up to complement.

    Orienting every member away from a reference edge gives a laminar family;
    its inclusion tree, rooted at the reference side, is the decomposition
    tree and each edge goes to the smallest member containing it.
    """
    w = check_nested(G, N)
    if w is not None:
        raise InputError("separations are not nested")
    if not G.m:
        return TreeDecomposition(G, ["root"], [], {"root": (G.vfull, 0)}, "root")
    fams = set()
    for X in N:
        F = X if not X & 1 else G.full & ~X
        if F:
            fams.add(F)
    order = sorted(fams, key=lambda F: (-popcount(F), G.sorted_ids(F)))
    names = {F: f"n{i + 1}" for i, F in enumerate(order)}
    parent: dict[int, int | None] = {}
    for i, F in enumerate(order):
        sup = [H for H in order[:i] if not F & ~H]
        parent[F] = min(sup, key=popcount) if sup else None
    assigned = {None: 0}
    assigned.update({F: 0 for F in order})
    for e in range(G.m):
        holders = [F for F in order if F >> e & 1]
        home = min(holders, key=popcount) if holders else None
        assigned[home] |= 1 << e
    verts = {F: G.vert_of(assigned[F]) for F in assigned}
    for F in order:
        b = G.boundary_mask(F)
        verts[F] |= b
        verts[parent[F]] |= b
    nodes = ["root"] + [names[F] for F in order]
    parts = {"root": (verts[None], assigned[None])}
    parts.update({names[F]: (verts[F], assigned[F]) for F in order})
    edges = [("root" if parent[F] is None else names[parent[F]], names[F]) for F in order]
    return TreeDecomposition(G, nodes, edges, parts, "root")


# -- the forcing digraph and the disjoint cover ---------------------------------------

@dataclass
class ForcingDigraph:
    """Arcs X -> Y for Y among the least-order proper supersets of X in N."""

    graph: Graph
    members: list[int]
    succ: dict = field(default_factory=dict)   # index -> list of indices

    @classmethod
    def build(cls, G: Graph, members: Sequence[int]) -> "ForcingDigraph":
        members = list(members)
        succ = {}
        for i, X in enumerate(members):
            sup = [j for j, Y in enumerate(members) if j != i and not X & ~Y and X != Y]
            if sup:
                low = min(G.order(members[j]) for j in sup)
                succ[i] = [j for j in sup if G.order(members[j]) == low]
            else:
                succ[i] = []
        return cls(G, members, succ)

    def out_degree_ok(self) -> bool:
        return all(len(v) <= 1 for v in self.succ.values())

    def reachable(self, i: int) -> set[int]:
        seen = set()
        stack = [i]
        while stack:
            x = stack.pop()
            for y in self.succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def path_iff_inclusion(self) -> list[tuple[int, int]]:
        bad = []
        for i, X in enumerate(self.members):
            reach = self.reachable(i)
            if i in reach:
                bad.append((i, i))
            for j, Y in enumerate(self.members):
                if i != j and ((not X & ~Y) != (j in reach)):
                    bad.append((i, j))
        return bad

    def components(self) -> list[list[int]]:
        U = nx.Graph()
        U.add_nodes_from(range(len(self.members)))
        for i, js in self.succ.items():
            U.add_edges_from((i, j) for j in js)
        return [sorted(c) for c in sorted(nx.connected_components(U), key=min)]

    def unlinked_disjoint(self) -> list[tuple[int, int]]:
        bad = []
        for i, X in enumerate(self.members):
            ri = self.reachable(i)
            for j in range(i + 1, len(self.members)):
                if j not in ri and i not in self.reachable(j) and X & self.members[j]:
                    bad.append((i, j))
        return bad

    def has_confluent_paths(self) -> bool:
        """Every undirected path meets a vertex both halves point to: with out-degree
        at most 1 this means each component has at most one sink."""
        return all(sum(1 for i in comp if not self.succ[i]) <= 1 for comp in self.components())

    def extract(self) -> list[int]:
        out = []
        for comp in self.components():
            sinks = [i for i in comp if not self.succ[i]]
            if sinks:
                out.append(self.members[sinks[0]])
            else:
                out.extend(chain_differences(self.ray_from(comp[0])))
        return out

    def ray_from(self, i: int) -> list[int]:
        chain, seen = [], set()
        while i not in seen:
            seen.add(i)
            chain.append(self.members[i])
            if not self.succ[i]:
                break
            i = self.succ[i][0]
        return chain


def chain_differences(chain: Sequence[int]) -> list[int]:
    """Y_1 = X_1 and Y_i = X_i minus X_{i-1} along an increasing chain."""
    out, prev = [], 0
    for X in chain:
        if prev & ~X:
            raise InputError("chain is not increasing")
        out.append(X & ~prev)
        prev = X
    return out


@dataclass
class CoverResult:
    nested: list          # the auxi1 system
    digraph: ForcingDigraph
    members: list         # pairwise disjoint cover
    unseparable: list     # surrogates meeting W or its neighbourhood


def _lives(G: Graph, cls: int, X: int) -> bool:
    return not cls & ~(G.vert_of(X) & ~G.boundary_mask(X))


def _closest_cut_side(G: Graph, W: int, cls: int) -> int:
    """Vertices on the class side of a minimum cut between N(W) and the class in
    G - W, choosing the cut closest to W; cut vertices may lie in N(W) but not
    in the class."""
    NW = G.nbhd(W)
    D = nx.DiGraph()
    for v in range(G.n):
        if W >> v & 1:
            continue
        D.add_edge((v, 0), (v, 1), capacity=float("inf") if cls >> v & 1 else 1)
    for a, b in G.ends:
        if W >> a & 1 or W >> b & 1:
            continue
        D.add_edge((a, 1), (b, 0))
        D.add_edge((b, 1), (a, 0))
    for v in bits(NW):
        D.add_edge("s", (v, 0))
    for v in bits(cls):
        D.add_edge((v, 1), "t")
    R = nx.algorithms.flow.preflow_push(D, "s", "t")
    reach = {"s"}
    stack = ["s"]
    while stack:
        x = stack.pop()
        for y, attr in R[x].items():
            if y not in reach and attr["flow"] < attr["capacity"]:
                reach.add(y)
                stack.append(y)
    cut = 0
    for v in range(G.n):
        if (v, 0) in reach and (v, 1) not in reach:
            cut |= 1 << v
    side = 0
    for C in G.components(W | cut):
        if C & cls:
            side |= C
    return side


def auxi1_nested_set(G: Graph, W: Iterable[str], ends: Mapping[str, Iterable[str]]):
    """Nested separations avoiding W-edges in which every separable surrogate lives,
    with strictly growing order along proper inclusions.

    Returns (nested list, list of unseparable surrogate keys).
    """
    if not G.is_connected():
        raise InputError("graph must be connected")
    Wm = G.vmask(W)
    NW = G.nbhd(Wm)
    cands, unsep = [], []
    for key in sorted(ends):
        cls = G.vmask(ends[key])
        if not cls or cls & (Wm | NW):
            unsep.append(key)
            continue
        side = _closest_cut_side(G, Wm, cls)
        X = G.s_mask(side)
        if X and X not in cands:
            cands.append(X)
    cands.sort(key=lambda X: (G.order(X), G.sorted_ids(X)))
    chosen: list[int] = []
    for X in cands:
        if all(nested(G, X, Y) for Y in chosen):
            chosen.append(X)
    # unions of chains of order <= k are their largest members at finite scale;
    # keep the inclusion-maximal members of each order level
    N = []
    for k in sorted({G.order(X) for X in chosen}):
        level = [X for X in chosen if G.order(X) <= k]
        for X in level:
            if not any(X != Y and not X & ~Y for Y in level) and X not in N:
                N.append(X)
    for X in N:
        for Y in N:
            if X != Y and not X & ~Y and G.order(Y) <= G.order(X):
                raise ConsistencyError("inclusion without growth in order",
                                       (G.sorted_ids(X), G.sorted_ids(Y)))
        if G.s_mask(Wm) & X:
            raise ConsistencyError("member touches W", G.sorted_ids(X))
    # a surrogate whose cut crossed a cheaper one stays with the centre
    for key in sorted(ends):
        if key in unsep:
            continue
        cls = G.vmask(ends[key])
        if not any(_lives(G, cls, X) for X in N):
            unsep.append(key)
    return N, sorted(unsep)


def end_separation_cover(G: Graph, W: Iterable[str], ends: Mapping[str, Iterable[str]]) -> CoverResult:
    W = list(W)
    N, unsep = auxi1_nested_set(G, W, ends)
    H = ForcingDigraph.build(G, N)
    if not H.out_degree_ok():
        raise ConsistencyError("forcing digraph has out-degree above one")
    members = H.extract()
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            if members[i] & members[j]:
                raise ConsistencyError("cover members overlap")
    for key in sorted(ends):
        if key not in unsep:
            cls = G.vmask(ends[key])
            if not any(_lives(G, cls, X) for X in members):
                raise ConsistencyError("surrogate not covered", key)
    return CoverResult(N, H, members, unsep)


# -- star decompositions ------------------------------------------------------------------

@dataclass
class StarDecomposition:
    graph: Graph
    center: tuple[int, int]              # (vertex mask, edge mask)
    leaves: list[tuple[int, int]]
    hosted: list[list[str]]              # surrogate keys per leaf
    unhosted: list[str]                  # surrogates living in the center
    cover: CoverResult | None = None

    def as_td(self, center: str = "c", prefix: str = "s") -> TreeDecomposition:
        nodes = [center] + [f"{prefix}{i}" for i in range(len(self.leaves))]
        parts = {center: self.center}
        parts.update({f"{prefix}{i}": p for i, p in enumerate(self.leaves)})
        return TreeDecomposition(self.graph, nodes, [(center, t) for t in nodes[1:]],
                                 parts, center)


def star_decomposition(G: Graph, W: Iterable[str], ends: Mapping[str, Iterable[str]]) -> StarDecomposition:
    W = list(W)
    if not W:
        raise InputError("W must be nonempty")
    Wm = G.vmask(W)
    if not ends:
        return StarDecomposition(G, (G.vfull, G.full), [], [], [])
    cover = end_separation_cover(G, W, ends)
    classes = {k: G.vmask(v) for k, v in ends.items()}
    used = 0
    center_v = 0
    leaves, hosted = [], []
    leaf_edges = 0
    for X in cover.members:
        used |= X
        S = G.boundary_mask(X)
        center_v |= S
        for Q in G.components(S):
            if Q & ~G.vert_of(X):
                continue
            keys = sorted(k for k, c in classes.items() if c and not c & ~Q)
            if keys:
                E = G.s_mask(Q)
                leaves.append((Q | S, E))
                hosted.append(keys)
                leaf_edges |= E
            else:
                center_v |= Q | S
    center_v |= G.vert_of(G.full & ~used)
    center_e = G.full & ~leaf_edges
    center_v |= G.vert_of(center_e)
    placed = {k for ks in hosted for k in ks}
    unhosted = sorted(k for k in ends if k not in placed)
    order = sorted(range(len(leaves)), key=lambda i: sorted(G.names(leaves[i][0] & ~center_v)))
    sd = StarDecomposition(G, (center_v, center_e), [leaves[i] for i in order],
                           [hosted[i] for i in order], unhosted, cover)
    problems = star_violations(sd, Wm)
    if problems:
        raise ConsistencyError("star decomposition contract violated", problems)
    return sd


def star_violations(sd: StarDecomposition, W: int) -> list:
    G = sd.graph
    out = []
    rep = validate_td(G, sd.as_td())
    if not rep.ok:
        out.extend(rep.violations)
    cv = sd.center[0]
    for i, (V, _) in enumerate(sd.leaves):
        if V & W:
            out.append(("leaf meets W", i))
        if not sd.hosted[i]:
            out.append(("leaf hosts no surrogate", i))
        inner = V & ~cv
        if not inner or len([C for C in G.components(G.vfull & ~inner) if C]) and \
                not _connected_within(G, inner):
            out.append(("leaf minus center disconnected", i))
    return out


def _connected_within(G: Graph, U: int) -> bool:
    if not U:
        return False
    return len(G.induced(U).components(0)) == 1


# -- domination estimate on truncations ---------------------------------------------------

def dominated_surrogates(F, lookback: int = 1) -> dict[str, str]:
    """Surrogates with a vertex whose fan to them keeps growing with depth.

    A dominating vertex has infinite degree, so only vertices whose degree
    grows from depth d - lookback to d, and that are not on the shallower
    frontier, are tried; such a vertex dominates a
    surrogate when its fan to the surrogate's ray prefix and class grows too.
    """
    from .families import fan_size
    if F.depth - lookback < 1:
        return {}
    E = F.at_depth(F.depth - lookback)
    G, H = F.graph, E.graph
    edge = set().union(*E.classes.values())
    growing = [v for v in H.vertices if v not in edge
               and popcount(G.adj[G.index[v]]) > popcount(H.adj[H.index[v]])]
    out = {}
    for key in sorted(F.classes):
        try:
            shallow = E.resolve(key)
        except InputError:
            continue
        ray = set(F.ray(key))
        near = ray | {G.vertices[i] for v in ray for i in bits(G.adj[G.index[v]])}
        for w in sorted(growing, key=lambda v: (v not in ray, v)):
            if w not in near or w in F.frontier(key):
                continue
            if fan_size(F, w, key) > fan_size(E, w, shallow):
                out[key] = w
                break
    return out


def topological_surrogates(F, lookback: int = 1) -> dict[str, frozenset]:
    dom = dominated_surrogates(F, lookback)
    return {k: v for k, v in sorted(F.classes.items()) if k not in dom}


# -- recursive decomposition and spanning tree ---------------------------------------------

def recursive_end_tree_decomposition(F, max_rounds: int | None = None,
                                     ends: Mapping[str, Iterable[str]] | None = None) -> TreeDecomposition:
    """Refine star decompositions leaf by leaf until no leaf can be split."""
    G = F.graph
    if not G.is_connected():
        raise InputError("truncation is not connected")
    if ends is None:
        ends = topological_surrogates(F)
    classes = {k: G.vmask(v) for k, v in ends.items()}
    root = "root"
    nodes = [root]
    parts = {root: (G.vfull, G.full)}
    tree_edges: list[tuple[str, str]] = []
    frontier = [(root, G.vmask([F.root]), sorted(classes))]
    rounds = 0
    while frontier and (max_rounds is None or rounds < max_rounds):
        rounds += 1
        nxt = []
        for t, Wt, keys in frontier:
            V, E = parts[t]
            if not keys:
                continue
            sub = part_graph(G, V, E)
            sub_ends = {k: sorted(G.names(classes[k])) for k in keys}
            sd = star_decomposition(sub, sorted(G.names(Wt)), sub_ends)
            if not sd.leaves:
                continue
            parts[t] = (G.remap_vertices(sub, sd.center[0]), G.remap_edges(sub, sd.center[1]))
            for (LV, LE), hk in zip(sd.leaves, sd.hosted):
                lv = G.remap_vertices(sub, LV)
                le = G.remap_edges(sub, LE)
                name = t + "/" + min(G.names(lv & ~parts[t][0]))
                nodes.append(name)
                tree_edges.append((t, name))
                parts[name] = (lv, le)
                nxt.append((name, lv & parts[t][0], hk))
        frontier = nxt
    TD = TreeDecomposition(G, nodes, tree_edges, parts, root)
    return TD


def part_graph(G: Graph, V: int, E: int) -> Graph:
    """The subgraph with vertex mask V and edge mask E."""
    edges = [(G.edge_ids[i], G.vertices[G.ends[i][0]], G.vertices[G.ends[i][1]]) for i in bits(E)]
    return Graph(sorted(G.names(V)), edges, G.virtual & {e for e, _, _ in edges})


def connectedness_violations(TD: TreeDecomposition) -> list:
    """Upper unions minus the lower part are connected; consecutive adhesion
    sets along root paths are disjoint."""
    G = TD.graph
    ch = TD.children()
    parent = {b: a for a, b in TD.tree_edges}
    out = []

    def upper(u: str) -> int:
        m = TD.parts[u][0]
        for w in ch[u]:
            m |= upper(w)
        return m

    for t, u in TD.tree_edges:
        U = upper(u) & ~TD.parts[t][0]
        if U and not _connected_within(G, U):
            out.append(("upper set disconnected", (t, u)))
        s = parent.get(t)
        if s is not None:
            a = TD.parts[s][0] & TD.parts[t][0]
            b = TD.parts[t][0] & TD.parts[u][0]
            if a & b:
                out.append(("consecutive adhesions meet", (s, t, u)))
    return out


@dataclass
class SpanningTreeResult:
    graph: Graph
    root: str
    edges: int                # edge mask of the tree
    connectors: int           # edge mask of the kept connector forests

    def edge_ids(self) -> list[str]:
        return self.graph.sorted_ids(self.edges)

    def parent_map(self) -> dict[str, str | None]:
        G = self.graph
        adj = {v: [] for v in G.vertices}
        for i in bits(self.edges):
            a, b = G.ends[i]
            adj[G.vertices[a]].append(G.vertices[b])
            adj[G.vertices[b]].append(G.vertices[a])
        parent = {self.root: None}
        queue = deque([self.root])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x]):
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        return parent

    def restrict_ball(self, radius: int) -> frozenset:
        G = self.graph
        dist = nx.single_source_shortest_path_length(_nx(G), self.root, cutoff=radius)
        return frozenset(e for e in self.edge_ids()
                         if all(v in dist for v in e.split("|")))


def _nx(G: Graph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from((G.vertices[a], G.vertices[b]) for a, b in G.ends)
    return H


class _UF:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.p[max(ra, rb)] = min(ra, rb)
        return True


def _connector(G: Graph, U: int, A: int) -> int:
    """Edges of a BFS subtree of G[U] joining the vertices of A."""
    if popcount(A) <= 1:
        return 0
    src = next(bits(A))
    parent = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y in bits(G.adj[x] & U):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    E = 0
    for a in bits(A):
        if a not in parent:
            raise ConsistencyError("adhesion set not connected above its edge", sorted(G.names(A)))
        while parent[a] is not None:
            p = parent[a]
            E |= 1 << G.eindex[G.edge_of(G.vertices[a], G.vertices[p])]
            a = p
    return E


def end_faithful_spanning_tree(F, TD: TreeDecomposition | None = None) -> SpanningTreeResult:
    G = F.graph
    if TD is None:
        TD = recursive_end_tree_decomposition(F)
    ch = TD.children()

    def upper(u: str) -> int:
        m = TD.parts[u][0]
        for w in ch[u]:
            m |= upper(w)
        return m

    Q = {}
    for t in TD.nodes:
        uf = _UF(G.n)
        forest = 0
        for u in ch[t]:
            S = _connector(G, upper(u), TD.parts[t][0] & TD.parts[u][0])
            for i in bits(S):
                a, b = G.ends[i]
                if uf.union(a, b):
                    forest |= 1 << i
        Q[t] = forest
    depth = TD.depth_of()
    chosen, used_v = 0, 0
    for t in sorted(TD.nodes, key=lambda x: (depth[x], x)):
        Vt = G.vert_of(Q[t])
        if Vt & used_v:
            continue
        used_v |= Vt
        chosen |= Q[t]
    uf = _UF(G.n)
    tree = 0
    for i in bits(chosen):
        a, b = G.ends[i]
        uf.union(a, b)
        tree |= 1 << i
    root = G.index[F.root]
    seen = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in bits(G.adj[x]):
            e = G.eindex[G.edge_of(G.vertices[x], G.vertices[y])]
            if uf.union(x, y):
                tree |= 1 << e
            if y not in seen:
                seen.add(y)
                queue.append(y)
    res = SpanningTreeResult(G, F.root, tree, chosen)
    problems = spanning_tree_violations(res)
    if problems:
        raise ConsistencyError("spanning tree checks failed", problems)
    return res


def spanning_tree_violations(res: SpanningTreeResult) -> list:
    G = res.graph
    out = []
    if popcount(res.edges) != G.n - 1:
        out.append("wrong edge count")
    uf = _UF(G.n)
    for i in bits(res.edges):
        a, b = G.ends[i]
        if not uf.union(a, b):
            out.append("cycle")
            break
    if len({uf.find(v) for v in range(G.n)}) != 1:
        out.append("not spanning")
    if res.connectors & ~res.edges:
        out.append("connectors dropped")
    return out


def class_lca(res: SpanningTreeResult, cls: Iterable[str]) -> str:
    """Last common vertex of the tree paths from the root to the class."""
    parent = res.parent_map()

    def path(v):
        p = []
        while v is not None:
            p.append(v)
            v = parent[v]
        return p[::-1]

    paths = [path(v) for v in sorted(cls)]
    d = 0
    while all(len(p) > d for p in paths) and len({p[d] for p in paths}) == 1:
        d += 1
    return paths[0][d - 1]


def end_faithful_violations(F, res: SpanningTreeResult,
                            ends: Mapping[str, Iterable[str]] | None = None) -> list[str]:
    """Surrogates reached by tree paths that split within distance depth // 2 of the
    root: two such paths run vertex-disjointly from that ball to the class."""
    if ends is None:
        ends = topological_surrogates(F)
    region = set(nx.single_source_shortest_path_length(_nx(F.graph), F.root,
                                                       cutoff=F.depth // 2))
    parent = res.parent_map()
    out = []
    for key in sorted(ends):
        cls = sorted(ends[key])
        if any(v not in parent for v in cls):
            out.append(key)
        elif len(cls) > 1 and class_lca(res, cls) in region:
            out.append(key)
    return out
