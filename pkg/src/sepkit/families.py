"""Finite truncations of infinite example graphs, with end surrogates.

Each family is grown to a depth d.  An end surrogate is named by a key that
does not depend on d; at a given depth it resolves to a frontier class (the
deepest vertices following the end) and a ray prefix from the root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

import networkx as nx

from .errors import InputError
from .graph import Graph

FAMILIES = ("binary-tree", "dominated-binary", "thin-thick", "grid-product")


@dataclass
class TruncatedFamily:
    family: str
    depth: int
    graph: Graph
    classes: dict          # surrogate key -> frozenset of vertex names
    rays: dict             # surrogate key -> list of vertex names from the root
    root: str
    params: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def at_depth(self, d: int) -> "TruncatedFamily":
        params = dict(self.params)
        if self.family == "grid-product":
            params["nmax"] = min(params["nmax"], d)
        return generate(self.family, d, **params)

    def resolve(self, key: str) -> str:
        """The surrogate key at this depth following the same end."""
        if key in self.classes:
            return key
        if self.family in ("grid-product",):
            raise InputError(f"unknown end surrogate {key!r}")
        bits_ = key
        if len(bits_) > self.depth:
            bits_ = bits_[:self.depth]
        else:
            pad = bits_[-1] if bits_ and self.family == "thin-thick" else "0"
            bits_ = bits_ + pad * (self.depth - len(bits_))
        if bits_ not in self.classes:
            raise InputError(f"unknown end surrogate {key!r}")
        return bits_

    def ray(self, key: str) -> list[str]:
        return self.rays[self.resolve(key)]

    def frontier(self, key: str) -> frozenset:
        return self.classes[self.resolve(key)]

    def ends_json(self) -> dict:
        from .graph import SCHEMA
        return {"schema": SCHEMA, "family": self.family, "depth": self.depth,
                "root": self.root,
                "ends": {k: sorted(v) for k, v in sorted(self.classes.items())},
                "rays": {k: list(v) for k, v in sorted(self.rays.items())}}


def _t(bits_: str) -> str:
    return "t:" + bits_


def _tree_strings(d: int) -> list[str]:
    out = [""]
    for length in range(1, d + 1):
        out += ["".join(p) for p in product("01", repeat=length)]
    return out


def _tree_pairs(strings: Iterable[str], name: Callable[[str], str]):
    keep = set(strings)
    for s in keep:
        if s and s[:-1] in keep:
            yield name(s[:-1]), name(s)


def _leaf_rays(d: int) -> dict[str, list[str]]:
    return {"".join(p): [_t("".join(p)[:i]) for i in range(d + 1)]
            for p in product("01", repeat=d)}


def binary_tree(d: int) -> TruncatedFamily:
    strings = _tree_strings(d)
    G = Graph.from_pairs([_t(s) for s in strings], _tree_pairs(strings, _t))
    rays = _leaf_rays(d)
    classes = {k: frozenset([ray[-1]]) for k, ray in rays.items()}
    return TruncatedFamily("binary-tree", d, G, classes, rays, _t(""))


def dominated_binary(d: int) -> TruncatedFamily:
    """Binary tree plus, per leaf, a vertex joined to the whole root-leaf path.

    The extra vertex of the leaf l is named after l with trailing zeros
    stripped, so that at depth d+1 it is joined to the path of l0 and the
    truncations grow monotonically.
    """
    base = binary_tree(d)
    verts = list(base.graph.vertices)
    pairs = [(base.graph.vertices[a], base.graph.vertices[b]) for a, b in base.graph.ends]
    for leaf, ray in base.rays.items():
        v = "v:" + leaf.rstrip("0")
        if v not in verts:
            verts.append(v)
        pairs += [(v, x) for x in ray]
    G = Graph.from_pairs(verts, sorted(set(tuple(sorted(p)) for p in pairs)))
    meta = {"dominators": {leaf: "v:" + leaf.rstrip("0") for leaf in base.rays}}
    return TruncatedFamily("dominated-binary", d, G, base.classes, base.rays, base.root,
                           meta=meta)


def gamma(limit_prefix: int) -> list[tuple[str, str]]:
    """Eventually constant 0-1 sequences as (prefix, tail bit), enumerated by
    prefix length, then tail 0 before tail 1, then prefix lexicographically.
    The prefix's last bit differs from the tail so each end appears once."""
    out = []
    for p in range(limit_prefix + 1):
        for tail in "01":
            for pre in ("".join(x) for x in product("01", repeat=p)):
                if p and pre[-1] == tail:
                    continue
                out.append((pre, tail))
    return out


def gamma_leaf(pre: str, tail: str, d: int) -> str:
    s = pre + tail * max(0, d - len(pre))
    return s[:d]


def thin_thick(d: int, nmax: int = 3) -> TruncatedFamily:
    """Binary tree plus layers H_1..H_nmax; H_n is the tree minus the rays of
    the first n enumerated eventually-constant ends, each vertex joined to
    its clones."""
    if nmax < 1:
        raise InputError("nmax must be positive")
    strings = _tree_strings(d)
    ends = gamma((d + 1) // 2)
    thin = [gamma_leaf(pre, tail, d) for pre, tail in ends[:nmax]]
    verts = [_t(s) for s in strings]
    pairs = list(_tree_pairs(strings, _t))
    removed: set[str] = set()
    present_in: dict[str, list[int]] = {s: [] for s in strings}
    for n in range(1, nmax + 1):
        leaf = thin[n - 1]
        removed.update(leaf[:i] for i in range(d + 1))
        keep = [s for s in strings if s not in removed]
        name = (lambda s, n=n: f"h{n}:{s}")
        verts += [name(s) for s in keep]
        pairs += list(_tree_pairs(keep, name))
        pairs += [(_t(s), name(s)) for s in keep]
        for s in keep:
            present_in[s].append(n)
    G = Graph.from_pairs(verts, pairs)
    rays = _leaf_rays(d)
    classes = {leaf: frozenset([_t(leaf)] + [f"h{n}:{leaf}" for n in present_in[leaf]])
               for leaf in rays}
    meta = {"thin": {n + 1: leaf for n, leaf in enumerate(thin)},
            "gamma": [gamma_leaf(pre, tail, d) for pre, tail in ends]}
    return TruncatedFamily("thin-thick", d, G, classes, rays, _t(""),
                           params={"nmax": nmax}, meta=meta)


def _g(i: int, j: int) -> str:
    return f"g:{i},{j}"


def grid_product(d: int, nmax: int = 4) -> TruncatedFamily:
    """Rows 1..d of the ladder N x {1,2,3}; for k <= nmax a block
    {1..d} x ({1..k} x {2,3}) glued by (1,l,i) = (l,i)."""
    if nmax < 1 or nmax > d:
        raise InputError("need 1 <= nmax <= depth")
    verts = [_g(i, j) for i in range(1, d + 1) for j in (1, 2, 3)]
    pairs = []
    for i in range(1, d + 1):
        pairs += [(_g(i, 1), _g(i, 2)), (_g(i, 2), _g(i, 3))]
        if i < d:
            pairs += [(_g(i, j), _g(i + 1, j)) for j in (1, 2, 3)]
    classes = {"base": frozenset(_g(d, j) for j in (1, 2, 3))}
    rays = {"base": [_g(i, 1) for i in range(1, d + 1)]}

    for k in range(1, nmax + 1):
        def h(t, l, i, k=k):
            return _g(l, i) if t == 1 else f"h{k}:{t},{l},{i}"
        cells = [(t, l, i) for t in range(1, d + 1) for l in range(1, k + 1) for i in (2, 3)]
        verts += [h(*c) for c in cells if c[0] > 1]
        for t, l, i in cells:
            if t < d:
                pairs.append((h(t, l, i), h(t + 1, l, i)))
            if l < k:
                pairs.append((h(t, l, i), h(t, l + 1, i)))
            if i == 2:
                pairs.append((h(t, l, 2), h(t, l, 3)))
        key = f"w{k}"
        classes[key] = frozenset(h(d, l, i) for l in range(1, k + 1) for i in (2, 3))
        rays[key] = [_g(i, 1) for i in range(1, k + 1)] + [h(t, k, 2) for t in range(1, d + 1)]
    uniq = sorted(set(tuple(sorted(p)) for p in pairs if p[0] != p[1]))
    G = Graph.from_pairs(verts, uniq)
    return TruncatedFamily("grid-product", d, G, classes, rays, _g(1, 1),
                           params={"nmax": nmax})


def generate(family: str, depth: int, **params) -> TruncatedFamily:
    if depth < 1:
        raise InputError("depth must be positive")
    if family == "binary-tree":
        return binary_tree(depth)
    if family == "dominated-binary":
        return dominated_binary(depth)
    if family == "thin-thick":
        return thin_thick(depth, params.get("nmax", 3))
    if family == "grid-product":
        return grid_product(depth, params.get("nmax", 4))
    raise InputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


# -- flows ------------------------------------------------------------------------

def _split_network(G: Graph, free: Iterable[str] = ()) -> nx.DiGraph:
    free = set(free)
    D = nx.DiGraph()
    for v in G.vertices:
        D.add_edge((v, 0), (v, 1), capacity=float("inf") if v in free else 1)
    for a, b in G.ends:
        u, v = G.vertices[a], G.vertices[b]
        D.add_edge((u, 1), (v, 0))
        D.add_edge((v, 1), (u, 0))
    return D


def max_disjoint_paths(G: Graph, A: Iterable[str], B: Iterable[str],
                       free: Iterable[str] = ()) -> int:
    """Maximum number of A-B paths, pairwise vertex-disjoint outside ``free``."""
    A, B = set(A), set(B)
    if not A or not B:
        return 0
    D = _split_network(G, free)
    for a in A:
        D.add_edge("s", (a, 0))
    for b in B:
        D.add_edge((b, 1), "t")
    return int(nx.maximum_flow_value(D, "s", "t"))


def min_vertex_cut(G: Graph, A: Iterable[str], B: Iterable[str]) -> frozenset:
    """A smallest vertex set meeting every A-B path (may contain A or B vertices)."""
    A, B = set(A), set(B)
    D = _split_network(G)
    for a in A:
        D.add_edge("s", (a, 0))
    for b in B:
        D.add_edge((b, 1), "t")
    _, (S, _) = nx.minimum_cut(D, "s", "t")
    return frozenset(v for v in G.vertices if (v, 0) in S and (v, 1) not in S)


def class_cut(F: TruncatedFamily, a: str, b: str) -> int:
    return max_disjoint_paths(F.graph, F.frontier(a), F.frontier(b))


def _check_monotone(seq: Sequence[int]) -> None:
    if any(x > y for x, y in zip(seq, seq[1:])):
        raise AssertionError(f"flow sequence not monotone: {list(seq)}")


def fan_size(F: TruncatedFamily, v: str, key: str) -> int:
    """Paths from v to the surrogate's ray prefix and class, disjoint except at v."""
    if v not in F.graph.index:
        raise InputError(f"unknown vertex {v!r}")
    cls = F.frontier(key)
    if v in cls:
        raise InputError("v lies in the frontier class")
    target = (set(F.ray(key)) | set(cls)) - {v}
    return max_disjoint_paths(F.graph, {v}, target, free={v})


def domination_sequence(F: TruncatedFamily, v: str, key: str, depths: Sequence[int]) -> list[int]:
    seq = [fan_size(F.at_depth(d), v, key) for d in depths]
    _check_monotone(seq)
    return seq


def root_region(F: TruncatedFamily) -> set[str]:
    """Vertices within half the depth of the root (tree families: by string length)."""
    half = F.depth // 2
    out = set()
    for v in F.graph.vertices:
        tag, _, rest = v.partition(":")
        if F.family == "grid-product":
            i = int(rest.split(",")[0]) if tag == "g" else int(rest.split(",")[0])
            if i <= half:
                out.add(v)
        elif tag in ("t",) or tag.startswith("h"):
            if len(rest) <= half:
                out.add(v)
    return out


def disjoint_ray_bound(F: TruncatedFamily, key: str, depths: Sequence[int]) -> list[int]:
    seq = []
    for d in depths:
        Fd = F.at_depth(d)
        seq.append(max_disjoint_paths(Fd.graph, root_region(Fd), Fd.frontier(key)))
    _check_monotone(seq)
    return seq


def clone_count(F: TruncatedFamily, v: str) -> int:
    """Number of layer copies h<n>:s of the tree vertex t:s (layered family only)."""
    tag, _, s = v.partition(":")
    if F.family != "thin-thick" or tag != "t":
        raise InputError("clone counts are defined for tree vertices of thin-thick only")
    return sum(1 for n in range(1, F.params["nmax"] + 1) if f"h{n}:{s}" in F.graph.index)
