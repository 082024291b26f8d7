"""Extending torso separations back to the host graph.

``hat`` runs the forcing fixpoint: edges at a vertex only on the Y side of the
torso are forced, every attached separation containing a forced edge gets
forced entirely, and so on.  ``tilde`` makes a nested torso family lift to a
nested family of the host by processing it in a fixed total order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ConsistencyError, InputError
from .graph import Graph, bits, popcount
from .separations import nested
from .torso import Torso, check_nested


@dataclass
class ForcingTrace:
    edge_step: dict = field(default_factory=dict)  # host edge index -> odd step
    sep_step: dict = field(default_factory=dict)   # index into attached -> even step
    attached: tuple = ()                           # the separations X[B]^c
    forced: int = 0

    def edges_at(self, step: int) -> int:
        m = 0
        for e, s in self.edge_step.items():
            if s == step:
                m |= 1 << e
        return m

    def to_json(self, G: Graph) -> dict:
        return {
            "edges": {G.edge_ids[e]: s for e, s in sorted(self.edge_step.items())},
            "separations": {str(i): s for i, s in sorted(self.sep_step.items())},
            "forced": G.sorted_ids(self.forced),
        }


def _side_key(G: Graph, X: int) -> tuple:
    return (popcount(X), G.sorted_ids(X))


def block_side(G: Graph, X: int, B: int) -> int:
    """X[B]: the side of X whose vertex set includes B (smaller side on ties)."""
    Xc = G.full & ~X
    a = not B & ~G.vert_of(X)
    b = not B & ~G.vert_of(Xc)
    if a and b:
        return min(X, Xc, key=lambda Z: _side_key(G, Z))
    if a:
        return X
    if b:
        return Xc
    raise ConsistencyError("vertex set is not inside one side of a nested separation",
                           (G.names(B), G.sorted_ids(X)))


def attached_separations(T: Torso) -> tuple[int, ...]:
    G = T.host
    return tuple(G.full & ~block_side(G, X, T.block) for X in T.nested_set)


def torso_sides(T: Torso, Y: int) -> tuple[int, int]:
    """(C, D) = (V(Y), V(Y^c)) in the torso, as host vertex masks."""
    TG = T.graph
    if Y < 0 or Y & ~TG.full:
        raise InputError("not a separation of the torso")
    C = TG.vert_of(Y)
    D = TG.vert_of(TG.full & ~Y)
    return T.to_host_vertices(C), T.to_host_vertices(D)


def hat(T: Torso, Y: int) -> tuple[int, ForcingTrace]:
    """Edges of the host forced by the torso separation Y."""
    G = T.host
    C, D = torso_sides(T, Y)
    M = attached_separations(T)
    trace = ForcingTrace(attached=M)
    frontier = G.s_mask(C & ~D)
    step = 1
    for e in bits(frontier):
        trace.edge_step[e] = step
    forced = frontier
    while frontier:
        step += 1
        grabbed = 0
        for i, X in enumerate(M):
            if i not in trace.sep_step and X & frontier:
                trace.sep_step[i] = step
                grabbed |= X
        step += 1
        frontier = grabbed & ~forced
        for e in bits(frontier):
            trace.edge_step[e] = step
        forced |= frontier
    trace.forced = forced
    return forced, trace


def forcing_violations(T: Torso, Y: int) -> list[str]:
    """Check the step-1 facts and the disjointness of Y- and Y^c-forcing."""
    G, TG = T.host, T.graph
    Yc = TG.full & ~Y
    F, tf = hat(T, Y)
    Fc, tc = hat(T, Yc)
    C, D = torso_sides(T, Y)
    out = []
    if F & Fc:
        out.append("edge forced by both sides")
    s1, s1c = tf.edges_at(1), tc.edges_at(1)
    if s1 & s1c:
        out.append("edge forced by both sides at step 1")
    for X in tf.attached:
        if X & s1 and X & s1c:
            out.append("attached separation mixes step-1 edges of both sides")
        bX = G.boundary_mask(X)
        for e in bits(X & s1):
            a, b = G.ends[e]
            for v in (a, b):
                if (C & ~D) >> v & 1 and not bX >> v & 1:
                    out.append("forced endvertex outside the boundary")
        if s1 and not s1 & ~X:
            out.append("attached separation holds all step-1 edges")
    return out


@dataclass
class ExtendedFamily:
    torso: Torso
    family: tuple[int, ...]     # torso separations in processing order
    lifted: tuple[int, ...]     # host separations, same order
    forced: tuple[int, ...]     # hat of each member
    forced_c: tuple[int, ...]   # hat of each complement
    overlaps: tuple[int, ...]   # literal complement-rule overlap per member
    literal_c: tuple[int, ...] = ()  # complement rule evaluated literally

    def complement_mismatches(self) -> list[int]:
        """Members whose literal complement lift differs from the complement."""
        full = self.torso.host.full
        return [i for i, (t, c) in enumerate(zip(self.lifted, self.literal_c)) if c != full & ~t]


def default_order(G: Graph, family: Sequence[int]) -> list[int]:
    return sorted(set(family), key=lambda X: (G.order(X), G.sorted_ids(X)))


def tilde(T: Torso, family: Sequence[int],
          order: Callable[[Graph, Sequence[int]], list[int]] | None = None,
          check: bool = True) -> ExtendedFamily:
    """Lift an ordered nested torso family to a nested family of the host."""
    TG, G = T.graph, T.host
    fam = list(family) if order is None else order(TG, family)
    if len(set(fam)) != len(fam):
        raise InputError("family has repeated members")
    w = check_nested(TG, fam)
    if w is not None:
        raise InputError("torso family is not nested")
    full = G.full
    done: list[tuple[int, int, int, int]] = []  # (Y, Yc, tilde Y, tilde Yc)
    lifted, forced, forced_c, overlaps, literal_c = [], [], [], [], []
    for Y in fam:
        Yc = TG.full & ~Y
        F, _ = hat(T, Y)
        Fc, _ = hat(T, Yc)
        if F & Fc:
            raise ConsistencyError("edge forced by both sides", G.sorted_ids(F & Fc))
        new = _rule(done, Y, Yc, F, Fc, full)
        # the first member's complement is the plain complement of its hat
        new_c = _rule(done, Yc, Y, Fc, F, full) if done else full & ~new
        overlaps.append(new & new_c)
        literal_c.append(new_c)
        tY = new
        done.append((Y, Yc, tY, full & ~tY))
        lifted.append(tY)
        forced.append(F)
        forced_c.append(Fc)
    ext = ExtendedFamily(T, tuple(fam), tuple(lifted), tuple(forced),
                         tuple(forced_c), tuple(overlaps), tuple(literal_c))
    if check:
        problems = extension_violations(ext)
        if problems:
            raise ConsistencyError("lifted family violates its guarantees", problems)
    return ext


def _rule(done, Y: int, Yc: int, F: int, Fc: int, full: int) -> int:
    """Forced by Y; inside a lift of something below Y; inside every lift of
    something above Y and not forced by the complement."""
    below = 0
    above = None
    for Z, Zc, tZ, tZc in done:
        for z, tz in ((Z, tZ), (Zc, tZc)):
            if not z & ~Y:
                below |= tz
            if not Y & ~z:
                above = tz if above is None else above & tz
    out = F | below
    if above is not None:
        out |= above & ~Fc
    return out


def extension_violations(ext: ExtendedFamily) -> list[str]:
    T = ext.torso
    TG, G = T.graph, T.host
    full = G.full
    out = []
    for i, Y in enumerate(ext.family):
        tY = ext.lifted[i]
        if ext.forced[i] & ~tY:
            out.append(f"member {i}: misses an edge forced by it")
        if ext.forced_c[i] & tY:
            out.append(f"member {i}: complement misses an edge forced by it")
        if G.boundary_mask(tY) & ~T.to_host_vertices(TG.boundary_mask(Y)):
            out.append(f"member {i}: boundary grew")
        for M in attached_separations(T):
            if M & tY and M & ~tY:
                out.append(f"member {i}: splits an attached separation")
                break
        Yc = TG.full & ~Y
        for j in range(i):
            Z = ext.family[j]
            tZ = ext.lifted[j]
            for z, tz in ((Z, tZ), (TG.full & ~Z, full & ~tZ)):
                for y, ty in ((Y, tY), (Yc, full & ~tY)):
                    if not z & ~y and tz & ~ty:
                        out.append(f"members {j},{i}: inclusion not preserved")
                    if not y & ~z and ty & ~tz:
                        out.append(f"members {i},{j}: inclusion not preserved")
    return out


def lift_across_blocks(G: Graph, N: Sequence[int], families: dict) -> list[int]:
    """N together with the lifts of every block's family, verified nested.

    ``families`` maps a block (vertex mask) to an ordered torso family, or to an
    already computed :class:`ExtendedFamily`.
    """
    from .torso import torso_of
    out = list(N)
    seen = set(out)
    for B, fam in families.items():
        ext = fam if isinstance(fam, ExtendedFamily) else tilde(torso_of(G, N, B), fam)
        for X in ext.lifted:
            if X not in seen:
                seen.add(X)
                out.append(X)
    w = check_nested(G, out)
    if w is not None:
        raise ConsistencyError("lifted system is not nested", w)
    return out
