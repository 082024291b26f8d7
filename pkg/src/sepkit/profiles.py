"""Profiles, havens and their enumeration.

A profile of order k+1 is stored through its induced haven: a choice of one
component of G - S for every separator S with |S| <= k.  Membership is then
derived: a separation X of order <= k belongs to the profile iff s_C is
contained in X, where C is the component chosen for dX.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import CapacityError, ConsistencyError, InputError
from .graph import SCHEMA, Graph, bits, popcount
from .oracle import DEFAULT_BUDGET, OracleBudget, _subsets, enumerate_separations
from .separations import link_overlap_mask

SINGLETON_MODES = ("edge", "none")


def normalize_r(G: Graph, r) -> int:
    """Map r = infinity (None, math.inf or "inf") to |V(G)|."""
    if r is None or r == "inf" or (isinstance(r, float) and math.isinf(r)):
        return G.n
    r = int(r)
    if r < 0:
        raise InputError("r must be non-negative")
    return min(r, G.n)


@dataclass(frozen=True, eq=False)
class Haven:
    graph: Graph
    k: int
    choice: Mapping[int, int]

    @property
    def order(self) -> int:
        return self.k + 1

    def key(self) -> tuple:
        return (self.k, tuple(sorted(self.choice.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, Haven) and self.graph == other.graph and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


@dataclass(frozen=True, eq=False)
class Profile:
    """A profile of order ``k + 1`` backed by its haven.

    ``members`` optionally pins an explicit membership set (used for end
    profiles defined directly by where an end lives); otherwise membership is
    derived from the haven.
    """

    haven: Haven
    members: frozenset | None = None
    singletons: str = "edge"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def graph(self) -> Graph:
        return self.haven.graph

    @property
    def k(self) -> int:
        return self.haven.k

    @property
    def order(self) -> int:
        return self.haven.k + 1

    @property
    def choice(self) -> Mapping[int, int]:
        return self.haven.choice

    def member(self, X: int) -> bool:
        hit = self._cache.get(X)
        if hit is not None:
            return hit
        G = self.graph
        S = G.boundary_mask(X)
        if popcount(S) > self.k:
            result = False
        elif self.members is not None:
            result = X in self.members
        else:
            s = G.s_mask(self.haven.choice[S])
            result = bool(s) and not s & ~X
        if len(self._cache) < 500_000:
            self._cache[X] = result
        return result

    def key(self) -> tuple:
        return self.haven.key()

    def __eq__(self, other) -> bool:
        return isinstance(other, Profile) and self.haven == other.haven

    def __hash__(self) -> int:
        return hash(self.haven)

    def __repr__(self) -> str:
        return f"Profile(order={self.order}, separators={len(self.choice)})"


# -- axioms -----------------------------------------------------------------

@dataclass
class AxiomReport:
    ok: bool
    failure: str | None = None
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def check_profile_axioms(G: Graph, P: Profile, budget: OracleBudget = DEFAULT_BUDGET,
                         max_pairs: int = 60_000_000) -> AxiomReport:
    """Exhaustive check of P0-P3 and the singleton clause."""
    k = P.k
    seps = enumerate_separations(G, k, budget)
    full = G.full
    members = []
    for X in seps:
        a, b = P.member(X), P.member(full & ~X)
        if a == b:
            return AxiomReport(False, "P0", (X,))
        if a:
            members.append(X)
    if len(members) ** 2 > max_pairs:
        raise CapacityError("profile too large for exhaustive axiom check")
    if P.singletons == "edge":
        for X in members:
            if popcount(X) == 1:
                return AxiomReport(False, "singleton", (X,))
    vx = {X: (G.vert_of(X), G.vert_of(full & ~X)) for X in members}
    for i, X in enumerate(members):
        VX, VXc = vx[X]
        for Y in members[i:]:
            if not X & Y:
                return AxiomReport(False, "P1", (X, Y))
            VY, VYc = vx[Y]
            if popcount(VX & VY & (VXc | VYc)) <= k and not P.member(X & Y):
                return AxiomReport(False, "P2", (X, Y))
    componental = [X for X in members
                   if any(G.s_mask(C) == X for C in G.components(G.boundary_mask(X)))]
    for X in members:
        if not any(not Y & ~X for Y in componental):
            return AxiomReport(False, "P3", (X,))
    return AxiomReport(True)


# -- robustness ---------------------------------------------------------------

def _corner_pair_fits(G: Graph, Y: int, Z: int, ell: int) -> bool:
    """Can X with X & Y == Z keep |L(X,Y)| and |L(X^c,Y)| both below ell?

    Only the complement edges at dY are free; each boundary vertex whose Y-edges
    all lie on one side wants its remaining edges on that same side, and an
    edge joining two such vertices of opposite preference forces one of them
    into the other link.
    """
    full = G.full
    W = Y & ~Z
    VY = G.vert_of(Y)
    dY = VY & G.vert_of(full & ~Y)
    VZ, VW = G.vert_of(Z), G.vert_of(W)
    interior = VY & ~dY
    base = popcount(VZ & VW & interior) + popcount(VZ & VW & dY)
    ztype = dY & VZ & ~VW
    wtype = dY & VW & ~VZ
    l1 = base + popcount(ztype)
    l2 = base + popcount(wtype)
    if l1 >= ell or l2 >= ell:
        return False
    conflicts = []
    for i in bits(full & ~Y):
        a, b = G.ends[i]
        if ztype >> a & 1 and wtype >> b & 1:
            conflicts.append((a, b))
        elif ztype >> b & 1 and wtype >> a & 1:
            conflicts.append((b, a))
    if not conflicts:
        return True
    zs = list(bits(ztype))
    for sub in range(1 << len(zs)):
        A = 0
        for j, z in enumerate(zs):
            if sub >> j & 1:
                A |= 1 << z
        B = 0
        for z, w in conflicts:
            if not A >> z & 1:
                B |= 1 << w
        if l1 + popcount(B) < ell and l2 + popcount(A) < ell:
            return True
    return False


def robustness_witness(G: Graph, P: Profile, r, budget: OracleBudget = DEFAULT_BUDGET):
    """Return (X-or-Z, Y) breaking r-robustness, or None when robust.

    For r >= |V| the witness is (Z, Y) with Z = X & Y; otherwise an explicit X.
    """
    r = normalize_r(G, r)
    k = P.k
    if r <= k or k == 0:
        return None
    full = G.full
    seps = enumerate_separations(G, k, budget)
    by_order: dict[int, list[int]] = {}
    for X in seps:
        by_order.setdefault(G.order(X), []).append(X)
    members = [Y for Y in seps if P.member(Y)]
    if r >= G.n:
        for Y in members:
            ell = G.order(Y)
            if ell == 0:
                continue
            for o in range(ell):
                for Z in by_order.get(o, ()):
                    if Z & ~Y or Z == 0 or Z == Y or P.member(Z):
                        continue
                    W = Y & ~Z
                    if G.order(W) >= ell or P.member(W):
                        continue
                    if _corner_pair_fits(G, Y, Z, ell):
                        return (Z, Y)
        return None
    for X in enumerate_separations(G, r, budget):
        Xc = full & ~X
        for Y in members:
            ell = G.order(Y)
            if (popcount(link_overlap_mask(G, X, Y)) < ell
                    and popcount(link_overlap_mask(G, Xc, Y)) < ell
                    and not P.member(Y & ~X) and not P.member(Y & ~Xc)):
                return (X, Y)
    return None


def is_r_robust(G: Graph, P: Profile, r=None, budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    return robustness_witness(G, P, r, budget) is None


def robust_by_expansion(G: Graph, P: Profile, r=None) -> bool:
    """Direct quantifier expansion over all 2^|E| separations X (small graphs)."""
    r = normalize_r(G, r)
    full = G.full
    members = [Y for Y in enumerate_separations(G, P.k) if P.member(Y)]
    for X in range(full + 1):
        if G.order(X) > r:
            continue
        Xc = full & ~X
        for Y in members:
            ell = G.order(Y)
            if (popcount(link_overlap_mask(G, X, Y)) < ell
                    and popcount(link_overlap_mask(G, Xc, Y)) < ell
                    and not P.member(Y & ~X) and not P.member(Y & ~Xc)):
                return False
    return True


# -- havens -------------------------------------------------------------------

def induced_haven(G: Graph, P: Profile) -> Haven:
    """For each separator S, the unique component C of G - S with s_C in P."""
    choice = {}
    for S in G.separators(P.k):
        picked = [C for C in G.components(S) if P.member(G.s_mask(C))]
        if len(picked) != 1:
            raise ConsistencyError("profile does not pick a unique component", (S, picked))
        choice[S] = picked[0]
    return Haven(G, P.k, choice)


def _closed(G: Graph, C: int) -> int:
    return C | G.nbhd(C)


def is_haven(G: Graph, H: Haven) -> bool:
    items = list(H.choice.items())
    for S in G.separators(H.k):
        C = H.choice.get(S)
        if C is None or C not in G.components(S):
            return False
    closed = [_closed(G, C) for _, C in items]
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if not closed[i] & items[j][1]:
                return False
    return True


def good_haven_witness(G: Graph, H: Haven, pairs=None):
    """First (S, T) violating goodness, or None.

    For chosen C (for S) and D (for T), the vertices of S | T touching both are
    exactly L(s_C, s_D); when there are at most k of them, s_C & s_D must again
    be a member, i.e. contain s_E for the component E chosen at its boundary.
    """
    k = H.k
    full = G.full
    info = {}
    for S, C in H.choice.items():
        s = G.s_mask(C)
        info[S] = (C, s, G.vert_of(s), G.vert_of(full & ~s))
    keys = sorted(info)
    if pairs is None:
        pairs = ((keys[i], keys[j]) for i in range(len(keys)) for j in range(i, len(keys)))
    for S, T in pairs:
        _, sC, V1, V1c = info[S]
        _, sD, V2, V2c = info[T]
        L = V1 & V2 & (V1c | V2c)
        if popcount(L) > k:
            continue
        Z = sC & sD
        if not Z:
            return (S, T)
        R = G.boundary_mask(Z)
        sE = G.s_mask(H.choice[R])
        if not sE or sE & ~Z:
            return (S, T)
    return None


def is_good_haven(G: Graph, H: Haven) -> bool:
    return good_haven_witness(G, H) is None


def haven_to_profile(G: Graph, H: Haven, singletons: str = "edge") -> Profile:
    if not is_haven(G, H):
        raise InputError("not a haven")
    if good_haven_witness(G, H) is not None:
        raise InputError("haven is not good")
    return Profile(H, singletons=singletons)


# -- distinguishing -------------------------------------------------------------

def distinguishes(G: Graph, X: int, P: Profile, Q: Profile) -> bool:
    Xc = G.full & ~X
    return (P.member(X) and Q.member(Xc)) or (Q.member(X) and P.member(Xc))


def distinguishing_order(P: Profile, Q: Profile) -> int | None:
    """Least |S| at which the two havens choose differently (None if never)."""
    top = min(P.k, Q.k)
    best = None
    for S, C in P.choice.items():
        if popcount(S) <= top and Q.choice[S] != C:
            size = popcount(S)
            if best is None or size < best:
                best = size
    return best


def differing_separators(P: Profile, Q: Profile, size: int) -> list[int]:
    return sorted(S for S, C in P.choice.items()
                  if popcount(S) == size and S in Q.choice and Q.choice[S] != C)


def distinguishers_at(G: Graph, P: Profile, Q: Profile, S: int) -> Iterator[int]:
    """Every X with dX = S that lies in P with its complement in Q.

    Such X contain s_C for P's component C at S, avoid s_D for Q's component D,
    and otherwise take any union of the remaining componental sets plus any
    edges inside S.
    """
    C, D = P.choice[S], Q.choice[S]
    if C == D:
        return
    base = G.s_mask(C)
    others = [G.s_mask(c) for c in G.components(S) if c not in (C, D)]
    internal = G.internal_edges(S)
    for pick in range(1 << len(others)):
        X = base
        for i, part in enumerate(others):
            if pick >> i & 1:
                X |= part
        for sub in _subsets(internal):
            Y = X | sub
            if G.boundary_mask(Y) == S:
                yield Y


def efficiently(G: Graph, X: int, P: Profile, Q: Profile,
                budget: OracleBudget = DEFAULT_BUDGET) -> bool:
    from .oracle import min_distinguishing_order
    if P == Q or not distinguishes(G, X, P, Q):
        return False
    return G.order(X) == min_distinguishing_order(G, P, Q, budget)


def restrict_profile(P: Profile, j: int) -> Profile:
    if j > P.k:
        raise InputError("can only restrict to a smaller order")
    if j == P.k:
        return P
    choice = {S: C for S, C in P.choice.items() if popcount(S) <= j}
    members = None
    if P.members is not None:
        G = P.graph
        members = frozenset(X for X in P.members if G.order(X) <= j)
    return Profile(Haven(P.graph, j, choice), members, P.singletons)


# -- enumeration ------------------------------------------------------------------

def _singleton_member(G: Graph, choice: Mapping[int, int], k: int) -> bool:
    for i in range(G.m):
        X = 1 << i
        S = G.boundary_mask(X)
        if popcount(S) <= k:
            s = G.s_mask(choice[S])
            if s and not s & ~X:
                return True
    return False


def _extend(G: Graph, parent: Mapping[int, int], j: int) -> list[dict]:
    """All haven extensions of ``parent`` to separators of size exactly j."""
    new_seps = [S for S in G.separators(j) if popcount(S) == j]
    cands = []
    for S in new_seps:
        opts = []
        for C in G.components(S):
            if all(not C & ~parent[S & ~(1 << v)] for v in bits(S)):
                opts.append(C)
        if not opts:
            return []
        cands.append(opts)
    old_closed = [_closed(G, C) for C in set(parent.values())]
    results = []
    chosen: list[int] = []
    chosen_closed: list[int] = []

    def rec(i: int) -> None:
        if i == len(new_seps):
            choice = dict(parent)
            choice.update(zip(new_seps, chosen))
            results.append(choice)
            return
        for C in cands[i]:
            if any(not cl & C for cl in old_closed):
                continue
            if any(not cl & C for cl in chosen_closed):
                continue
            chosen.append(C)
            chosen_closed.append(_closed(G, C))
            rec(i + 1)
            chosen.pop()
            chosen_closed.pop()

    rec(0)
    return results


def enumerate_profiles(G: Graph, k: int, r=None, singletons: str = "edge",
                       budget: OracleBudget = DEFAULT_BUDGET,
                       max_profiles: int = 5_000) -> list[Profile]:
    """All r-robust profiles of order k+1, deduplicated, in deterministic order."""
    levels = enumerate_profile_levels(G, k, r, singletons, budget, max_profiles)
    return levels[k] if k < len(levels) else []


def enumerate_profile_levels(G: Graph, k: int, r=None, singletons: str = "edge",
                             budget: OracleBudget = DEFAULT_BUDGET,
                             max_profiles: int = 5_000) -> list[list[Profile]]:
    """Profiles of every order 1..k+1; entry j holds those of order j+1.

    Stops early once some order has no profile (restrictions of profiles are
    profiles, so no higher order can have one either).
    """
    if singletons not in SINGLETON_MODES:
        raise InputError(f"singletons must be one of {SINGLETON_MODES}")
    if not G.is_connected():
        raise InputError("profile enumeration requires a connected graph")
    budget.check(G, k)
    r = normalize_r(G, r)
    levels: list[list[Profile]] = []
    base = {0: G.vfull}
    if not G.full or (singletons == "edge" and G.m == 1):
        return [[]]
    current = [base]
    levels.append([Profile(Haven(G, 0, base), singletons=singletons)])
    for j in range(1, k + 1):
        nxt = []
        seen = set()
        for parent in current:
            for choice in _extend(G, parent, j):
                key = tuple(sorted(choice.items()))
                if key in seen:
                    continue
                seen.add(key)
                H = Haven(G, j, choice)
                new_keys = [S for S in choice if popcount(S) == j]
                all_keys = sorted(choice)
                pairs = [(S, T) for S in new_keys for T in all_keys]
                if good_haven_witness(G, H, pairs) is not None:
                    continue
                if singletons == "edge" and _singleton_member(G, choice, j):
                    continue
                P = Profile(H, singletons=singletons)
                if r > j and robustness_witness(G, P, r, budget) is not None:
                    continue
                nxt.append((key, choice, P))
                if len(nxt) > max_profiles:
                    raise CapacityError("profile enumeration budget exceeded")
        nxt.sort(key=lambda t: t[0])
        current = [c for _, c, _ in nxt]
        levels.append([p for _, _, p in nxt])
        if not nxt:
            break
    return levels


def all_profiles(G: Graph, r=None, singletons: str = "edge",
                 budget: OracleBudget = DEFAULT_BUDGET) -> list[Profile]:
    """Every r-robust profile of every order (an r-profile set)."""
    top = min(G.n - 1, budget.max_k)
    levels = enumerate_profile_levels(G, top, r, singletons, budget)
    return [p for level in levels for p in level]


def close_under_restriction(profiles: Iterable[Profile]) -> list[Profile]:
    out: dict[tuple, Profile] = {}
    for P in profiles:
        for j in range(P.k + 1):
            R = restrict_profile(P, j)
            out.setdefault(R.key(), R)
    return [out[key] for key in sorted(out)]


# -- serialization ------------------------------------------------------------------

def profile_to_json(P: Profile) -> dict:
    G = P.graph
    choices = []
    for S in sorted(P.choice, key=lambda s: (popcount(s), sorted(G.names(s)))):
        C = P.choice[S]
        choices.append({"separator": sorted(G.names(S)),
                        "component_representative": min(G.names(C))})
    return {"schema": SCHEMA, "order": P.order, "choices": choices}


def profile_from_json(G: Graph, doc: dict, singletons: str = "edge") -> Profile:
    try:
        k = int(doc["order"]) - 1
        choice = {}
        for item in doc["choices"]:
            S = G.vmask(item["separator"])
            v = G.index[item["component_representative"]]
            choice[S] = G.component_of(S, v)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed profile document: {exc}") from exc
    H = Haven(G, k, choice)
    if not is_haven(G, H):
        raise InputError("profile document does not describe a haven")
    return Profile(H, singletons=singletons)
