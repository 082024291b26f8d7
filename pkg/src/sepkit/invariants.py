"""The property suite behind ``sepkit check-invariants``."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .distinguisher import build_nested_distinguishing_set
from .graph import Graph, popcount
from .lift import extension_violations
from .oracle import DEFAULT_BUDGET, OracleBudget, enumerate_separations, min_distinguishing_order, \
    powerset_separations
from .profiles import check_profile_axioms, enumerate_profile_levels, haven_to_profile, induced_haven
from .separations import link_overlap_mask
from .torso import check_nested, check_torso_clique


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    gating: bool = True

    def line(self) -> str:
        tag = "PASS" if self.ok else ("FAIL" if self.gating else "NOTE")
        return f"{self.name:<28} {tag}  {self.detail}".rstrip()


def link_identity_holds(G: Graph, X: int, Y: int) -> bool:
    full = G.full
    lhs = popcount(link_overlap_mask(G, X, Y)) + popcount(link_overlap_mask(G, full & ~X, full & ~Y))
    return lhs == G.order(X) + G.order(Y)


def lift_problems(ext) -> tuple[list[str], list[int]]:
    """(violated guarantees, members whose literal complement rule disagrees)."""
    G = ext.torso.host
    out = list(extension_violations(ext))
    for F, Fc in zip(ext.forced, ext.forced_c):
        if F & Fc:
            out.append("edge forced by both sides: " + ",".join(G.sorted_ids(F & Fc)))
    return out, ext.complement_mismatches()


def run_invariants(G: Graph, k: int, budget: OracleBudget = DEFAULT_BUDGET,
                   max_pairs: int = 2000, seed: int = 0) -> list[Check]:
    checks = []
    seps = enumerate_separations(G, k, budget)
    if G.m <= 16:
        same = seps == powerset_separations(G, k)
        checks.append(Check("oracle completeness", same, f"{len(seps)} separations"))
    rng = random.Random(seed)
    pairs = [(rng.choice(seps), rng.choice(seps)) for _ in range(max_pairs)] if seps else []
    bad = sum(1 for X, Y in pairs if not link_identity_holds(G, X, Y))
    checks.append(Check("link identity", not bad, f"{bad}/{len(pairs)} failures"))

    levels = enumerate_profile_levels(G, k, 0, budget=budget)
    profs = [P for lv in levels for P in lv]
    bad_ax = [P.key() for P in profs if not check_profile_axioms(G, P, budget)]
    checks.append(Check("profile axioms", not bad_ax, f"{len(profs)} profiles"))
    bad_rt = 0
    for P in profs:
        Q = haven_to_profile(G, induced_haven(G, P), P.singletons)
        if any(P.member(X) != Q.member(X) for X in seps if G.order(X) <= P.k):
            bad_rt += 1
    checks.append(Check("haven round trip", not bad_rt, f"{bad_rt} mismatches"))

    res = build_nested_distinguishing_set(G, k_max=k, budget=budget)
    w = check_nested(G, res.nested)
    checks.append(Check("distinguishing set nested", w is None, f"{len(res.nested)} members"))
    P = res.profiles
    bad_eff = 0
    for (i, j), X in res.certificates.items():
        if P[i].k == P[j].k and G.order(X) != min_distinguishing_order(G, P[i], P[j], budget):
            bad_eff += 1
    checks.append(Check("efficient distinguishers", not bad_eff, f"{len(res.certificates)} pairs"))

    problems, mism, members = [], 0, 0
    for ext in res.trace.extensions:
        p, m = lift_problems(ext)
        problems.extend(p)
        mism += len(m)
        members += len(ext.lifted)
    checks.append(Check("lift guarantees", not problems, f"{len(res.trace.extensions)} lifts"))
    checks.append(Check("literal complement rule", not mism,
                        f"{mism}/{members} members differ from the complement", gating=False))
    bad_cl = sum(1 for host, N, B in res.trace.torsos if check_torso_clique(host, N, B) is not None)
    checks.append(Check("torso clique", not bad_cl, f"{len(res.trace.torsos)} torsos"))
    return checks
