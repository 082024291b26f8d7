"""Command line entry point: ``sepkit <command> ...``.

Exit status: 0 success, 1 invariant failure, 2 input error, 3 capacity.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CapacityError, ConsistencyError, InputError
from .graph import SCHEMA, Graph

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _emit(doc, path: str | None = None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _parse_r(text: str | None):
    if text is None or text in ("inf", "infinity"):
        return None
    try:
        return int(text)
    except ValueError as exc:
        raise InputError(f"robustness must be an integer or 'inf', got {text!r}") from exc


def _params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"parameter must look like key=value, got {item!r}")
        try:
            out[key] = int(value)
        except ValueError as exc:
            raise InputError(f"parameter {key} must be an integer") from exc
    return out


def _family(args):
    from .families import generate
    params = _params(args.param)
    if getattr(args, "nmax", None) is not None:
        params["nmax"] = args.nmax
    return generate(args.family, args.depth, **params)


def _graph(args) -> Graph:
    if getattr(args, "graph", None):
        doc = _read_json(args.graph)
        if isinstance(doc, dict) and "graph" in doc:
            doc = doc["graph"]
        return Graph.from_json(doc)
    if getattr(args, "family", None):
        return _family(args).graph
    raise InputError("give --graph or --family/--depth")


# -- commands ------------------------------------------------------------------

def cmd_generate(args) -> int:
    F = _family(args)
    if args.dot:
        sys.stdout.write(F.graph.to_dot())
        return EXIT_OK
    if args.out or args.ends:
        if args.out:
            _emit(F.graph.to_json(), args.out)
        if args.ends:
            _emit(F.ends_json(), args.ends)
        return EXIT_OK
    doc = F.ends_json()
    doc["graph"] = F.graph.to_json()
    _emit(doc)
    return EXIT_OK


def cmd_profiles(args) -> int:
    from .profiles import enumerate_profile_levels, profile_to_json
    G = _graph(args)
    levels = enumerate_profile_levels(G, args.k, _parse_r(args.r), singletons=args.singletons)
    _emit({"schema": SCHEMA, "profiles": [profile_to_json(P) for lv in levels for P in lv]})
    return EXIT_OK


def cmd_distinguish(args) -> int:
    from .decomposition import nested_to_tree_decomposition
    from .distinguisher import build_nested_distinguishing_set
    from .profiles import profile_to_json
    G = _graph(args)
    res = build_nested_distinguishing_set(G, _parse_r(args.r), k_max=args.k_max,
                                          maximal=args.maximal)
    if args.dot:
        sys.stdout.write(nested_to_tree_decomposition(G, res.nested).to_dot())
        return EXIT_OK
    _emit({
        "schema": SCHEMA,
        "nested": res.ids(),
        "profiles": [profile_to_json(P) for P in res.profiles],
        "certificates": [{"pair": [i, j], "order": G.order(X), "separation": G.sorted_ids(X)}
                         for (i, j), X in sorted(res.certificates.items())],
    }, args.emit)
    return EXIT_OK


def _nested_from(args, G: Graph) -> list[int]:
    if args.nested:
        doc = _read_json(args.nested)
        items = doc.get("nested") if isinstance(doc, dict) else doc
        if not isinstance(items, list):
            raise InputError("nested document must hold a list of edge-id lists")
        return [G.sep(ids) for ids in items]
    from .distinguisher import build_nested_distinguishing_set
    return build_nested_distinguishing_set(G, _parse_r(args.r)).nested


def _td_out(G: Graph, TD, args, extra=None) -> int:
    from .decomposition import validate_td
    rep = validate_td(G, TD)
    if args.dot:
        sys.stdout.write(TD.to_dot())
    else:
        doc = TD.to_json()
        doc["valid"] = rep.ok
        doc["adhesion"] = rep.adhesion
        if not rep.ok:
            doc["violations"] = [str(v) for v in rep.violations]
        doc.update(extra or {})
        _emit(doc)
    return EXIT_OK if rep.ok else EXIT_INVARIANT


def cmd_decompose(args) -> int:
    from .decomposition import nested_to_tree_decomposition
    G = _graph(args)
    return _td_out(G, nested_to_tree_decomposition(G, _nested_from(args, G)), args)


def cmd_star(args) -> int:
    from .decomposition import star_decomposition, topological_surrogates
    F = _family(args)
    W = args.W or [F.root]
    sd = star_decomposition(F.graph, W, topological_surrogates(F))
    return _td_out(F.graph, sd.as_td(), args,
                   {"hosted": {f"s{i}": keys for i, keys in enumerate(sd.hosted)},
                    "unhosted": sd.unhosted})


def cmd_spanning_tree(args) -> int:
    from .decomposition import end_faithful_spanning_tree, end_faithful_violations
    F = _family(args)
    res = end_faithful_spanning_tree(F)
    bad = end_faithful_violations(F, res)
    if args.dot:
        sys.stdout.write(F.graph.to_dot(highlight=res.edges))
    else:
        _emit({"schema": SCHEMA, "root": res.root, "edges": res.edge_ids(),
               "split_near_root": bad})
    return EXIT_INVARIANT if bad else EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import enumerate_separations, min_distinguishing_order
    from .profiles import profile_from_json
    G = _graph(args)
    if args.oracle_cmd == "min-order":
        doc = _read_json(args.profiles)
        items = doc.get("profiles") if isinstance(doc, dict) else doc
        if not isinstance(items, list) or len(items) != 2:
            raise InputError("profiles document must hold exactly two profiles")
        P, Q = (profile_from_json(G, d) for d in items)
        print(min_distinguishing_order(G, P, Q))
    else:
        seps = enumerate_separations(G, args.k)
        _emit({"schema": SCHEMA, "k": args.k, "count": len(seps),
               "separations": [G.sorted_ids(X) for X in seps]})
    return EXIT_OK


def cmd_check(args) -> int:
    from .invariants import run_invariants
    G = _graph(args)
    checks = run_invariants(G, args.k, seed=args.seed)
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.ok or not c.gating for c in checks) else EXIT_INVARIANT


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .families import FAMILIES
    p = argparse.ArgumentParser(prog="sepkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def graph_opts(sp, family=True):
        sp.add_argument("--graph", help="graph JSON file ('-' for stdin)")
        if family:
            fam_opts(sp, required=False)

    def fam_opts(sp, required=True):
        sp.add_argument("--family", choices=sorted(FAMILIES), required=required)
        sp.add_argument("--depth", type=int, default=4)
        sp.add_argument("--nmax", type=int, default=None, help="width cap for layered families")
        sp.add_argument("--param", action="append", metavar="KEY=INT",
                        help="family parameter, e.g. nmax=3")

    sp = sub.add_parser("generate", help="truncated family graph and its end surrogates")
    fam_opts(sp)
    sp.add_argument("--out", metavar="PATH", help="write the graph JSON here")
    sp.add_argument("--ends", metavar="PATH", help="write the end surrogates JSON here")
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("profiles", help="enumerate robust profiles")
    graph_opts(sp)
    sp.add_argument("--k", type=int, default=2, help="largest separation order")
    sp.add_argument("--r", default=None, help="robustness (integer or 'inf')")
    sp.add_argument("--singletons", choices=["edge", "none"], default="edge")
    sp.set_defaults(func=cmd_profiles)

    sp = sub.add_parser("distinguish", help="nested set distinguishing robust profiles")
    graph_opts(sp)
    sp.add_argument("--r", default=None)
    sp.add_argument("--k-max", type=int, default=None)
    sp.add_argument("--maximal", action="store_true", help="exhaustive maximal selection")
    sp.add_argument("--emit", metavar="PATH", help="write the JSON result here instead of stdout")
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_distinguish)

    sp = sub.add_parser("decompose", help="tree-decomposition from a nested set")
    graph_opts(sp)
    sp.add_argument("--nested", help="JSON with a 'nested' list (default: distinguish first)")
    sp.add_argument("--r", default=None)
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("star", help="star decomposition of a truncation")
    fam_opts(sp)
    sp.add_argument("--W", nargs="+", help="vertices for the center (default: root)")
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_star)

    sp = sub.add_parser("spanning-tree", help="end-faithful spanning tree of a truncation")
    fam_opts(sp)
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_spanning_tree)

    sp = sub.add_parser("oracle", help="exhaustive reference computations")
    osub = sp.add_subparsers(dest="oracle_cmd", required=True)
    o1 = osub.add_parser("min-order", help="least order of a distinguishing separation")
    graph_opts(o1)
    o1.add_argument("--profiles", required=True, help="JSON with two profiles")
    o2 = osub.add_parser("separations", help="all separations up to an order")
    graph_opts(o2)
    o2.add_argument("--k", type=int, default=1)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("check-invariants", help="run the property suite on a graph")
    graph_opts(sp)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"sepkit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"sepkit: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConsistencyError as exc:
        print(f"sepkit: invariant failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
