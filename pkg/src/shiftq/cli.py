"""Command-line front end.

    shiftq dynkin A2
    shiftq lweight "Psi[1,0]^-1 * Psi[2,1]" --type A2
    shiftq qchar neg-prefund --type A2 --node 1 --depth 6
    shiftq module verify sl3-pair-inflation --type A3 --nodes 1,2 --basis 6 --modes 3
    shiftq module qchar sl2-neg-prefund --type A1 --depth 6
    shiftq identity qq-tilde --type A2 --node 1 --spec 0 --depth 6
    shiftq rmatrix --a 4 --basis 4 --modes 2
    shiftq suite [--only 1,3] [--jobs N]

Every command takes --format text|json.  Exit codes: 0 success, 1 a
verification failed, 2 usage error.  JSON documents carry "schema": 1.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cartan import CartanError, parse_dynkin
from .identities import IDENTITIES, IdentityError, check_identity
from .lweight import (
    LWeightError,
    build_named_weight,
    lw_degree,
    lw_to_Y,
    lweight_to_json,
    parse_lweight,
    render_lweight,
)
from .modrel import (
    REALIZATIONS,
    RELATIONS,
    RealizationError,
    Window,
    module_qchar,
    realize,
    rmatrix_check,
    verify_definition_relations,
)
from .qchar import (
    QCharError,
    TruncatedQChar,
    qc_inflation,
    qc_kr_sl2,
    qc_neg_prefund_rank1,
    qc_neg_prefund_sl3_pair,
)
from .qfield import QFieldError
from .suite import CRITERIA, JOBS_ENV, run_suite

SCHEMA = 1
QCHAR_FAMILIES = ("kr", "neg-prefund", "sl3-pair", "psi-tilde", "psi-star")


class UsageError(Exception):
    pass


def _nodes(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"bad node list {text!r}") from None


def _emit(args, command: str, result: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps({"schema": SCHEMA, "command": command, "result": result}, indent=2, sort_keys=True))
    else:
        print(text)


def _qchar_json(c: TruncatedQChar) -> dict:
    return {
        "diagram": c.cd.name,
        "top": render_lweight(c.top),
        "depth": c.depth,
        "terms": [{"monomial": str(m), "mult": n} for m, n in c.items],
    }


def _qchar_text(c: TruncatedQChar) -> str:
    lines = [f"top {render_lweight(c.top)} on {c.cd.name}, depth {c.depth}, {len(c)} terms"]
    lines += [f"  {n} x {m}" for m, n in c.items]
    return "\n".join(lines)


# commands


def cmd_dynkin(args) -> int:
    cd = parse_dynkin(args.type)
    res = {
        "type": cd.name,
        "nodes": list(cd.nodes),
        "cartan": [list(r) for r in cd.matrix],
        "d": list(cd.d),
        "dual_coxeter": cd.dual_coxeter,
        "lacing": cd.lacing,
    }
    rows = "\n".join("  " + " ".join(f"{x:3d}" for x in r) for r in cd.matrix)
    _emit(args, "dynkin", res, f"{cd.name}  d={list(cd.d)}  h_dual={cd.dual_coxeter}  lacing={cd.lacing}\n{rows}")
    return 0


def cmd_lweight(args) -> int:
    cd = parse_dynkin(args.type) if args.type else None
    lw = parse_lweight(args.expr, cd)
    res = {"lweight": render_lweight(lw), "json": lweight_to_json(lw),
           "degree": {str(i): n for i, n in lw_degree(lw).items()}}
    lines = [f"l-weight  {render_lweight(lw)}", f"degree    {dict(lw_degree(lw).items())}"]
    if cd is not None:
        try:
            y = lw_to_Y(cd, lw)
            res["Y"] = repr(y)
            lines.append(f"Y-form    {y!r}")
        except LWeightError:
            res["Y"] = None
    _emit(args, "lweight", res, "\n".join(lines))
    return 0


def cmd_qchar(args) -> int:
    cd = parse_dynkin(args.type)
    k, D = args.spec, args.depth
    fam = args.family
    if fam == "kr":
        c = qc_kr_sl2(cd, args.node, k, args.length, D)
    elif fam == "neg-prefund":
        c = qc_neg_prefund_rank1(cd, args.node, k, D)
    elif fam == "sl3-pair":
        j1, j2 = _nodes(args.nodes)
        c = qc_neg_prefund_sl3_pair(cd, j1, j2, k, D)
    elif fam == "psi-tilde":
        c = qc_inflation(qc_neg_prefund_rank1(cd, args.node, k, D), build_named_weight(cd, "psi_tilde", args.node, k), cd)
    else:
        c = qc_inflation(qc_kr_sl2(cd, args.node, k, 1, D), build_named_weight(cd, "psi_star", args.node, k), cd)
    _emit(args, "qchar", _qchar_json(c), _qchar_text(c))
    return 0


def _realization(args):
    cd = parse_dynkin(args.type)
    name = args.name.replace("-", "_")
    params = {"spec": args.spec}
    if args.nodes:
        params["nodes"] = _nodes(args.nodes)
    if args.node is not None:
        params["node"] = args.node
    elif args.nodes and name != "sl3_pair_inflation":
        params["node"] = _nodes(args.nodes)[0]
    if args.length is not None:
        params["length"] = args.length
    if args.torus:
        params["torus"] = {i + 1: int(e) for i, e in enumerate(args.torus.split(","))}
    return realize(name, cd, **params)


def cmd_module(args) -> int:
    real = _realization(args)
    if args.action == "qchar":
        c = module_qchar(real, args.depth)
        _emit(args, "module qchar", _qchar_json(c), _qchar_text(c))
        return 0
    rels = None if args.relations == "all" else [r.strip() for r in args.relations.split(",")]
    rep = verify_definition_relations(real, Window(args.basis, args.modes, args.h), rels)
    lines = [f"{real.name} on {real.cd.name}: window N={args.basis} R={args.modes} M={args.h}"]
    for rel in RELATIONS:
        p, f, s = rep.passed.get(rel, 0), rep.failed.get(rel, 0), rep.skipped.get(rel, 0)
        if p or f or s:
            lines.append(f"  {rel:<12} passed {p:>7}  failed {f:>5}  skipped {s:>5}")
    lines.append("OK" if rep.ok else f"FAILED; first counterexample: {json.dumps(rep.counterexample)}")
    _emit(args, "module verify", rep.to_json(), "\n".join(lines))
    return 0 if rep.ok else 1


def cmd_identity(args) -> int:
    cd = parse_dynkin(args.type)
    rep = check_identity(args.name, cd, args.node, args.spec, args.depth, args.length)
    text = f"{rep.name} {rep.params}: {'PASS' if rep.passed else 'FAIL'} ({rep.lhs_terms} terms each side)"
    if rep.mismatch:
        text += f"\n  first mismatch: {rep.mismatch}"
    _emit(args, "identity", rep.to_json(), text)
    return 0 if rep.passed else 1


def cmd_rmatrix(args) -> int:
    rep = rmatrix_check(args.a, args.basis, args.modes)
    lines = [f"a = q^{args.a}: {rep.checked} checks, {rep.failed} failed"]
    if rep.indeterminate:
        lines.append(f"  0/0 entries of the raw formula (regularized): {rep.indeterminate}")
    lines.append(f"  gamma vanishes on {rep.vanishing()}")
    if rep.poles:
        lines.append(f"  poles: {rep.poles}")
    _emit(args, "rmatrix", rep.to_json(), "\n".join(lines))
    return 0 if rep.ok else 1


def cmd_suite(args) -> int:
    only = [int(x) for x in args.only.split(",")] if args.only else None
    if only and not set(only) <= set(CRITERIA):
        raise UsageError(f"criteria are numbered {min(CRITERIA)}..{max(CRITERIA)}")
    results = run_suite(only, args.jobs)
    ok = all(r.passed for r in results)
    text = "\n".join(f"{r.line()}  ({r.seconds:.1f}s)" for r in results)
    _emit(args, "suite", {"passed": ok, "criteria": [r.to_json() for r in results]}, text)
    return 0 if ok else 1


# parser


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")
    p = argparse.ArgumentParser(prog="shiftq", description="Exact checks for shifted quantum affine algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dynkin", parents=[fmt], help="Cartan data of a Dynkin type")
    s.add_argument("type")
    s.set_defaults(fn=cmd_dynkin)

    s = sub.add_parser("lweight", parents=[fmt], help="parse and normalize an l-weight")
    s.add_argument("expr")
    s.add_argument("--type")
    s.set_defaults(fn=cmd_lweight)

    s = sub.add_parser("qchar", parents=[fmt], help="closed-form truncated q-characters")
    s.add_argument("family", choices=QCHAR_FAMILIES)
    s.add_argument("--type", required=True)
    s.add_argument("--node", type=int, default=1)
    s.add_argument("--nodes", default="1,2")
    s.add_argument("--spec", type=int, default=0)
    s.add_argument("--depth", type=int, default=6)
    s.add_argument("--length", type=int, default=1)
    s.set_defaults(fn=cmd_qchar)

    s = sub.add_parser("module", parents=[fmt], help="module realizations")
    s.add_argument("action", choices=("verify", "qchar"))
    s.add_argument("name", help=", ".join(n.replace("_", "-") for n in REALIZATIONS))
    s.add_argument("--type", default="A1")
    s.add_argument("--node", type=int)
    s.add_argument("--nodes")
    s.add_argument("--spec", type=int, default=0)
    s.add_argument("--length", type=int)
    s.add_argument("--torus", help="comma-separated exponents per node for invertible modules")
    s.add_argument("--basis", type=int, default=6)
    s.add_argument("--modes", type=int, default=3)
    s.add_argument("--h", type=int, default=3)
    s.add_argument("--relations", default="all")
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(fn=cmd_module)

    s = sub.add_parser("identity", parents=[fmt], help="Grothendieck-ring identities")
    s.add_argument("name", choices=[n.replace("_", "-") for n in IDENTITIES] + list(IDENTITIES))
    s.add_argument("--type", required=True)
    s.add_argument("--node", type=int, default=1)
    s.add_argument("--spec", type=int, default=0)
    s.add_argument("--depth", type=int, default=6)
    s.add_argument("--length", type=int)
    s.set_defaults(fn=cmd_identity)

    s = sub.add_parser("rmatrix", parents=[fmt], help="the A2 intertwiner between prefundamental inflations")
    s.add_argument("--a", type=int, required=True, help="spectral exponent k of a = q^k")
    s.add_argument("--basis", type=int, default=4)
    s.add_argument("--modes", type=int, default=2)
    s.set_defaults(fn=cmd_rmatrix)

    s = sub.add_parser("suite", parents=[fmt], help="run the acceptance matrix")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.add_argument("--jobs", type=int, help=f"worker processes (default from {JOBS_ENV}, else 1)")
    s.set_defaults(fn=cmd_suite)
    return p


USAGE_ERRORS = (UsageError, CartanError, LWeightError, QCharError, IdentityError, RealizationError, QFieldError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
