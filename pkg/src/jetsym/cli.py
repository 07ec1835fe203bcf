"""Command-line front end.

Exit codes: 0 success / symmetry / corpus pass, 1 not-symmetry or corpus
mismatch, 2 usage or input error.  Reports go to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .corpus import load_pde, parse_declarations, run_corpus, strip_timings
from .detsys import determining_system
from .exprkernel import Context, ExprError
from .jet import VectorField, prolong
from .theorem import CertificationError, certify_eta_uu, certify_xi_u, predict_structure
from .verify import SideCondition, is_symmetry


class UsageError(Exception):
    pass


def _split(text: str | None) -> tuple:
    return tuple(s.strip() for s in (text or "").split(",") if s.strip())


def _context(args) -> Context:
    vs = _split(args.vars)
    if not vs:
        raise UsageError("--vars is required")
    return Context(vs, args.dep, _split(args.params), tuple(parse_declarations(args.unknowns or "").items()))


def _add_ctx_opts(p, need_vars=True):
    p.add_argument("--vars", required=need_vars, help="independent variables, e.g. x,y")
    p.add_argument("--dep", default="u")
    p.add_argument("--params", default="", help="symbolic constants, e.g. k,p")
    p.add_argument("--unknowns", default="", help="free functions, e.g. 'f(u), a(x,y)'")


def _emit(doc, fmt, text):
    if fmt == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(text)


# --------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    ctx = _context(args)
    print(ctx.parse(args.expr))
    return 0


def cmd_prolong(args) -> int:
    ctx = _context(args)
    S = VectorField.parse(args.field, ctx)
    P = prolong(S, args.order)
    rows = P.table()
    if args.format == "json":
        print(json.dumps({"field": str(S), "order": args.order, "coefficients": dict(rows)}, indent=2))
    else:
        for name, c in rows:
            print(f"eta{name[len(ctx.dep_var):]} = {c}")
    return 0


def cmd_determine(args) -> int:
    P, _ = load_pde(args.pde)
    D = determining_system(P, args.ansatz)
    _emit(D.to_dict(), args.format, D.to_text())
    return 0


def cmd_analyze(args) -> int:
    P, _ = load_pde(args.pde)
    pred = predict_structure(P)
    certs = []
    for fn in (certify_xi_u, certify_eta_uu):
        if fn is certify_eta_uu and not (pred.semilinear and pred.eta_affine_in_u):
            continue
        try:
            certs.append(fn(P, raise_on_failure=False))
        except CertificationError as exc:
            print(f"{fn.__name__}: {exc}", file=sys.stderr)
    ok = all(c.ok for c in certs) and bool(certs)
    doc = {"pde": str(P.full), "prediction": pred.to_dict(), "certificates": []}
    for c in certs:
        d = c.to_dict() if args.emit_certificate else c.summary()
        if args.emit_certificate:
            d["witness_equations"] = [str(w) for w in c.witness_equations]
        doc["certificates"].append(d)
    if args.emit_certificate:
        with open(args.emit_certificate, "w") as fh:
            json.dump(doc, fh, indent=2)
    lines = [f"pde: {P.full} = 0"]
    lines += [f"  {k}: {v}" for k, v in pred.to_dict().items()]
    for c in certs:
        s = c.summary()
        lines.append(
            f"certificate {s['claim']}: {'OK' if s['ok'] else 'FAILED'} "
            f"(rank {s['rank']}, {s['witnesses']} witnesses, {s['stages']} stage(s), {s['formulation']})"
        )
    _emit(doc, args.format, "\n".join(lines))
    return 0 if ok else 1


def cmd_verify(args) -> int:
    P, ctx = load_pde(args.pde)
    extra = parse_declarations(args.unknowns or "")
    if extra:
        ctx = ctx.with_unknowns(extra)
    S = VectorField.parse(args.generator, ctx)
    conds = [SideCondition.parse(c, ctx) for c in args.condition]
    rep = is_symmetry(S, P, conds, args.closure_order)
    if args.format == "json":
        print(json.dumps(rep.to_dict(), indent=2))
    else:
        print(rep.verdict)
        if not rep.is_symmetry:
            print(f"residual: {rep.residual}")
    return 0 if rep.is_symmetry else 1


def cmd_corpus(args) -> int:
    rep = run_corpus(args.filter, parallel=args.parallel)
    if args.format == "json":
        doc = rep.to_dict()
        print(json.dumps(strip_timings(doc) if args.no_timings else doc, indent=2))
    else:
        print(rep.to_text())
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jetsym", description="Lie point symmetries of semilinear PDEs")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="print the canonical form of an expression")
    p.add_argument("expr")
    _add_ctx_opts(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("prolong", help="print the prolongation coefficients of a generator")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--field", required=True, help="'xi1; ...; xin; eta'")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_ctx_opts(p)
    p.set_defaults(func=cmd_prolong)

    for name, func, hlp in (
        ("determine", cmd_determine, "print the determining system"),
        ("analyze", cmd_analyze, "predict and certify the structure of the symmetry algebra"),
        ("verify", cmd_verify, "check one generator"),
    ):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--pde", required=True, help="PDE document path or builtin:<id>[/<case>]")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(func=func)
        if name == "determine":
            p.add_argument("--ansatz", choices=("full", "xi-reduced", "reduced"), default="full")
        elif name == "analyze":
            p.add_argument("--emit-certificate", metavar="PATH")
        else:
            p.add_argument("--generator", required=True)
            p.add_argument("--condition", action="append", default=[], help="'lhs -> rhs'; repeatable")
            p.add_argument("--unknowns", default="", help="free functions of the generator, e.g. 'beta(x,y)'")
            p.add_argument("--closure-order", type=int)

    p = sub.add_parser("corpus", help="built-in regression corpus")
    csub = p.add_subparsers(dest="action", required=True)
    r = csub.add_parser("run")
    r.add_argument("--filter", help="id, id/case or case label")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--parallel", action="store_true")
    r.add_argument("--no-timings", action="store_true", help="drop wall-time fields from json")
    r.set_defaults(func=cmd_corpus)
    return ap


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ExprError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
