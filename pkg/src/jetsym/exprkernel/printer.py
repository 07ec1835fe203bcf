"""Canonical, re-parseable text for expressions."""

from __future__ import annotations

from .coef import ONE, as_integer
from .expr import EXP, INDEP, JET, POWER, UNKNOWN, Atom, Expr, PowerAtom


def atom_text(a: Atom, ctx) -> str:
    if a.tag == INDEP:
        return a.name
    if a.tag == JET:
        if not a.index:
            return ctx.dep_var
        return f"{ctx.dep_var}[{','.join(ctx.indep_vars[i] for i in a.index)}]"
    if a.tag == UNKNOWN:
        args = ctx.fn_args(a.fn)
        if not a.derivs:
            return f"{a.fn}({','.join(args)})"
        return f"{a.fn}[{','.join(args[i] for i in a.derivs)}]"
    if a.tag == POWER:
        return _power_text(a, ctx)
    if a.tag == EXP:
        return f"exp({to_text(a.arg)})"
    raise TypeError(a)


def _exponent_text(q, ctx) -> str:
    n = as_integer(q)
    if n is not None:
        return str(n)
    text = ctx.field.to_text(q)
    if text in ctx.params:
        return text
    return text if text.startswith("(") and _balanced_outer(text) else f"({text})"


def _balanced_outer(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and i < len(text) - 1:
            return False
    return True


def _power_text(a: PowerAtom, ctx) -> str:
    if isinstance(a.base, Atom):
        base = atom_text(a.base, ctx)
        if a.base.tag >= POWER:
            base = f"({base})"
    else:
        base = f"({to_text(a.base)})"
    return f"{base}^{_exponent_text(a.exp, ctx)}"


def monomial_text(m, ctx) -> str:
    if not m:
        return "1"
    parts = []
    for a, k in m:
        t = atom_text(a, ctx)
        parts.append(t if k == 1 else f"{t}^{k}")
    return "*".join(parts)


def to_text(e: Expr) -> str:
    ctx = e.ctx
    field = ctx.field
    if not e.terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(e.sorted_terms()):
        neg = field.sign_hint(c) < 0
        mag = -c if neg else c
        ctext = field.to_text(mag)
        if not m:
            body = ctext
        elif mag == ONE:
            body = monomial_text(m, ctx)
        else:
            body = f"{ctext}*{monomial_text(m, ctx)}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
