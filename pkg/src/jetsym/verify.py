"""Checking candidate generators, possibly families constrained by side conditions.

Side conditions are linear relations among derivatives of free functions
(Cauchy-Riemann, Laplace, ...).  Before testing a residual they are closed
under differentiation up to the order that occurs and brought to reduced
echelon form, so one substitution pass gives the normal form.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field as dc_field
from itertools import combinations_with_replacement

from .detsys import SemilinearPDE, symmetry_residual
from .exprkernel import Context, Expr, ExprError, diff, invert, substitute_many
from .exprkernel.expr import UNKNOWN, UnknownDeriv, atom_expr
from .exprkernel.printer import atom_text
from .jet import VectorField, merge_contexts

MAX_ROWS = 20000


class ConstraintError(ExprError):
    pass


@dataclass
class SideCondition:
    lhs: UnknownDeriv
    rhs: Expr

    def __post_init__(self):
        if self.lhs.tag != UNKNOWN:
            raise ConstraintError("side condition lhs must be a derivative of an unknown function")
        if self.lhs in self.rhs.atoms():
            raise ConstraintError(f"lhs {atom_text(self.lhs, self.rhs.ctx)} occurs in its rhs")

    @classmethod
    def parse(cls, text: str, ctx: Context) -> "SideCondition":
        if "->" not in text:
            raise ConstraintError(f"side condition needs 'lhs -> rhs': {text!r}")
        left, right = text.split("->", 1)
        lhs = ctx.parse(left)
        if len(lhs.terms) != 1:
            raise ConstraintError(f"lhs must be a single derivative: {left.strip()!r}")
        (mono, c), = lhs.terms.items()
        if len(mono) != 1 or mono[0][1] != 1 or mono[0][0].tag != UNKNOWN or c != 1:
            raise ConstraintError(f"lhs must be a single derivative: {left.strip()!r}")
        return cls(mono[0][0], ctx.parse(right))

    def text(self) -> str:
        return f"{atom_text(self.lhs, self.rhs.ctx)} -> {self.rhs}"

    def as_expr(self) -> Expr:
        return atom_expr(self.rhs.ctx, self.lhs) - self.rhs

    def __str__(self):
        return self.text()


# --------------------------------------------------------------------------
# closure


def _rank_key(a: UnknownDeriv, ctx: Context, fn_rank: dict):
    """Bigger means eliminated first."""
    args = ctx.fn_args(a.fn)
    counts = tuple(a.count(i) for i in range(len(args)))
    return (a.order, -fn_rank.get(a.fn, len(fn_rank)), counts)


@dataclass
class RewriteSet:
    rules: dict
    max_order: int
    ctx: Context
    functions: tuple = ()
    rows_used: int = 0

    def __len__(self):
        return len(self.rules)

    def __bool__(self):
        return bool(self.rules)

    def apply(self, e: Expr) -> Expr:
        """One simultaneous pass; enough because the rules are inter-reduced."""
        if not self.rules:
            return e
        return substitute_many(e.retag(merge_contexts(e.ctx, self.ctx)), self.rules)

    def apply_sequential(self, e: Expr, order: Iterable | None = None) -> Expr:
        """Rewrite one rule at a time in the given order until nothing changes."""
        seq = list(order) if order is not None else list(self.rules)
        e = e.retag(merge_contexts(e.ctx, self.ctx))
        while True:
            before = e
            for a in seq:
                if a in e.atoms():
                    e = substitute_many(e, {a: self.rules[a]})
            if e == before:
                return e

    def constrained(self, a) -> bool:
        return a.tag == UNKNOWN and a.fn in self.functions

    def lines(self) -> list[str]:
        return [f"{atom_text(a, self.ctx)} -> {r}" for a, r in self.rules.items()]


def _linear_parts(e: Expr, functions) -> dict:
    """{constrained atom or None: coefficient} for an expression linear in them."""
    out: dict = {}
    ctx = e.ctx
    for m, c in e.terms.items():
        hits = [(a, k) for a, k in m if a.tag == UNKNOWN and a.fn in functions]
        nested = [
            b for a, _ in m if a.tag >= 3 for b in a.inner_atoms() if b.tag == UNKNOWN and b.fn in functions
        ]
        if nested or len(hits) > 1 or (hits and hits[0][1] != 1):
            raise ConstraintError("side conditions must be linear in the constrained functions")
        key = hits[0][0] if hits else None
        rest = tuple(p for p in m if not hits or p[0] != key)
        term = Expr(ctx, {rest: c})
        out[key] = out[key] + term if key in out else term
    return {k: v for k, v in out.items() if v}


def condition_functions(conds) -> list[str]:
    """lhs functions in order of appearance, then those only met on a rhs."""
    out: list[str] = []
    for c in conds:
        if c.lhs.fn not in out:
            out.append(c.lhs.fn)
    for c in conds:
        for a in sorted(c.rhs.unknown_atoms()):
            if a.fn not in out:
                out.append(a.fn)
    return out


def close_constraints(conds, max_order: int, ctx: Context | None = None) -> RewriteSet:
    """Differentiate the conditions up to ``max_order`` and reduce them.

    Rows are the partial derivatives of lhs - rhs in every argument of the
    constrained functions; Gauss-Jordan elimination ranks atoms by order,
    then by the function's first appearance as a lhs, then by the vector of
    derivative counts.
    """
    conds = list(conds)
    if not conds:
        return RewriteSet({}, max_order, ctx or Context(()))
    ctx = ctx or conds[0].rhs.ctx
    for c in conds:
        ctx = merge_contexts(ctx, c.rhs.ctx)
    fn_rank = {fn: i for i, fn in enumerate(condition_functions(conds))}
    functions = tuple(fn_rank)
    coords = []
    for fn in functions:
        for a in ctx.fn_args(fn):
            if a not in coords:
                coords.append(a)
    order_of = lambda e: max((a.order for a in e.atoms() if a.tag == UNKNOWN and a.fn in functions), default=-1)
    rows = []
    for c in conds:
        base = c.as_expr().retag(ctx)
        top = order_of(base)
        for k in range(0, max_order - top + 1):
            for alpha in combinations_with_replacement(coords, k):
                e = base
                for v in alpha:
                    e = diff(e, v, ctx)
                if e:
                    rows.append(e)
                if len(rows) > MAX_ROWS:
                    raise ConstraintError(f"closure exceeds {MAX_ROWS} rows; lower the order")
    parts = [_linear_parts(r, functions) for r in rows]
    rules: dict = {}
    while True:
        live = [p for p in parts if p]
        if not live:
            break
        for p in live:
            if list(p) == [None]:
                raise ConstraintError(f"conflicting conditions: {p[None]} = 0")
        def lead(p):
            return max((a for a in p if a is not None), key=lambda a: _rank_key(a, ctx, fn_rank))
        piv = max((lead(p) for p in live), key=lambda a: _rank_key(a, ctx, fn_rank))
        tied = [p for p in live if lead(p) == piv]
        best = next((p for p in tied if len(p[piv].terms) == 1), tied[0])
        coef = best[piv]
        if len(coef.terms) != 1:
            raise ConstraintError(
                f"non-invertible pivot coefficient {coef} for {atom_text(piv, ctx)}"
            )
        inv = invert(coef)
        norm_row = {a: v * inv for a, v in best.items()}
        rhs = ctx.zero()
        for a, v in norm_row.items():
            if a == piv:
                continue
            rhs = rhs - (v if a is None else v * atom_expr(ctx, a))
        new_parts = []
        for p in parts:
            if p is best or not p:
                continue
            e = p.get(piv)
            if e is None:
                new_parts.append(p)
                continue
            q = dict(p)
            del q[piv]
            for a, v in norm_row.items():
                if a == piv:
                    continue
                q[a] = q[a] - e * v if a in q else -(e * v)
            new_parts.append({a: v for a, v in q.items() if v})
        parts = new_parts
        # keep the earlier rules reduced with respect to the new pivot
        for a in list(rules):
            if piv in rules[a].atoms():
                rules[a] = substitute_many(rules[a], {piv: rhs})
        rules[piv] = rhs
    ordered = dict(sorted(rules.items(), key=lambda kv: _rank_key(kv[0], ctx, fn_rank), reverse=True))
    return RewriteSet(ordered, max_order, ctx, functions, len(rows))


# --------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    verdict: str
    residual: Expr
    conditions_used: list = dc_field(default_factory=list)
    pde: SemilinearPDE | None = None
    generator: VectorField | None = None
    raw_residual: Expr | None = None
    closure: RewriteSet | None = None

    @property
    def is_symmetry(self) -> bool:
        return self.verdict == "symmetry"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "residual": str(self.residual),
            "conditions": [c.text() for c in self.conditions_used],
            "generator": str(self.generator) if self.generator is not None else None,
        }


def is_symmetry(S: VectorField, P: SemilinearPDE, conds=(), closure_order: int | None = None) -> VerificationReport:
    """Decide whether S^(m)F vanishes on F = 0, modulo the side conditions."""
    conds = list(conds)
    ctx = merge_contexts(S.ctx, P.ctx)
    for c in conds:
        ctx = merge_contexts(ctx, c.rhs.ctx)
    S = S.retag(ctx)
    raw = symmetry_residual(S, P)
    residual = raw
    closure = None
    if conds:
        functions = set(condition_functions(conds))
        cons = [a for a in raw.atoms() if a.tag == UNKNOWN and a.fn in functions]
        need = max((a.order for a in cons), default=0)
        order = need if closure_order is None else closure_order
        closure = close_constraints(conds, order, ctx)
        residual = closure.apply(raw)
        unreduced = [
            a for a in residual.atoms()
            if a.tag == UNKNOWN and a.fn in functions and a.order > order
            and any(_extends(a, c.lhs) for c in conds)
        ]
        if unreduced:
            raise ConstraintError(
                f"insufficient closure order {order}: {atom_text(unreduced[0], ctx)} not reduced"
            )
    verdict = "symmetry" if residual.is_zero() else "not-symmetry"
    return VerificationReport(verdict, residual, conds, P, S, raw, closure)


def _extends(a, lhs) -> bool:
    if a.fn != lhs.fn:
        return False
    rest = list(a.derivs)
    for d in lhs.derivs:
        if d not in rest:
            return False
        rest.remove(d)
    return True


def lie_bracket(S1: VectorField, S2: VectorField) -> VectorField:
    """[S1, S2] acting on functions of (x, u)."""
    ctx = merge_contexts(S1.ctx, S2.ctx)
    S1, S2 = S1.retag(ctx), S2.retag(ctx)
    comps = [S1.act(b) - S2.act(a) for a, b in zip(S1.components, S2.components)]
    return VectorField(comps[:-1], comps[-1], ctx)


__all__ = [
    "ConstraintError",
    "RewriteSet",
    "SideCondition",
    "VerificationReport",
    "close_constraints",
    "is_symmetry",
    "lie_bracket",
]
