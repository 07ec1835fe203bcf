"""Multi-indices, total derivatives and prolongation of point vector fields.

A point field S = xi^i(x,u) d/dx^i + eta(x,u) d/du is lifted to jet order m
by the recursion

    eta_{K+i} = D_i eta_K - (D_i xi^l) u_{K+l},    eta_{()} = eta,

evaluated once per sorted multi-index K (recursing on its largest index).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .exprkernel import Context, Expr, ExprError, atom_expr, derive, diff, multi_indices
from .exprkernel.expr import INDEP, JET, UNKNOWN, JetAtom


class MultiIndex(tuple):
    """Sorted tuple of 0-based axis positions; () stands for u itself."""

    def __new__(cls, items: Iterable[int] = ()):
        return super().__new__(cls, sorted(items))

    @property
    def order(self) -> int:
        return len(self)

    def append(self, i: int) -> "MultiIndex":
        return MultiIndex(self + (i,))

    def text(self, ctx: Context) -> str:
        return "".join(ctx.indep_vars[i] for i in self)


def merge_contexts(a: Context, b: Context) -> Context:
    """Smallest context containing both, if they agree on coordinates."""
    if a.extends(b):
        return a
    if b.extends(a):
        return b
    if (a.indep_vars, a.dep_var, a.params) != (b.indep_vars, b.dep_var, b.params):
        raise ExprError("contexts disagree on variables or parameters")
    return a.with_unknowns(b.fn_table)


# --------------------------------------------------------------------------
# total derivative


def total_derivative(e: Expr, i: int, ctx: Context | None = None) -> Expr:
    """D_i e, treating jet atoms as coordinates of the infinite jet space."""
    ctx = ctx or e.ctx
    if not 0 <= i < ctx.n:
        raise ExprError(f"axis {i} out of range")
    e = e.retag(ctx) if e.ctx is not ctx and ctx.extends(e.ctx) else e
    xname = ctx.indep_vars[i]
    one = ctx.one()
    ui = atom_expr(ctx, JetAtom((i,)))

    def rule(a):
        if a.tag == INDEP:
            return one if a.index == i else None
        if a.tag == JET:
            return atom_expr(ctx, JetAtom(tuple(sorted(a.index + (i,)))))
        if a.tag == UNKNOWN:
            args = ctx.fn_args(a.fn)
            out = None
            if xname in args:
                out = atom_expr(ctx, a.extend(args.index(xname)))
            if ctx.dep_var in args:
                t = atom_expr(ctx, a.extend(args.index(ctx.dep_var))) * ui
                out = t if out is None else out + t
            return out
        return None

    return derive(e, rule)


# --------------------------------------------------------------------------
# vector fields


class VectorField:
    """S = xi^i d/dx^i + eta d/du with components free of derivative jets."""

    def __init__(self, xi: Sequence[Expr], eta: Expr, ctx: Context | None = None):
        ctx = ctx or eta.ctx
        for c in list(xi) + [eta]:
            ctx = merge_contexts(ctx, c.ctx)
        xi = tuple(c.retag(ctx) for c in xi)
        if len(xi) != ctx.n:
            raise ExprError(f"expected {ctx.n} xi components, got {len(xi)}")
        self.ctx = ctx
        self.xi = xi
        self.eta = eta.retag(ctx)
        for c in self.components:
            if c.jet_order() > 0:
                raise ExprError(f"generator component depends on derivatives: {c}")

    @classmethod
    def parse(cls, text: str, ctx: Context) -> "VectorField":
        """Parse ``xi1; ...; xin; eta``."""
        parts = text.split(";")
        if len(parts) != ctx.n + 1:
            raise ExprError(f"expected {ctx.n + 1} components separated by ';', got {len(parts)}")
        comps = [ctx.parse(p) for p in parts]
        return cls(comps[:-1], comps[-1], ctx)

    @classmethod
    def from_components(cls, comps: Sequence[Expr], ctx: Context) -> "VectorField":
        return cls(comps[:-1], comps[-1], ctx)

    @property
    def components(self) -> tuple[Expr, ...]:
        return self.xi + (self.eta,)

    def retag(self, ctx: Context) -> "VectorField":
        return VectorField([c.retag(ctx) for c in self.xi], self.eta.retag(ctx), ctx)

    def __str__(self):
        return "; ".join(str(c) for c in self.components)

    def __repr__(self):
        return f"VectorField({self})"

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def _zip(self, other, op):
        ctx = merge_contexts(self.ctx, other.ctx)
        cs = [op(a.retag(ctx), b.retag(ctx)) for a, b in zip(self.components, other.components)]
        return VectorField(cs[:-1], cs[-1], ctx)

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "VectorField":
        cs = [comp * c for comp in self.components]
        return VectorField(cs[:-1], cs[-1], self.ctx)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def act(self, g: Expr) -> Expr:
        """S applied to a function of (x, u) as a first-order operator."""
        ctx = merge_contexts(self.ctx, g.ctx)
        g = g.retag(ctx)
        out = self.eta.retag(ctx) * diff(g, ctx.dep_var, ctx)
        for i, xi in enumerate(self.xi):
            if xi:
                out = out + xi.retag(ctx) * diff(g, ctx.indep_vars[i], ctx)
        return out


# --------------------------------------------------------------------------
# prolongation


class ProlongedField:
    """The lift S^(m); coefficients are computed on demand and cached."""

    def __init__(self, base: VectorField, order: int):
        if order < 1:
            raise ExprError("prolongation order must be at least 1")
        self.base = base
        self.order = order
        self.ctx = base.ctx
        self._cache: dict[MultiIndex, Expr] = {MultiIndex(): base.eta}
        self._dxi: dict[int, list[Expr]] = {}

    def _d_xi(self, i: int) -> list[Expr]:
        if i not in self._dxi:
            self._dxi[i] = [total_derivative(xi, i, self.ctx) for xi in self.base.xi]
        return self._dxi[i]

    def _step(self, prev: Expr, parent: tuple[int, ...], i: int) -> Expr:
        ctx = self.ctx
        out = total_derivative(prev, i, ctx)
        for l, dxi in enumerate(self._d_xi(i)):
            if dxi:
                out = out - dxi * atom_expr(ctx, JetAtom(tuple(sorted(parent + (l,)))))
        return out

    def coeff(self, K) -> Expr:
        """eta^(|K|)_K for a multi-index of order 1..m (any index order)."""
        K = MultiIndex(K)
        if K.order > self.order:
            raise ExprError(f"multi-index {tuple(K)} exceeds prolongation order {self.order}")
        hit = self._cache.get(K)
        if hit is not None:
            return hit
        parent = MultiIndex(K[:-1])
        val = self._step(self.coeff(parent), parent, K[-1])
        self._cache[K] = val
        return val

    def along(self, path: Sequence[int]) -> Expr:
        """Recompute eta_K differentiating in the given index order (uncached)."""
        val = self.base.eta
        parent: tuple[int, ...] = ()
        for i in path:
            val = self._step(val, parent, i)
            parent = parent + (i,)
        return val

    @property
    def coeffs(self) -> dict[MultiIndex, Expr]:
        out = {}
        for k in range(1, self.order + 1):
            for K in multi_indices(self.ctx.n, k):
                out[MultiIndex(K)] = self.coeff(K)
        return out

    def table(self) -> list[tuple[str, str]]:
        """(jet name, coefficient text) rows in canonical order."""
        ctx = self.ctx
        rows = []
        for K, c in self.coeffs.items():
            rows.append((jet_name(K, ctx), str(c)))
        return rows


def prolong(S: VectorField, m: int) -> ProlongedField:
    return ProlongedField(S, m)


def apply_prolonged(P: ProlongedField, F: Expr) -> Expr:
    """S^(m) F with jet atoms of F treated as independent coordinates."""
    ctx = merge_contexts(P.ctx, F.ctx)
    F = F.retag(ctx)
    if F.jet_order() > P.order:
        raise ExprError(f"order mismatch: expression has order {F.jet_order()}, field prolonged to {P.order}")
    S = P.base
    out = ctx.zero()
    for i, xi in enumerate(S.xi):
        if xi:
            d = diff(F, ctx.indep_vars[i], ctx)
            if d:
                out = out + xi.retag(ctx) * d
    # u is always visited so the chain rule through f(u)-type atoms applies
    for a in sorted(F.jet_atoms() | {JetAtom(())}):
        d = diff(F, a, ctx)
        if not d:
            continue
        c = S.eta if a.index == () else P.coeff(a.index)
        out = out + c.retag(ctx) * d
    return out


def jet_name(K, ctx: Context) -> str:
    return ctx.dep_var if not K else f"{ctx.dep_var}[{','.join(ctx.indep_vars[i] for i in K)}]"


__all__ = [
    "MultiIndex",
    "ProlongedField",
    "VectorField",
    "apply_prolonged",
    "jet_name",
    "merge_contexts",
    "prolong",
    "total_derivative",
]
