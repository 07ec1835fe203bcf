"""Semilinear decomposition, the symmetry residual and determining systems.

A PDE F = sum_K A_K(x) u_K + f = 0 of order m is handled by eliminating one
principal derivative u_P on the solution manifold.  The residual of a
generator S is then S^(m)F with u_P replaced; splitting it by monomials in
the derivative jets gives the determining equations.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping

from .exprkernel import (
    Context,
    Expr,
    ExprError,
    NonPolynomialCarrier,
    atom_expr,
    collect,
    diff,
    invert,
    monomial_expr,
    rewrite_atoms,
    substitute,
)
from .exprkernel.expr import JET, UNKNOWN, JetAtom
from .exprkernel.printer import monomial_text
from .jet import MultiIndex, VectorField, apply_prolonged, merge_contexts, prolong

FORMULATIONS = ("restriction", "multiplier")


class NotSemilinear(ExprError):
    pass


class NonInvertiblePrincipal(ExprError):
    pass


def depends_on_u(a, ctx: Context) -> bool:
    """True if the atom is u, a derivative jet, or a function of u."""
    if a.tag == JET:
        return True
    if a.tag == UNKNOWN:
        return ctx.dep_var in ctx.fn_args(a.fn)
    return False


def _jettish(e: Expr) -> bool:
    return any(depends_on_u(a, e.ctx) for a in e.atoms())


@dataclass
class SemilinearPDE:
    ctx: Context
    order: int
    A: dict
    f: Expr
    principal: MultiIndex
    full: Expr
    name: str = ""

    def __post_init__(self):
        for K, a in self.A.items():
            if _jettish(a):
                raise NotSemilinear(f"coefficient of {self.jet_text(K)} depends on u")
        if not self.A.get(self.principal):
            raise NotSemilinear("no principal")
        if self.f.jet_order() >= self.order:
            raise NotSemilinear("lower-order part has full order")

    def jet_text(self, K) -> str:
        ctx = self.ctx
        return f"{ctx.dep_var}[{','.join(ctx.indep_vars[i] for i in K)}]"

    @property
    def principal_atom(self) -> JetAtom:
        return JetAtom(tuple(self.principal))

    def __str__(self):
        return f"{self.full} = 0"

    def summary(self) -> dict:
        return {
            "equation": str(self.full),
            "order": self.order,
            "A": {self.jet_text(K): str(a) for K, a in sorted(self.A.items())},
            "f": str(self.f),
            "principal": self.jet_text(self.principal),
        }


def _invertible(e: Expr) -> bool:
    return len(e.terms) == 1


def solve_principal(F: Expr, ctx: Context | None = None) -> SemilinearPDE:
    """Split F into its order-m linear part and the rest."""
    ctx = ctx or F.ctx
    F = F.retag(ctx) if ctx is not F.ctx else F
    m = F.jet_order()
    if m == 0:
        raise NotSemilinear("no principal: expression contains no derivatives")
    try:
        parts = collect(F, lambda a: a.tag == JET and a.order == m)
    except NonPolynomialCarrier:
        raise NotSemilinear("not semilinear: top-order derivative inside a power or exponential") from None
    A = {}
    f = ctx.zero()
    for mono, c in parts.items():
        if not mono:
            f = c
            continue
        if len(mono) != 1 or mono[0][1] != 1:
            raise NotSemilinear(f"not semilinear: nonlinear in top-order jets ({monomial_text(mono, ctx)})")
        if _jettish(c):
            raise NotSemilinear(f"not semilinear: coefficient of {monomial_text(mono, ctx)} depends on u")
        A[MultiIndex(mono[0][0].index)] = c
    if not A:
        raise NotSemilinear("no principal")
    constant = [K for K, a in A.items() if a.constant_value() is not None]
    mono = [K for K, a in A.items() if _invertible(a)]
    principal = max(constant or mono or A)
    return SemilinearPDE(ctx, m, A, f, principal, F)


def pde_from_text(text: str, ctx: Context) -> SemilinearPDE:
    return solve_principal(ctx.parse(text), ctx)


# --------------------------------------------------------------------------
# residual


def principal_value(P: SemilinearPDE, ctx: Context | None = None) -> Expr:
    """u_P expressed through the other terms of F = 0."""
    ctx = ctx or P.ctx
    a = P.A[P.principal].retag(ctx)
    if not _invertible(a):
        raise NonInvertiblePrincipal(f"non-invertible principal coefficient {a}")
    up = atom_expr(ctx, P.principal_atom)
    rest = P.full.retag(ctx) - a * up
    return -(rest * invert(a))


def multiplier_name(ctx: Context) -> str:
    return ctx.fresh_name("lambda")


def symmetry_residual(S: VectorField, P: SemilinearPDE, formulation: str = "restriction") -> Expr:
    """S^(m)F on the solution manifold.

    ``restriction`` substitutes the principal derivative; ``multiplier``
    instead returns S^(m)F - lambda(x,u) F with lambda a new unknown.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}")
    ctx = merge_contexts(S.ctx, P.ctx)
    S = S.retag(ctx) if S.ctx is not ctx else S
    raw = apply_prolonged(prolong(S, P.order), P.full.retag(ctx))
    if formulation == "restriction":
        return substitute(raw, P.principal_atom, principal_value(P, ctx))
    lam = multiplier_name(ctx)
    ctx2 = ctx.with_unknowns({lam: ctx.indep_vars + (ctx.dep_var,)})
    return raw.retag(ctx2) - ctx2.unknown(lam) * P.full.retag(ctx2)


# --------------------------------------------------------------------------
# generic generators


@dataclass
class GenericField:
    field: VectorField
    xi_names: tuple
    eta_names: tuple
    ctx: Context
    ansatz: str


def generic_field(P: SemilinearPDE, ansatz: str = "full") -> GenericField:
    """The generator with undetermined coefficient functions.

    ``full``: xi^i(x,u), eta(x,u).  ``xi-reduced``: xi^i(x), eta(x,u).
    ``reduced``: xi^i(x), eta = alpha(x) u + beta(x).
    """
    base = P.ctx
    xs = base.indep_vars
    xu = xs + (base.dep_var,)
    # base names carry no underscore, so the fresh names cannot collide
    names = {b: base.fresh_name(b) for b in [f"xi{i + 1}" for i in range(base.n)] + ["eta", "alpha", "beta"]}
    xi_names = tuple(names[f"xi{i + 1}"] for i in range(base.n))
    if ansatz == "full":
        decl = {n: xu for n in xi_names} | {names["eta"]: xu}
    elif ansatz == "xi-reduced":
        decl = {n: xs for n in xi_names} | {names["eta"]: xu}
    elif ansatz == "reduced":
        decl = {n: xs for n in xi_names} | {names["alpha"]: xs, names["beta"]: xs}
    else:
        raise ValueError(f"unknown ansatz {ansatz!r}")
    ctx = base.with_unknowns(decl)
    xi = [ctx.unknown(n) for n in xi_names]
    if ansatz == "reduced":
        eta = ctx.unknown(names["alpha"]) * ctx.var(base.dep_var) + ctx.unknown(names["beta"])
        eta_names = (names["alpha"], names["beta"])
    else:
        eta = ctx.unknown(names["eta"])
        eta_names = (names["eta"],)
    return GenericField(VectorField(xi, eta, ctx), xi_names, eta_names, ctx, ansatz)


# --------------------------------------------------------------------------
# determining systems


@dataclass
class DeterminingSystem:
    unknowns: tuple
    equations: list
    provenance: list
    ctx: Context
    ansatz: str = "full"
    formulation: str = "restriction"
    xi_names: tuple = ()
    eta_names: tuple = ()
    split_u: bool = False
    residual: Expr | None = dc_field(default=None, repr=False)
    collected: dict = dc_field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def lines(self) -> list[str]:
        out = []
        for i, (eq, src) in enumerate(zip(self.equations, self.provenance), 1):
            mono = ", ".join(monomial_text(m, self.ctx) for m in src)
            out.append(f"{i}. {mono} : {eq} = 0")
        return out

    def to_text(self) -> str:
        return "\n".join(self.lines())

    def to_dict(self) -> dict:
        return {
            "unknowns": list(self.unknowns),
            "ansatz": self.ansatz,
            "formulation": self.formulation,
            "equations": [
                {"monomials": [monomial_text(m, self.ctx) for m in src], "equation": str(eq)}
                for eq, src in zip(self.equations, self.provenance)
            ],
        }

    def reconstruct(self) -> Expr:
        """Sum of monomial * coefficient over every collected monomial."""
        out = self.ctx.zero()
        for mono, eq in self.collected.items():
            out = out + monomial_expr(self.ctx, mono) * eq
        return out

    def contains(self, e: Expr) -> bool:
        """Whether some equation equals ``e`` up to a nonzero constant factor."""
        target = e.retag(self.ctx).monic()
        return any(eq.monic() == target for eq in self.equations)


def jet_carrier(a) -> bool:
    return a.tag == JET and a.order >= 1


def split_residual(R: Expr, split_u: bool) -> dict:
    """Collect by derivative jets, and by u-dependence when ``split_u``."""
    if not split_u:
        return collect(R, jet_carrier)
    return collect(R, lambda a: a.tag == JET, transcendental=True)


def _should_split_u(R: Expr) -> bool:
    ctx = R.ctx
    return not any(a.tag == UNKNOWN and depends_on_u(a, ctx) for a in R.atoms())


def build_system(R: Expr, unknowns, split_u: bool | None = None, **meta) -> DeterminingSystem:
    if split_u is None:
        split_u = _should_split_u(R)
    parts = split_residual(R, split_u)
    seen: dict = {}
    order = []
    for mono in sorted(parts, key=lambda m: tuple((a.key, k) for a, k in m)):
        eq = parts[mono]
        key = eq.monic()
        if key in seen:
            seen[key][1].append(mono)
            continue
        seen[key] = (eq, [mono])
        order.append(key)
    eqs = [seen[k][0] for k in order]
    prov = [seen[k][1] for k in order]
    return DeterminingSystem(tuple(unknowns), eqs, prov, R.ctx, split_u=split_u, residual=R,
                             collected=parts, **meta)


def determining_system(P: SemilinearPDE, ansatz: str = "full", formulation: str = "restriction") -> DeterminingSystem:
    """Determining equations for a generic generator of the given ansatz."""
    if ansatz == "theorem-reduced":
        ansatz = "reduced"
    G = generic_field(P, ansatz)
    R = symmetry_residual(G.field, P, formulation)
    unknowns = G.xi_names + G.eta_names
    if formulation == "multiplier":
        unknowns = unknowns + (multiplier_name(G.ctx),)
    split = None if ansatz == "reduced" else False
    return build_system(
        R,
        unknowns,
        split_u=split,
        ansatz=ansatz,
        formulation=formulation,
        xi_names=G.xi_names,
        eta_names=G.eta_names,
    )


# --------------------------------------------------------------------------
# plugging concrete functions into equations


def instantiate(e: Expr, assignments: Mapping[str, Expr], ctx: Context | None = None) -> Expr:
    """Replace unknown functions (and their derivatives) by expressions."""
    ctx = ctx or e.ctx
    for v in assignments.values():
        ctx = merge_contexts(ctx, v.ctx)
    e = e.retag(ctx)
    vals = {k: v.retag(ctx) for k, v in assignments.items()}
    memo: dict = {}

    def image(a):
        if a.tag != UNKNOWN or a.fn not in vals:
            return None
        if a not in memo:
            args = e.ctx.fn_args(a.fn)
            val = vals[a.fn]
            for pos in a.derivs:
                val = diff(val, args[pos], ctx)
            memo[a] = val
        return memo[a]

    return rewrite_atoms(e, image)


def generator_assignments(system: DeterminingSystem, S: VectorField) -> dict:
    """Map the system's unknown names onto the components of S."""
    vals = dict(zip(system.xi_names, S.xi))
    if system.ansatz == "reduced":
        alpha = diff(S.eta, S.ctx.dep_var)
        if diff(alpha, S.ctx.dep_var):
            raise ExprError("generator is not affine in u")
        vals[system.eta_names[0]] = alpha
        vals[system.eta_names[1]] = substitute(S.eta, JetAtom(()), S.ctx.zero())
    else:
        vals[system.eta_names[0]] = S.eta
    return vals


def evaluate_system(system: DeterminingSystem, S: VectorField) -> list[Expr]:
    """Equations of ``system`` evaluated on the concrete generator S."""
    vals = generator_assignments(system, S)
    return [instantiate(eq, vals) for eq in system.equations]


__all__ = [
    "DeterminingSystem",
    "GenericField",
    "NonInvertiblePrincipal",
    "NotSemilinear",
    "SemilinearPDE",
    "build_system",
    "determining_system",
    "evaluate_system",
    "generic_field",
    "instantiate",
    "pde_from_text",
    "principal_value",
    "solve_principal",
    "symmetry_residual",
]
