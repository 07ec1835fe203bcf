"""Structure of point symmetries of semilinear equations.

For A^K(x) u_K + f = 0 of order m the generator has xi = xi(x); if m > 1
and f is linear in the order m-1 derivatives with x-dependent coefficients,
then also eta_uu = 0.  Both claims are certified from a generated
determining system by exact fraction-free elimination over Q(x)(params).

Elimination proceeds in stages.  Stage 0 uses only the equations read off
the monomials named by the coefficient argument (u_j u_K, |K| = m for
xi_u; |K| = m - 1 for eta_uu).  Atoms forced to vanish are then imposed,
together with all their derivatives, on the whole system, and every
equation that has become homogeneous linear in the remaining family joins
the next stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .detsys import (
    DeterminingSystem,
    NotSemilinear,
    SemilinearPDE,
    _jettish,
    build_system,
    determining_system,
    generic_field,
    solve_principal,
    symmetry_residual,
)
from .exprkernel import Context, Expr, ExprError, NonPolynomialCarrier, atom_expr, collect, rewrite_atoms
from .exprkernel.expr import JET, UNKNOWN, UnknownDeriv
from .exprkernel.printer import atom_text, monomial_text


class CertificationError(ExprError):
    pass


@dataclass
class StructurePrediction:
    semilinear: bool
    xi_independent_of_u: bool
    f_subprincipal_linear: bool
    eta_affine_in_u: bool
    order: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def subprincipal_linear(P: SemilinearPDE) -> bool:
    """f = a^K(x) u_K (|K| = m-1) + h with h of jet order <= m-2."""
    m = P.order
    try:
        parts = collect(P.f, lambda a: a.tag == JET and a.order == m - 1)
    except NonPolynomialCarrier:
        return False
    for mono, c in parts.items():
        if not mono:
            if c.jet_order() > m - 2 or (m == 1 and _jettish(c)):
                return False
            continue
        if len(mono) != 1 or mono[0][1] != 1 or _jettish(c):
            return False
    return True


def predict_structure(F, ctx: Context | None = None) -> StructurePrediction:
    if isinstance(F, SemilinearPDE):
        P = F
    else:
        try:
            P = solve_principal(F, ctx)
        except NotSemilinear:
            return StructurePrediction(False, False, False, False, F.jet_order())
    lin = subprincipal_linear(P)
    return StructurePrediction(True, True, lin, P.order > 1 and lin, P.order)


# --------------------------------------------------------------------------
# fraction-free Gauss-Jordan elimination


def gauss_jordan(rows: list[list[Expr]], forced_pivots=None):
    """Fraction-free Gauss-Jordan on a matrix of Exprs.

    Returns (reduced rows, row ids in final order, pivot list [(row id,
    column)]).  With ``forced_pivots`` the given pivot sequence is followed
    and must be valid, which is how certificates are replayed.
    """
    rows = [list(r) for r in rows]
    ids = list(range(len(rows)))
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    plan = list(forced_pivots) if forced_pivots is not None else None
    cols = range(ncols) if plan is None else [c for _, c in plan]
    for step, c in enumerate(cols):
        if plan is None:
            p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if p is None:
                continue
        else:
            want = plan[step][0]
            p = ids.index(want)
            if p < r or not rows[p][c]:
                raise CertificationError(f"replay: pivot ({want}, {c}) is not available")
        rows[r], rows[p] = rows[p], rows[r]
        ids[r], ids[p] = ids[p], ids[r]
        piv = rows[r][c]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                e = rows[i][c]
                rows[i] = [piv * a - e * b for a, b in zip(rows[i], rows[r])]
        pivots.append((ids[r], c))
        r += 1
    return rows, ids, pivots


def forced_columns(rows, pivots) -> list[int]:
    """Pivot columns whose reduced row has no entry in a free column."""
    pcols = {c for _, c in pivots}
    free = [c for c in range(len(rows[0]) if rows else 0) if c not in pcols]
    out = []
    for k, (_, c) in enumerate(pivots):
        if all(not rows[k][f] for f in free):
            out.append(c)
    return out


# --------------------------------------------------------------------------
# certificates


@dataclass
class Stage:
    imposed: list
    columns: list
    witnesses: list
    sources: list
    pivots: list
    forced: list

    def to_dict(self, ctx: Context) -> dict:
        return {
            "imposed": [atom_text(a, ctx) for a in self.imposed],
            "columns": [atom_text(a, ctx) for a in self.columns],
            "witnesses": [str(w) for w in self.witnesses],
            "sources": self.sources,
            "pivots": [[r, atom_text(self.columns[c], ctx)] for r, c in self.pivots],
            "forced": [atom_text(a, ctx) for a in self.forced],
        }


@dataclass
class Certificate:
    claim: str
    targets: list
    stages: list
    ctx: Context
    ok: bool = True
    formulation: str = "restriction"
    free: list = dc_field(default_factory=list)
    system_fns: frozenset = frozenset()

    @property
    def witness_equations(self) -> list[Expr]:
        return [w for s in self.stages for w in s.witnesses]

    @property
    def elimination_trace(self) -> list[tuple]:
        """(stage, witness row, pivot atom text) in elimination order."""
        return [
            (k, r, atom_text(s.columns[c], self.ctx)) for k, s in enumerate(self.stages) for r, c in s.pivots
        ]

    @property
    def forced(self) -> list:
        return [a for s in self.stages for a in s.forced]

    def summary(self) -> dict:
        return {
            "claim": self.claim,
            "ok": self.ok,
            "formulation": self.formulation,
            "stages": len(self.stages),
            "witnesses": len(self.witness_equations),
            "rank": sum(len(s.pivots) for s in self.stages),
            "forced": [atom_text(a, self.ctx) for a in self.forced],
        }

    def to_dict(self) -> dict:
        out = self.summary()
        out["targets"] = [atom_text(a, self.ctx) for a in self.targets]
        out["trace"] = [list(t) for t in self.elimination_trace]
        out["stage_detail"] = [s.to_dict(self.ctx) for s in self.stages]
        return out

    def replay(self) -> bool:
        """Re-run every stage along its recorded pivots; check the claim."""
        forced = []
        for s in self.stages:
            zero = set(forced)
            for w in s.witnesses:
                for a in w.unknown_atoms():
                    if any(_is_derivative_of(a, z) for z in zero):
                        raise CertificationError("replay: witness mentions an imposed atom")
            rows = _matrix(s.witnesses, s.columns, self.system_fns)
            reduced, _, pivots = gauss_jordan(rows, s.pivots)
            got = [s.columns[c] for c in forced_columns(reduced, pivots)]
            if got != s.forced:
                raise CertificationError("replay: forced atoms differ from the recorded ones")
            forced += got
        if not set(self.targets) <= set(forced):
            raise CertificationError("replay: claim not reached")
        return True


def _is_derivative_of(a, z) -> bool:
    """a = d^beta z for some (possibly empty) multi-index beta."""
    if a.tag != UNKNOWN or a.fn != z.fn:
        return False
    rest = list(a.derivs)
    for d in z.derivs:
        if d not in rest:
            return False
        rest.remove(d)
    return True


def impose_zero(e: Expr, zeros) -> Expr:
    zeros = list(zeros)
    if not zeros:
        return e
    zero = e.ctx.zero()
    return rewrite_atoms(e, lambda a: zero if any(_is_derivative_of(a, z) for z in zeros) else None)


def _data_atom(b, ctx: Context, system_fns) -> bool:
    """Unknown functions of x alone that are not solved for act as field elements."""
    return b.fn not in system_fns and ctx.dep_var not in ctx.fn_args(b.fn)


def _linear_row(eq: Expr, family: set, system_fns=frozenset()):
    """{atom: coefficient} if eq is homogeneous linear in ``family``."""
    row: dict = {}
    ctx = eq.ctx

    def bad(b):
        return b.tag == UNKNOWN and not _data_atom(b, ctx, system_fns)

    for m, c in eq.terms.items():
        hits = [(a, k) for a, k in m if a in family]
        if len(hits) != 1 or hits[0][1] != 1:
            return None
        a = hits[0][0]
        rest = tuple((b, k) for b, k in m if b != a)
        if any(bad(b) or any(bad(x) for x in b.inner_atoms()) for b, _ in rest):
            return None
        term = Expr(ctx, {rest: c})
        row[a] = row[a] + term if a in row else term
    return {a: v for a, v in row.items() if v}


def _matrix(witnesses, columns, system_fns=frozenset()):
    out = []
    fam = set(columns)
    for w in witnesses:
        row = _linear_row(w, fam, system_fns)
        if row is None:
            raise CertificationError(f"witness is not linear in the family: {w}")
        out.append([row.get(a, w.ctx.zero()) for a in columns])
    return out


def _shape(mono, k: int) -> bool:
    """mono = u_j * u_K with |j| = 1 and |K| = k (jets of order >= 1)."""
    exps = sum(e for _, e in mono)
    if exps != 2:
        return False
    orders = sorted(a.order for a, e in mono for _ in range(e))
    return orders == sorted([1, k])


def staged_certify(system: DeterminingSystem, family, targets, k: int, claim: str, max_stages: int = 10) -> Certificate:
    ctx = system.ctx
    fns = frozenset(system.unknowns)
    family = sorted(family)
    targets = sorted(targets)
    forced: list = []
    stages = []
    for stage in range(max_stages):
        remaining = [a for a in family if a not in forced]
        famset = set(remaining)
        cand = []
        for eq, src in zip(system.equations, system.provenance):
            if stage == 0:
                if not any(_shape(mono, k) for mono in src):
                    continue
                e = eq
            else:
                e = impose_zero(eq, forced)
            if not e:
                continue
            row = _linear_row(e, famset, fns)
            if row:
                cand.append((e, " ; ".join(monomial_text(s, ctx) for s in src)))
        # monic dedupe keeps the matrix small
        seen, witnesses, sources = set(), [], []
        for e, s in cand:
            key = e.monic()
            if key not in seen:
                seen.add(key)
                witnesses.append(e)
                sources.append(s)
        columns = [a for a in remaining if any(a in w.unknown_atoms() for w in witnesses)]
        if not witnesses or not columns:
            break
        rows = _matrix(witnesses, columns, fns)
        reduced, _, pivots = gauss_jordan(rows)
        new = [columns[c] for c in forced_columns(reduced, pivots)]
        stages.append(Stage(list(forced), columns, witnesses, sources, pivots, new))
        if not new:
            break
        forced += new
        if set(targets) <= set(forced):
            break
    cert = Certificate(claim, targets, stages, ctx, formulation=system.formulation, system_fns=fns)
    missing = [a for a in targets if a not in forced]
    if missing:
        cert.ok = False
        cert.free = missing
    return cert


def _u_pos(ctx: Context, fn: str) -> int:
    return ctx.fn_args(fn).index(ctx.dep_var)


def certify_xi_u(P: SemilinearPDE, raise_on_failure: bool = True) -> Certificate:
    """Certify xi^i_u = 0 for all i from the full determining system."""
    formulation = "multiplier" if P.order == 1 else "restriction"
    D = determining_system(P, "full", formulation)
    ctx = D.ctx
    family = [UnknownDeriv(n, (_u_pos(ctx, n),)) for n in D.xi_names]
    cert = staged_certify(D, family, family, P.order, "xi_u_zero")
    if not cert.ok and raise_on_failure:
        free = ", ".join(atom_text(a, ctx) for a in cert.free)
        raise CertificationError(f"certification failed: unresolved {free}")
    return cert


def certify_eta_uu(P: SemilinearPDE, raise_on_failure: bool = True) -> Certificate:
    """Certify eta_uu = 0 once xi = xi(x) is imposed."""
    if P.order < 2 or not subprincipal_linear(P):
        raise CertificationError("precondition violated: needs order > 1 and f linear in order m-1 derivatives")
    G = generic_field(P, "xi-reduced")
    R = symmetry_residual(G.field, P)
    D = build_system(R, G.xi_names + G.eta_names, split_u=False, ansatz="xi-reduced",
                     xi_names=G.xi_names, eta_names=G.eta_names)
    ctx = D.ctx
    eta = G.eta_names[0]
    upos = _u_pos(ctx, eta)
    family = {a for eq in D.equations for a in eq.unknown_atoms() if a.fn == eta and a.count(upos) >= 2}
    target = UnknownDeriv(eta, (upos, upos))
    family.add(target)
    cert = staged_certify(D, family, [target], P.order - 1, "eta_uu_zero")
    if not cert.ok and raise_on_failure:
        raise CertificationError(f"certification failed: unresolved {atom_text(target, ctx)}")
    return cert


# --------------------------------------------------------------------------
# reduction by the theorem's ansatz


def ansatz_reduce(D: DeterminingSystem, P: SemilinearPDE, xi: bool | None = None, eta: bool | None = None) -> DeterminingSystem:
    """Impose xi = xi(x) and/or eta = alpha(x) u + beta(x) on a full system."""
    pred = predict_structure(P)
    xi = pred.xi_independent_of_u if xi is None else xi
    eta = pred.eta_affine_in_u if eta is None else eta
    if not xi and not eta:
        return D
    if eta and not xi:
        raise ValueError("the affine eta ansatz presupposes xi = xi(x)")
    G = generic_field(P, "reduced" if eta else "xi-reduced")
    ctx = G.ctx
    old = D.ctx
    u = ctx.var(ctx.dep_var)
    eta_fn = D.eta_names[0]
    alpha, beta = (G.eta_names if eta else (None, None))

    def image(a):
        if a.tag != UNKNOWN:
            return None
        args = old.fn_args(a.fn)
        upos = args.index(old.dep_var) if old.dep_var in args else None
        nu = a.count(upos) if upos is not None else 0
        xd = tuple(d for d in a.derivs if d != upos)
        if a.fn in D.xi_names:
            return ctx.zero() if nu else atom_expr(ctx, UnknownDeriv(a.fn, xd))
        if a.fn == eta_fn and eta:
            if nu >= 2:
                return ctx.zero()
            al = atom_expr(ctx, UnknownDeriv(alpha, xd))
            return al if nu == 1 else al * u + atom_expr(ctx, UnknownDeriv(beta, xd))
        return None

    pieces = []
    for eq, src in zip(D.equations, D.provenance):
        # atoms are read against the old context inside image()
        new = rewrite_atoms(eq.retag(ctx), image)
        if new:
            pieces.append((new, src))
    split = eta and not any(a.tag == UNKNOWN and old.dep_var in ctx.fn_args(a.fn) for e, _ in pieces for a in e.atoms())
    eqs, prov, seen = [], [], {}
    for e, src in pieces:
        parts = collect(e, lambda a: a.tag == JET, transcendental=True) if split else {(): e}
        for um, c in sorted(parts.items(), key=lambda kv: tuple((a.key, k) for a, k in kv[0])):
            origin = [tuple(sorted(s + um, key=lambda p: p[0].key)) for s in src]
            key = c.monic()
            if key in seen:
                prov[seen[key]] += origin
                continue
            seen[key] = len(eqs)
            eqs.append(c)
            prov.append(origin)
    unknowns = G.xi_names + G.eta_names
    return DeterminingSystem(unknowns, eqs, prov, ctx, ansatz=G.ansatz, formulation=D.formulation,
                             xi_names=G.xi_names, eta_names=G.eta_names, split_u=split)


__all__ = [
    "Certificate",
    "CertificationError",
    "Stage",
    "StructurePrediction",
    "ansatz_reduce",
    "certify_eta_uu",
    "certify_xi_u",
    "gauss_jordan",
    "predict_structure",
    "subprincipal_linear",
]
