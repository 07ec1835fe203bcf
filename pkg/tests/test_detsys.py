import pytest

from jetsym.corpus import load_corpus
from jetsym.detsys import (
    NonInvertiblePrincipal,
    NotSemilinear,
    determining_system,
    evaluate_system,
    solve_principal,
    symmetry_residual,
)
from jetsym.exprkernel import JET, Context, ExprError, monomial_text
from jetsym.jet import MultiIndex, VectorField


@pytest.fixture
def laplace():
    ctx = Context.make("x,y", unknowns={"f": ("u",)})
    return ctx, solve_principal(ctx.parse("u[x,x] + u[y,y] + f(u)"))


@pytest.fixture
def heat():
    ctx = Context.make("x,t", unknowns={"f": ("u",)})
    return ctx, solve_principal(ctx.parse("u[t] - u[x,x] - f(u)"))


def test_principal_laplace(laplace):
    ctx, P = laplace
    assert P.order == 2
    assert set(P.A) == {MultiIndex((0, 0)), MultiIndex((1, 1))}
    assert P.principal == (1, 1)
    assert P.f == ctx.parse("f(u)")


def test_principal_heat(heat):
    ctx, P = heat
    assert P.A == {MultiIndex((0, 0)): ctx.parse("-1")}
    assert P.principal == (0, 0)
    assert P.f == ctx.parse("u[t] - f(u)")


def test_decomposition_identity():
    ctx = Context.make("x,y,t")
    F = ctx.parse("u[x,x] + u[y,y] + 4*(x^2 + y^2)*u[t,t] + 4*y*u[x,t] - 4*x*u[y,t] + u^3")
    P = solve_principal(F)
    total = P.f
    for K, a in P.A.items():
        total = total + a * ctx.jet(*[ctx.indep_vars[i] for i in K])
    assert (total - F).is_zero()
    # u_xx and u_yy both have coefficient 1; the greater index wins
    assert P.principal == (1, 1)


@pytest.mark.parametrize("text", ["u*u[x,x] + u[y,y]", "u[x]*u[x,x] + u[y,y]", "u[x,x]^2 + u[y,y]"])
def test_not_semilinear(text):
    ctx = Context.make("x,y")
    with pytest.raises(NotSemilinear, match="not semilinear"):
        solve_principal(ctx.parse(text))


def test_no_principal():
    ctx = Context.make("x,y")
    with pytest.raises(NotSemilinear):
        solve_principal(ctx.parse("u^2 + x"))


def test_non_invertible_principal():
    ctx = Context.make("x,y")
    P = solve_principal(ctx.parse("(1 + x)*u[x,x] + (x + y)*u[y,y]"))
    with pytest.raises(NonInvertiblePrincipal):
        symmetry_residual(VectorField.parse("1; 0; 0", ctx), P)


def test_monomial_principal_coefficient_allowed():
    ctx = Context.make("x,y")
    P = solve_principal(ctx.parse("x^2*u[x,x] + (1 + y)*u[y,y]"))
    assert P.principal == (0, 0)
    # x d/dx scales x^2 u_xx by 2 - 2 = 0
    assert symmetry_residual(VectorField.parse("x; 0; 0", ctx), P).is_zero()
    assert not symmetry_residual(VectorField.parse("0; 1; 0", ctx), P).is_zero()


def test_residual_examples(heat):
    ctx, P = heat
    assert symmetry_residual(VectorField.parse("1; 0; 0", ctx), P).is_zero()
    wave_ctx = Context.make("x,t", unknowns={"f": ("u",)})
    W = solve_principal(wave_ctx.parse("u[t,t] - u[x,x] - f(u)"))
    assert symmetry_residual(VectorField.parse("x; t; 0", wave_ctx), W) == wave_ctx.parse("-2*f(u)")
    ctx0 = Context.make("x,t")
    H = solve_principal(ctx0.parse("u[t] - u[x,x]"))
    assert symmetry_residual(VectorField.parse("2*t; 0; -x*u", ctx0), H).is_zero()


def test_multiplier_formulation_introduces_lambda(heat):
    ctx, P = heat
    R = symmetry_residual(VectorField.parse("1; 0; 0", ctx), P, "multiplier")
    lam = [a for a in R.unknown_atoms() if a.fn.startswith("lambda")]
    assert lam
    # S^(2)F - lambda F with S^(2)F = 0 for a translation
    assert R == -R.ctx.unknown(lam[0].fn) * P.full.retag(R.ctx)


def test_cauchy_riemann_in_reduced_system():
    ctx = Context.make("x,y")
    D = determining_system(solve_principal(ctx.parse("u[x,x] + u[y,y]")), "theorem-reduced")
    c = D.ctx
    assert D.contains(c.parse("xi1[x] - xi2[y]"))
    assert D.contains(c.parse("xi1[y] + xi2[x]"))
    assert D.contains(c.parse("beta[x,x] + beta[y,y]"))


def test_first_order_symmetrized_family():
    ctx = Context.make("x,y", unknowns={"a1": ("x", "y"), "a2": ("x", "y"), "g": ("x", "y", "u")})
    P = solve_principal(ctx.parse("a1(x,y)*u[x] + a2(x,y)*u[y] + g(x,y,u)"))
    D = determining_system(P, "full", "multiplier")
    c = D.ctx
    quad = {m: eq for m, eq in D.collected.items() if sum(k for a, k in m if a.tag == JET and a.order) == 2}
    assert len(quad) == 3
    want = {
        "u[x]^2": "a1(x,y)*xi1[u]",
        "u[x]*u[y]": "a1(x,y)*xi2[u] + a2(x,y)*xi1[u]",
        "u[y]^2": "a2(x,y)*xi2[u]",
    }
    for m, eq in quad.items():
        assert eq == -c.parse(want[monomial_text(m, c)])


def test_heat_full_system_forces_xi_u(heat):
    ctx, P = heat
    D = determining_system(P, "full")
    c = D.ctx
    assert D.contains(c.parse("xi1[u]")) or D.contains(c.parse("xi2[u]"))
    R = determining_system(solve_principal(Context.make("x,t").parse("u[t] - u[x,x]")), "reduced")
    assert R.contains(R.ctx.parse("beta[t] - beta[x,x]"))


def test_system_invariants():
    for entry in load_corpus():
        P = entry.case_pde(entry.cases[0])
        for ansatz in ("full", "reduced"):
            D = determining_system(P, ansatz)
            for eq in D.equations:
                assert not eq.is_zero()
                assert not any(a.tag == JET and a.order >= 1 for a in eq.atoms())
            assert (D.reconstruct() - D.residual).is_zero()


def test_lines_format(laplace):
    ctx, P = laplace
    D = determining_system(P, "reduced")
    for i, line in enumerate(D.lines(), 1):
        assert line.startswith(f"{i}. ") and line.endswith(" = 0") and " : " in line
    doc = D.to_dict()
    assert doc["ansatz"] == "reduced"
    assert len(doc["equations"]) == len(D)


def test_unknown_ansatz(laplace):
    with pytest.raises(ValueError):
        determining_system(laplace[1], "quadratic")


def _plain_generators():
    for entry in load_corpus():
        for case in entry.cases:
            for g in case.generators:
                if not g.conditions and not g.unknowns and g.expected == "confirms-paper":
                    yield pytest.param(entry, case, g, id=f"{entry.id}/{case.key}/{g.name}")


@pytest.mark.parametrize("entry, case, g", list(_plain_generators()))
def test_generators_solve_both_systems(entry, case, g):
    P = entry.case_pde(case)
    S, _ = entry.build_generator(case, g)
    for ansatz in ("full", "reduced"):
        D = determining_system(P, ansatz)
        assert all(v.is_zero() for v in evaluate_system(D, S)), ansatz


def test_non_symmetry_violates_system():
    ctx = Context.make("x,t")
    H = solve_principal(ctx.parse("u[t] - u[x,x] - u^2"))
    S = VectorField.parse("t*x; t^2; -2*t*u - 1", ctx)
    D = determining_system(H, "full")
    assert any(not v.is_zero() for v in evaluate_system(D, S))


def test_reduced_rejects_non_affine():
    ctx = Context.make("x,t")
    D = determining_system(solve_principal(ctx.parse("u[t] - u[x,x]")), "reduced")
    with pytest.raises(ExprError):
        evaluate_system(D, VectorField.parse("0; 0; u^2", ctx))
