"""Acceptance criteria 1-7, each at exact (symbolic zero) tolerance.

Every test records a ``criterion N: PASS|FAIL`` line; conftest prints the
lines in the terminal summary.
"""

import functools
import itertools

import pytest
import sympy as sp

from jetsym.corpus import CONFIRMS, load_corpus, lookup, run_corpus, strip_timings
from jetsym.detsys import determining_system, generic_field, solve_principal, symmetry_residual
from jetsym.exprkernel import JET, Context, monomial_text
from jetsym.jet import VectorField, prolong
from jetsym.theorem import certify_eta_uu, certify_xi_u, predict_structure
from jetsym.verify import is_symmetry

RESULTS = {}


def criterion(n, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            # a parametrized criterion passes only if every instance does
            prior = RESULTS.get(n, (title, "PASS"))[1]
            RESULTS[n] = (title, "FAIL")
            fn(*args, **kwargs)
            RESULTS[n] = (title, prior)
        return run
    return wrap


# -- 1 ----------------------------------------------------------------------


def _second_order_display(ctx, xi, eta, k, l):
    """The classical eta^(2)_kl written out term by term."""
    xs = ctx.indep_vars
    n = len(xs)
    xk, xl = xs[k], xs[l]

    def u(*idx):
        return ctx.jet(*(xs[i] for i in idx)) if idx else ctx.var(ctx.dep_var)

    def d(fn, *wrt):
        return ctx.unknown(fn, *wrt)

    e = d(eta, xk, xl) + d(eta, xl, "u") * u(k) + d(eta, xk, "u") * u(l) + d(eta, "u") * u(k, l)
    e = e + d(eta, "u", "u") * u(k) * u(l)
    for j in range(n):
        x = xi[j]
        e = e - d(x, xk, xl) * u(j) - d(x, xl, "u") * u(j) * u(k) - d(x, xk, "u") * u(j) * u(l)
        e = e - d(x, "u", "u") * u(j) * u(k) * u(l) - d(x, xk) * u(l, j) - d(x, xl) * u(j, k)
        e = e - d(x, "u") * (u(j) * u(l, k) + u(k) * u(j, l) + u(l) * u(k, j))
    return e


@pytest.mark.parametrize("n", [2, 3])
@criterion(1, "second prolongation matches the classical eta^(2)_kl display")
def test_criterion_1_prolongation(n):
    ctx = Context.make(",".join("xyz"[:n]))
    lap = " + ".join(f"u[{v},{v}]" for v in ctx.indep_vars)
    G = generic_field(solve_principal(ctx.parse(lap)), "full")
    P = prolong(G.field, 2)
    for k, l in itertools.combinations_with_replacement(range(n), 2):
        want = _second_order_display(G.ctx, G.xi_names, G.eta_names[0], k, l)
        assert (P.coeff((k, l)) - want).is_zero(), (k, l)


# -- 2 ----------------------------------------------------------------------


@criterion(2, "first-order u_i u_j coefficients are the symmetrized A^i xi^j_u family")
def test_criterion_2_first_order_family():
    ctx = Context.make("x,y", unknowns={"a1": ("x", "y"), "a2": ("x", "y"), "g": ("x", "y", "u")})
    P = solve_principal(ctx.parse("a1(x,y)*u[x] + a2(x,y)*u[y] + g(x,y,u)"))
    D = determining_system(P, "full", "multiplier")
    c = D.ctx
    jets = lambda a: a.tag == JET and a.order >= 1
    quad = {monomial_text(m, c): eq for m, eq in D.collected.items() if sum(k for a, k in m if jets(a)) == 2}
    assert quad == {
        "u[x]^2": -c.parse("a1(x,y)*xi1[u]"),
        "u[x]*u[y]": -c.parse("a1(x,y)*xi2[u] + a2(x,y)*xi1[u]"),
        "u[y]^2": -c.parse("a2(x,y)*xi2[u]"),
    }


# -- 3 ----------------------------------------------------------------------

FAMILIES = ["poisson2d", "polyharmonic-m1-n3", "polyharmonic-m2-n3", "wave", "heat", "kohn-laplace"]


@criterion(3, "xi_u = 0 and eta_uu = 0 certified on every family")
def test_criterion_3_certification():
    for eid in FAMILIES:
        entry = lookup(eid)
        for case in entry.cases:
            P = entry.case_pde(case)
            n = len(P.ctx.indep_vars)
            cert = certify_xi_u(P)
            assert cert.ok and cert.replay() and cert.summary()["rank"] == n, (eid, case.key)
            if predict_structure(P).eta_affine_in_u:
                cert = certify_eta_uu(P)
                assert cert.ok and cert.replay(), (eid, case.key)
                assert cert.summary()["forced"] == ["eta[u,u]"]


# -- 4 ----------------------------------------------------------------------


@criterion(4, "every confirms-paper generator verifies as a symmetry")
def test_criterion_4_confirms_set():
    count = 0
    names = set()
    for entry in load_corpus():
        for case in entry.cases:
            P = entry.case_pde(case)
            for g in case.generators:
                if g.expected != CONFIRMS:
                    continue
                S, conds = entry.build_generator(case, g)
                rep = is_symmetry(S, P, conds)
                assert rep.is_symmetry and rep.residual.is_zero(), (entry.id, case.key, g.name)
                names.add((entry.id, case.key, g.name))
                count += 1
    must = {
        ("poisson2d", "arbitrary", "Y1"), ("poisson2d", "arbitrary", "Y3"), ("poisson2d", "zero", "Y_(xi1,xi2)"),
        ("poisson2d", "exponential", "Y^e_(xi1,xi2)"), ("poisson2d", "power", "Y5"), ("wave", "power", "D_p"),
        ("polyharmonic-m1-n3", "zero", "Y1"), ("polyharmonic-m1-n3", "power-critical", "Y3"),
        ("heat", "zero", "H2"), ("heat", "zero", "H4"), ("heat", "linear", "H6"), ("heat", "exponential", "H8"),
        ("kohn-laplace", "cubic", "V1"), ("kohn-laplace", "cubic", "V3"), ("kohn-laplace", "cubic", "D3"),
        ("polyharmonic-m2-n3", "arbitrary", "X23"), ("polyharmonic-m2-n3", "power", "D_pm"),
    }
    assert must <= names
    assert count == sum(g.expected == CONFIRMS for e in load_corpus() for c in e.cases for g in c.generators)


# -- 5 ----------------------------------------------------------------------


@criterion(5, "W1 residual is -2f and H7 residual is -x*u_x, agreeing with the sympy oracle")
def test_criterion_5_contradicts_set():
    from test_oracle import _same

    wave = Context.make("x,t", unknowns={"f": ("u",)})
    W = solve_principal(wave.parse("u[t,t] - u[x,x] - f(u)"))
    W1 = VectorField.parse("x; t; 0", wave)
    assert symmetry_residual(W1, W) == wave.parse("-2*f(u)")
    assert _same(W, W1, "x; t; 0")[0]

    heat = Context.make("x,t")
    H = solve_principal(heat.parse("u[t] - u[x,x] - u^2"))
    H7 = VectorField.parse("t*x; t^2; -2*t*u - 1", heat)
    assert symmetry_residual(H7, H) == heat.parse("-x*u[x]")
    ok, _, want = _same(H, H7, "t*x; t^2; -2*t*u - 1")
    assert ok and sp.expand(want + sp.Symbol("x") * sp.Symbol("u_x")) == 0


# -- 6 ----------------------------------------------------------------------


@criterion(6, "Cauchy-Riemann and Laplace(beta) = 0 emerge in the reduced Laplace system")
def test_criterion_6_cauchy_riemann():
    ctx = Context.make("x,y")
    D = determining_system(solve_principal(ctx.parse("u[x,x] + u[y,y]")), "theorem-reduced")
    c = D.ctx
    assert D.contains(c.parse("xi1[x] - xi2[y]"))
    assert D.contains(c.parse("xi1[y] + xi2[x]"))
    betas = [e for e in D.equations if all(a.fn == "beta" for a in e.unknown_atoms())]
    assert len(betas) == 1 and D.contains(c.parse("beta[x,x] + beta[y,y]"))


# -- 7 ----------------------------------------------------------------------


def _property_checks():
    import test_corpus
    import test_exprkernel as ek
    import test_jet as jt
    import test_verify as vf

    return [
        ek.test_diff_is_derivation, ek.test_param_derivative_is_derivation, ek.test_mixed_partials_commute,
        ek.test_ring_axioms, ek.test_round_trip_random,
        jt.test_total_derivatives_commute, jt.test_prolongation_path_independent_random,
        jt.test_top_order_quadratic_coefficient, jt.test_top_order_linear_coefficient,
        jt.test_top_order_affine_ansatz_is_linear_in_jets,
        vf.test_bracket_antisymmetric, vf.test_bracket_jacobi, vf.test_bracket_closure_on_symmetries,
        test_corpus.test_pde_round_trip,
    ]


@criterion(7, "property suites: derivations, top-order shape, brackets, corpus determinism and round trip")
def test_criterion_7_properties():
    for check in _property_checks():
        check()
    a, b = run_corpus(), run_corpus()
    assert strip_timings(a.to_dict()) == strip_timings(b.to_dict())
    for entry in load_corpus():
        for case in entry.cases:
            for g in case.generators:
                ctx = entry.generator_context(case, g)
                text = str(VectorField.parse(g.components, ctx))
                assert str(VectorField.parse(text, ctx)) == text
