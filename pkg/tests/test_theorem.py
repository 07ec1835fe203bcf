import pytest

from jetsym.corpus import load_corpus, lookup
from jetsym.detsys import determining_system, solve_principal
from jetsym.exprkernel import Context, diff
from jetsym.theorem import (
    CertificationError,
    ansatz_reduce,
    certify_eta_uu,
    certify_xi_u,
    gauss_jordan,
    predict_structure,
)


def _pde(vars_, text, **unk):
    ctx = Context.make(vars_, unknowns=unk)
    return solve_principal(ctx.parse(text))


def test_prediction_laplace():
    p = predict_structure(_pde("x,y", "u[x,x] + u[y,y] + f(u)", f=("u",)))
    assert (p.semilinear, p.xi_independent_of_u, p.f_subprincipal_linear, p.eta_affine_in_u) == (True,) * 4


def test_prediction_heat():
    p = predict_structure(_pde("x,t", "u[t] - u[x,x] - f(u)", f=("u",)))
    assert p.to_dict() == {
        "semilinear": True,
        "xi_independent_of_u": True,
        "f_subprincipal_linear": True,
        "eta_affine_in_u": True,
        "order": 2,
    }


def test_prediction_first_order():
    p = predict_structure(_pde("x,y", "a1(x,y)*u[x] + a2(x,y)*u[y] + g(x,y,u)", a1=("x", "y"), a2=("x", "y"),
                               g=("x", "y", "u")))
    assert p.semilinear and p.xi_independent_of_u
    assert not p.eta_affine_in_u


def test_prediction_not_semilinear():
    ctx = Context.make("x,y")
    p = predict_structure(ctx.parse("u*u[x,x] + u[y,y]"), ctx)
    assert p.to_dict() == {
        "semilinear": False,
        "xi_independent_of_u": False,
        "f_subprincipal_linear": False,
        "eta_affine_in_u": False,
        "order": 2,
    }


def test_prediction_quadratic_gradient():
    p = predict_structure(_pde("x,t", "u[t] - u[x,x] - u[x]^2"))
    assert p.semilinear and not p.f_subprincipal_linear and not p.eta_affine_in_u


def test_prediction_invariants_on_corpus():
    for entry in load_corpus():
        for case in entry.cases:
            p = predict_structure(entry.case_pde(case))
            assert p.xi_independent_of_u == p.semilinear
            if p.eta_affine_in_u:
                assert p.semilinear and p.order > 1 and p.f_subprincipal_linear


def test_certify_laplace():
    cert = certify_xi_u(_pde("x,y", "u[x,x] + u[y,y]"))
    assert cert.ok and cert.replay()
    assert sorted(cert.summary()["forced"]) == ["xi1[u]", "xi2[u]"]


def test_certify_heat_needs_cross_monomials():
    cert = certify_xi_u(_pde("x,t", "u[t] - u[x,x] - f(u)", f=("u",)))
    assert cert.ok and cert.replay()
    assert cert.summary()["rank"] == 2
    assert len(cert.stages) >= 2


def test_certify_kohn_laplace_rank_three():
    P = lookup("kohn-laplace").pde
    cert = certify_xi_u(P)
    assert cert.ok and cert.replay()
    assert cert.summary()["rank"] >= 3
    assert set(cert.summary()["forced"]) >= {"xi1[u]", "xi2[u]", "xi3[u]"}


def test_certify_first_order_symbolic_coefficients():
    P = _pde("x,y", "a1(x,y)*u[x] + a2(x,y)*u[y] + g(x,y,u)", a1=("x", "y"), a2=("x", "y"), g=("x", "y", "u"))
    cert = certify_xi_u(P)
    assert cert.ok and cert.formulation == "multiplier" and cert.replay()


def test_certify_biharmonic():
    cert = certify_xi_u(lookup("polyharmonic-m2-n3").pde)
    assert cert.ok and cert.replay()
    cert = certify_eta_uu(lookup("polyharmonic-m2-n3").pde)
    assert cert.ok and cert.replay()


@pytest.mark.parametrize("eid", ["poisson2d", "wave", "heat", "kohn-laplace", "polyharmonic-m1-n3"])
def test_certify_eta_uu(eid):
    cert = certify_eta_uu(lookup(eid).pde)
    assert cert.ok and cert.replay()
    assert "eta[u,u]" in cert.summary()["forced"]


@pytest.mark.parametrize("text", ["u[t] - u[x,x] - u[x]^2", "u[t] - u[x,x] - u*u[x]"])
def test_eta_uu_precondition(text):
    with pytest.raises(CertificationError, match="precondition violated"):
        certify_eta_uu(_pde("x,t", text))


def test_eta_uu_first_order_undefined():
    with pytest.raises(CertificationError):
        certify_eta_uu(_pde("x,y", "u[x] + u"))


def test_certificate_documents():
    cert = certify_xi_u(_pde("x,t", "u[t] - u[x,x]"))
    doc = cert.to_dict()
    assert doc["claim"] == "xi_u_zero" and doc["ok"]
    assert doc["trace"] and all(len(t) == 3 for t in doc["trace"])
    assert len(cert.witness_equations) == doc["witnesses"]


def test_replay_detects_tampering():
    cert = certify_xi_u(_pde("x,y", "u[x,x] + u[y,y]"))
    cert.stages[0].forced = cert.stages[0].forced[:1]
    with pytest.raises(CertificationError):
        cert.replay()


def test_gauss_jordan_rank():
    ctx = Context.make("x")
    one, two, x = ctx.one(), ctx.const(2), ctx.var("x")
    rows, _, piv = gauss_jordan([[one, two], [two, two * two], [x, one]])
    assert len(piv) == 2


def test_ansatz_reduce_laplace():
    P = _pde("x,y", "u[x,x] + u[y,y]")
    R = ansatz_reduce(determining_system(P, "full"), P)
    c = R.ctx
    assert R.contains(c.parse("xi1[x] - xi2[y]"))
    assert R.contains(c.parse("xi1[y] + xi2[x]"))
    assert R.contains(c.parse("beta[x,x] + beta[y,y]"))
    direct = determining_system(P, "reduced")
    assert sorted(str(e.monic()) for e in R.equations) == sorted(str(e.monic()) for e in direct.equations)


def test_ansatz_reduce_heat_beta_equation():
    P = _pde("x,t", "u[t] - u[x,x]")
    R = ansatz_reduce(determining_system(P, "full"), P)
    assert R.contains(R.ctx.parse("beta[t] - beta[x,x]"))


def test_ansatz_reduce_identity_when_nothing_imposed():
    P = _pde("x,y", "u[x,x] + u[y,y]")
    D = determining_system(P, "full")
    assert ansatz_reduce(D, P, xi=False, eta=False) is D


def test_generator_shape_audit():
    for entry in load_corpus():
        for case in entry.cases:
            for g in case.generators:
                S, _ = entry.build_generator(case, g)
                u = S.ctx.dep_var
                assert all(diff(xi, u).is_zero() for xi in S.xi), g.name
                assert diff(diff(S.eta, u), u).is_zero(), g.name
