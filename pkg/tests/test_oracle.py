"""Engine residuals against the independent sympy oracle."""

import re

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from jetsym.corpus import load_corpus, lookup
from jetsym.detsys import solve_principal, symmetry_residual
from jetsym.exprkernel import Context
from jetsym.jet import VectorField
from oracle import Oracle, engine_to_sympy

_F = sp.Function("f")
_NAMES = {"f": _F, "p": sp.Symbol("p"), "k": sp.Symbol("k")}
_DF = re.compile(r"\bf\[(u(?:,u)*)\]")


def _read(e):
    text = _DF.sub(lambda m: f"Derivative(f(u),{m.group(1)})", str(e))
    return engine_to_sympy(text, _NAMES)


def _oracle_residual(P, components):
    names = list(P.ctx.indep_vars)
    o = Oracle(names, P.order)
    F = o.from_jets(_read(P.full))
    parts = [engine_to_sympy(c.strip(), _NAMES) for c in components.split(";")]
    principal = "".join(names[i] for i in P.principal)
    return o.residual(F, parts[:-1], parts[-1], principal)


def _same(P, S, components):
    got = _read(symmetry_residual(S, P))
    want = _oracle_residual(P, components)
    return sp.simplify(got - want) == 0, got, want


def _case(eid, key, name):
    entry = lookup(eid)
    case = entry.case(key)
    (g,) = [g for g in case.generators if g.name == name]
    S, _ = entry.build_generator(case, g)
    return entry.case_pde(case), S, g.components


def test_w1_arbitrary_f():
    P, S, comps = _case("wave", "arbitrary", "W1")
    ok, got, want = _same(P, S, comps)
    assert ok
    assert want == -2 * _F(sp.Symbol("u"))


def test_h7_quadratic():
    P, S, comps = _case("heat", "quadratic", "H7")
    ok, got, want = _same(P, S, comps)
    assert ok
    assert sp.expand(want + sp.Symbol("x") * sp.Symbol("u_x")) == 0


def test_e1_literal_two_dimensions():
    P, S, comps = _case("polyharmonic-m1-n2", "exponential", "E1")
    ok, got, want = _same(P, S, comps)
    assert ok
    x, u = sp.symbols("x u")
    assert sp.expand(want - (4 - 4 * x) * sp.exp(u)) == 0


def test_e1_literal_four_dimensions():
    P, S, comps = _case("polyharmonic-m2-n4", "exponential", "E1")
    ok, got, want = _same(P, S, comps)
    assert ok
    x, u = sp.symbols("x u")
    assert sp.expand(want - (8 - 8 * x) * sp.exp(u)) == 0


def test_e1_corrected_two_dimensions():
    ctx = Context.make("x,y")
    P = solve_principal(ctx.parse("-u[x,x] - u[y,y] - exp(u)"))
    comps = "x^2 - y^2; 2*x*y; -4*x"
    assert _oracle_residual(P, comps) == 0
    assert symmetry_residual(VectorField.parse(comps, ctx), P).is_zero()


_SPOT = [
    ("heat", "zero", "H4"),
    ("heat", "linear", "H6"),
    ("heat", "quadratic", "H^d_2"),
    ("kohn-laplace", "zero", "V1"),
    ("kohn-laplace", "cubic", "V2"),
    ("poisson2d", "power", "Y5"),
    ("wave", "power", "D_p"),
    ("polyharmonic-m1-n3", "power-critical", "Y1"),
    ("polyharmonic-m2-n3", "zero", "Y2"),
]


@pytest.mark.parametrize("eid, key, name", _SPOT, ids=["/".join(s) for s in _SPOT])
def test_confirmed_generators_agree(eid, key, name):
    P, S, comps = _case(eid, key, name)
    ok, got, want = _same(P, S, comps)
    assert ok and want == 0


def test_every_contradicting_generator_agrees():
    seen = 0
    for entry in load_corpus():
        for case in entry.cases:
            P = entry.case_pde(case)
            if P.order > 2:
                continue
            for g in case.generators:
                if g.expected != "contradicts-paper":
                    continue
                S, _ = entry.build_generator(case, g)
                ok, got, want = _same(P, S, g.components)
                assert ok, (entry.id, g.name, got, want)
                assert want != 0
                seen += 1
    assert seen >= 4


_TERMS = ["1", "x", "t", "u", "x*u", "t*u", "x^2", "t*x", "t^2", "u^2"]


@st.composite
def _poly(draw):
    terms = draw(st.lists(st.tuples(st.integers(-3, 3).filter(bool), st.sampled_from(_TERMS)), max_size=3))
    return " + ".join(f"({c})*{t}" for c, t in terms) or "0"


@settings(max_examples=12)
@given(_poly(), _poly(), _poly(), st.sampled_from(["u^2", "exp(u)", "0", "f(u)"]))
def test_random_fields_heat(a, b, c, f):
    ctx = Context.make("x,t", unknowns={"f": ("u",)})
    P = solve_principal(ctx.parse(f"u[t] - u[x,x] - {f}"))
    comps = f"{a}; {b}; {c}"
    ok, got, want = _same(P, VectorField.parse(comps, ctx), comps)
    assert ok, (got, want)


@settings(max_examples=8)
@given(_poly(), _poly(), _poly())
def test_random_fields_wave(a, b, c):
    ctx = Context.make("x,t")
    P = solve_principal(ctx.parse("u[t,t] - u[x,x] - u^3"))
    comps = f"{a}; {b}; {c}"
    ok, got, want = _same(P, VectorField.parse(comps, ctx), comps)
    assert ok, (got, want)
