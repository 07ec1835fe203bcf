"""Built-in catalogue of classical equations and their listed symmetries.

Each entry is an equation template containing an arbitrary ``f(u)`` and a
list of cases; a case fixes ``f`` (or leaves it arbitrary) and lists the
generators claimed for it.  ``expected`` records whether the engine is
supposed to confirm the claim; the few ``contradicts-paper`` tags are the
claims whose residual is provably nonzero.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from . import __version__
from .detsys import SemilinearPDE, instantiate, solve_principal
from .exprkernel import Context, Expr, invert
from .jet import VectorField
from .theorem import CertificationError, certify_eta_uu, certify_xi_u, predict_structure
from .verify import SideCondition, is_symmetry

CONFIRMS = "confirms-paper"
CONTRADICTS = "contradicts-paper"
F_CASES = ("arbitrary", "zero", "linear", "power", "exponential", "cubic", "quadratic")


@dataclass
class CorpusGenerator:
    name: str
    components: str
    conditions: tuple = ()
    unknowns: dict = dc_field(default_factory=dict)
    expected: str = CONFIRMS
    paper_text: str = ""
    note: str = ""

    def flipped(self) -> str:
        return CONTRADICTS if self.expected == CONFIRMS else CONFIRMS


@dataclass
class FCase:
    f_case: str
    f: str | None
    generators: list
    params: tuple = ()
    anchor: str = ""
    label: str = ""

    @property
    def key(self) -> str:
        return self.label or self.f_case


@dataclass
class CorpusEntry:
    id: str
    vars: tuple
    template: str
    cases: list
    paper_anchor: str
    title: str = ""

    @property
    def base_context(self) -> Context:
        return Context(tuple(self.vars), "u", (), (("f", ("u",)),))

    @property
    def pde_text(self) -> str:
        return self.template

    @property
    def pde(self) -> SemilinearPDE:
        """The template with f(u) left arbitrary."""
        ctx = self.base_context
        return solve_principal(ctx.parse(self.template), ctx)

    @property
    def generators(self) -> list:
        return [g for c in self.cases for g in c.generators]

    def case(self, key: str) -> FCase:
        for c in self.cases:
            if c.key == key:
                return c
        raise KeyError(f"{self.id} has no case {key!r}")

    def case_context(self, case: FCase) -> Context:
        if case.f is None:
            return Context(tuple(self.vars), "u", tuple(case.params), (("f", ("u",)),))
        return Context(tuple(self.vars), "u", tuple(case.params), ())

    def case_pde(self, case: FCase) -> SemilinearPDE:
        ctx = self.case_context(case)
        if case.f is None:
            return solve_principal(ctx.parse(self.template), ctx)
        wide = ctx.with_unknowns({"f": ("u",)})
        F = instantiate(wide.parse(self.template), {"f": ctx.parse(case.f)})
        return solve_principal(F.retag(ctx), ctx)

    def generator_context(self, case: FCase, g: CorpusGenerator) -> Context:
        ctx = self.case_context(case)
        return ctx.with_unknowns(g.unknowns) if g.unknowns else ctx

    def build_generator(self, case: FCase, g: CorpusGenerator):
        ctx = self.generator_context(case, g)
        S = VectorField.parse(g.components, ctx)
        conds = [SideCondition.parse(c, ctx) for c in g.conditions]
        return S, conds


# --------------------------------------------------------------------------
# generator text helpers


def _vf(xi, eta="0") -> str:
    return "; ".join(list(xi) + [eta])


def _translations(vs, prefix="X"):
    n = len(vs)
    return [
        CorpusGenerator(f"{prefix}{i + 1}", _vf(["1" if j == i else "0" for j in range(n)]))
        for i in range(n)
    ]


def _rotations(vs, prefix="X"):
    out = []
    n = len(vs)
    for i in range(n):
        for j in range(i + 1, n):
            xi = ["0"] * n
            xi[i] = vs[j]
            xi[j] = f"-{vs[i]}"
            out.append(CorpusGenerator(f"{prefix}{i + 1}{j + 1}", _vf(xi)))
    return out


def _inversion_xi(vs, i) -> list:
    r2 = "(" + " + ".join(f"{v}^2" for v in vs) + ")"
    xi = []
    for j, v in enumerate(vs):
        if j == i:
            xi.append(f"2*{v}^2 - {r2}")
        else:
            xi.append(f"2*{vs[i]}*{v}")
    return xi


def _dilation(vs, eta) -> str:
    return _vf(list(vs), eta)


def _laplacian(vs, fn="u") -> str:
    return " + ".join(f"{fn}[{v},{v}]" for v in vs)


def _bilaplacian(vs, fn="u") -> str:
    terms = [f"{fn}[{v},{v},{v},{v}]" for v in vs]
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            terms.append(f"2*{fn}[{vs[i]},{vs[i]},{vs[j]},{vs[j]}]")
    return " + ".join(terms)


def _solved(expr_text: str, lhs: str, vs, fns: dict, params=()) -> str:
    """``lhs -> rhs`` equivalent to  expr_text = 0, solved for ``lhs``."""
    ctx = Context(tuple(vs), "u", tuple(params), tuple(fns.items()))
    e = ctx.parse(expr_text)
    a = ctx.parse(lhs)
    (mono, _), = a.terms.items()
    coef = ctx.zero()
    for m, v in e.terms.items():
        if m == mono:
            coef = coef + Expr(ctx, {(): v})
    if coef.constant_value() is None or coef.is_zero():
        raise ValueError(f"{lhs} needs a nonzero constant coefficient in {expr_text}")
    rest = e - coef * a
    return f"{lhs} -> {-(rest * invert(coef))}"


# --------------------------------------------------------------------------
# the entries


def _poisson() -> CorpusEntry:
    vs = ("x", "y")
    cr = ("xi1[x] -> xi2[y]", "xi1[y] -> -xi2[x]")
    cr_fns = {"xi1": ("x", "y"), "xi2": ("x", "y")}
    base = [
        CorpusGenerator("Y1", "1; 0; 0"),
        CorpusGenerator("Y2", "0; 1; 0"),
        CorpusGenerator("Y3", "y; -x; 0"),
    ]
    return CorpusEntry(
        "poisson2d",
        vs,
        "u[x,x] + u[y,y] + f(u)",
        [
            FCase("arbitrary", None, base, anchor="e2-e3"),
            FCase(
                "zero",
                "0",
                [
                    CorpusGenerator("Y_(xi1,xi2)", "xi1(x,y); xi2(x,y); 0", cr, cr_fns),
                    CorpusGenerator("Y4", "0; 0; u"),
                    CorpusGenerator("Y_beta", "0; 0; beta(x,y)", ("beta[x,x] -> -beta[y,y]",), {"beta": vs}),
                ],
                anchor="e4-e5",
            ),
            FCase(
                "linear",
                "k*u",
                [
                    CorpusGenerator("Y4", "0; 0; u"),
                    CorpusGenerator(
                        "Y_beta", "0; 0; beta(x,y)", ("beta[x,x] -> -beta[y,y] - k*beta(x,y)",), {"beta": vs}
                    ),
                ],
                params=("k",),
                anchor="f = ku",
            ),
            FCase(
                "power",
                "k*u^p",
                [CorpusGenerator("Y5", "x; y; 2/(1-p)*u")],
                params=("k", "p"),
                anchor="e6",
            ),
            FCase(
                "exponential",
                "k*exp(u)",
                [CorpusGenerator("Y^e_(xi1,xi2)", "xi1(x,y); xi2(x,y); -2*xi1[x]", cr, cr_fns)],
                params=("k",),
                anchor="e7",
            ),
        ],
        "e2-e8",
        "Poisson equation in the plane",
    )


def _polyharmonic(m: int, n: int) -> CorpusEntry:
    vs = ("x", "y", "z", "w")[:n]
    lap = _laplacian(vs) if m == 1 else _bilaplacian(vs)
    # (-1)^m Delta^m u = f(u)
    template = f"-({lap}) - f(u)" if m == 1 else f"{lap} - f(u)"
    sign = "-" if m == 1 else ""
    beta_op = f"{sign}({_laplacian(vs, 'beta') if m == 1 else _bilaplacian(vs, 'beta')})"
    beta_lhs = "beta[x,x]" if m == 1 else "beta[x,x,x,x]"
    beta_fns = {"beta": vs}
    beta = f"beta({','.join(vs)})"
    flat = ["0"] * n
    weight = 2 * m - n
    inv = [CorpusGenerator(f"Y{i + 1}", _vf(_inversion_xi(vs, i), f"({weight})*{vs[i]}*u")) for i in range(n)]
    cases = []
    if n != 2 * m:
        cases.append(FCase("arbitrary", None, _translations(vs) + _rotations(vs), anchor="ggenpol"))
        cases.append(
            FCase(
                "zero",
                "0",
                inv
                + [
                    CorpusGenerator("U", _vf(flat, "u")),
                    CorpusGenerator("W_beta", _vf(flat, beta), (_solved(beta_op, beta_lhs, vs, beta_fns),), beta_fns),
                ],
                anchor="ypol, hompol",
            )
        )
        cases.append(
            FCase(
                "linear",
                "u",
                [
                    CorpusGenerator("U", _vf(flat, "u")),
                    CorpusGenerator(
                        "W_beta", _vf(flat, beta), (_solved(f"{beta_op} - {beta}", beta_lhs, vs, beta_fns),),
                        beta_fns,
                        paper_text="(-1)^m Delta^m beta + beta = 0",
                        note="listed side condition has the wrong sign; the linear equation itself is used",
                    ),
                ],
                anchor="f = u",
            )
        )
        cases.append(
            FCase(
                "power",
                "u^p",
                [CorpusGenerator("D_pm", _dilation(vs, f"{2 * m}/(1-p)*u"))],
                params=("p",),
                anchor="D_pm",
            )
        )
        pc = Fraction(n + 2 * m, n - 2 * m)
        dil = Fraction(2 * m) / (1 - pc)
        cases.append(
            FCase(
                "power",
                f"u^({pc})",
                inv + [CorpusGenerator("D_pm", _dilation(vs, f"({dil})*u"))],
                anchor="p = (n+2m)/(n-2m)",
                label="power-critical",
            )
        )
    exp_gens = [CorpusGenerator("W", _dilation(vs, f"-{2 * m}"))]
    if n == 2 * m:
        exp_gens += [
            CorpusGenerator(
                f"E{i + 1}", _vf(_inversion_xi(vs, i), f"-{4 * m}"), expected=CONTRADICTS,
                paper_text="E_i = (2x^i x^j - |x|^2 delta^ij) d_j - 4m d_u",
                note="the u-component must be -4m x^i; the constant one leaves a nonzero residual",
            )
            for i in range(n)
        ]
    cases.append(FCase("exponential", "exp(u)", exp_gens, anchor="W" if n != 2 * m else "n = 2m"))
    return CorpusEntry(
        f"polyharmonic-m{m}-n{n}",
        vs,
        template,
        cases,
        "pol",
        f"polyharmonic equation, m = {m}, n = {n}",
    )


def _wave() -> CorpusEntry:
    vs = ("x", "t")
    kil = ("xi[x] -> phi[t]", "xi[t] -> phi[x]")
    kil_fns = {"xi": vs, "phi": vs}
    w1_note = "t d_t + x d_x leaves -2 f(u); it is a symmetry only for f = 0"
    return CorpusEntry(
        "wave",
        vs,
        "u[t,t] - u[x,x] - f(u)",
        [
            FCase(
                "arbitrary",
                None,
                [
                    CorpusGenerator("W1", "x; t; 0", expected=CONTRADICTS, note=w1_note,
                                    paper_text="For any function f(u) ... W_1 = t d_t + x d_x"),
                    CorpusGenerator("W2", "0; 1; 0"),
                    CorpusGenerator("W3", "1; 0; 0"),
                ],
                anchor="simw",
            ),
            FCase(
                "zero",
                "0",
                [
                    CorpusGenerator("W1", "x; t; 0"),
                    CorpusGenerator("W_(xi,phi)", "xi(x,t); phi(x,t); 0", kil, kil_fns),
                    CorpusGenerator("U", "0; 0; u"),
                    CorpusGenerator("W_beta", "0; 0; beta(x,t)", ("beta[x,x] -> beta[t,t]",), {"beta": vs}),
                ],
                anchor="kilh",
            ),
            FCase(
                "linear",
                "u",
                [
                    CorpusGenerator("W1", "x; t; 0", expected=CONTRADICTS, note="residual -2u",
                                    paper_text="generated by (simw) and by U, W_beta"),
                    CorpusGenerator("W2", "0; 1; 0"),
                    CorpusGenerator("W3", "1; 0; 0"),
                    CorpusGenerator("U", "0; 0; u"),
                    CorpusGenerator(
                        "W_beta", "0; 0; beta(x,t)", ("beta[x,x] -> beta[t,t] - beta(x,t)",), {"beta": vs}
                    ),
                ],
                anchor="f = u",
            ),
            FCase(
                "power",
                "u^p",
                [CorpusGenerator("D_p", "x; t; 2/(1-p)*u")],
                params=("p",),
                anchor="D_p",
            ),
            FCase(
                "exponential",
                "exp(u)",
                [CorpusGenerator("W^e_(xi,phi)", "xi(x,t); phi(x,t); -2*xi[x]", kil, kil_fns)],
                anchor="W^e",
            ),
        ],
        "wavegen",
        "semilinear wave equation",
    )


def _heat() -> CorpusEntry:
    vs = ("x", "t")
    beta = {"beta": vs}
    bt_text = "beta_t - beta{xx} = 0"
    return CorpusEntry(
        "heat",
        vs,
        "u[t] - u[x,x] - f(u)",
        [
            FCase(
                "arbitrary",
                None,
                [CorpusGenerator("H0", "0; 1; 0"), CorpusGenerator("H1", "1; 0; 0")],
                anchor="heatgen",
            ),
            FCase(
                "zero",
                "0",
                [
                    CorpusGenerator("H2", "2*t; 0; -x*u"),
                    CorpusGenerator("H_u", "0; 0; u"),
                    CorpusGenerator("H3", "x; 2*t; 0"),
                    CorpusGenerator("H4", "4*t*x; 4*t^2; -(x^2 + 2*t)*u"),
                    CorpusGenerator("H_beta", "0; 0; beta(x,t)", ("beta[t] -> beta[x,x]",), beta,
                                    paper_text=bt_text),
                ],
                anchor="h2",
            ),
            FCase(
                "linear",
                "u",
                [
                    CorpusGenerator("H2", "2*t; 0; -x*u"),
                    CorpusGenerator("H_u", "0; 0; u"),
                    CorpusGenerator("H5", "x; 2*t; 2*t*u"),
                    CorpusGenerator("H6", "t*x; t^2; (t^2 - x^2/4 - t/2)*u"),
                    CorpusGenerator(
                        "H_beta", "0; 0; beta(x,t)", ("beta[t] -> beta[x,x] + beta(x,t)",), beta,
                        paper_text=bt_text,
                        note="listed side condition drops the +beta term of u_t = u_xx + u",
                    ),
                ],
                anchor="f = u",
            ),
            FCase(
                "power",
                "u^p",
                [CorpusGenerator("H^d_p", "x; 2*t; 2/(1-p)*u")],
                params=("p",),
                anchor="H^d_p",
            ),
            FCase(
                "quadratic",
                "u^2",
                [
                    CorpusGenerator("H7", "t*x; t^2; -2*t*u - 1", expected=CONTRADICTS,
                                    note="residual -x u_x after eliminating u_t"),
                    CorpusGenerator("H^d_2", "x; 2*t; -2*u"),
                ],
                anchor="f = u^2",
            ),
            FCase(
                "exponential",
                "exp(u)",
                [CorpusGenerator("H8", "x; 2*t; -2")],
                anchor="H8",
            ),
        ],
        "heat",
        "one-dimensional heat equation",
    )


def _kohn_laplace() -> CorpusEntry:
    vs = ("x", "y", "t")
    gf = [
        CorpusGenerator("T", "0; 0; 1; 0"),
        CorpusGenerator("R", "y; -x; 0; 0"),
        CorpusGenerator("X~", "1; 0; -2*y; 0"),
        CorpusGenerator("Y~", "0; 1; 2*x; 0"),
    ]
    v = [
        CorpusGenerator("V1", "x*t - x^2*y - y^3; y*t + x^3 + x*y^2; t^2 - (x^2 + y^2)^2; -t*u"),
        CorpusGenerator("V2", "t - 4*x*y; 3*x^2 - y^2; -(2*y*t + 2*x^3 + 2*x*y^2); 2*y*u"),
        CorpusGenerator("V3", "x^2 - 3*y^2; t + 4*x*y; 2*x*t - 2*x^2*y - 2*y^3; -2*x*u"),
    ]
    hl = "beta[y,y] + 4*(x^2 + y^2)*beta[t,t] + 4*y*beta[x,t] - 4*x*beta[y,t]"
    beta = {"beta": vs}
    return CorpusEntry(
        "kohn-laplace",
        vs,
        "u[x,x] + u[y,y] + 4*(x^2 + y^2)*u[t,t] + 4*y*u[x,t] - 4*x*u[y,t] + f(u)",
        [
            FCase("arbitrary", None, gf, anchor="G_f"),
            FCase(
                "zero",
                "0",
                v
                + [
                    CorpusGenerator("Z", "x; y; 2*t; 0"),
                    CorpusGenerator("U", "0; 0; 0; u"),
                    CorpusGenerator("W_beta", "0; 0; 0; beta(x,y,t)", (f"beta[x,x] -> -({hl})",), beta),
                ],
                anchor="v1-v3",
            ),
            FCase(
                "linear",
                "u",
                [
                    CorpusGenerator("U", "0; 0; 0; u"),
                    CorpusGenerator(
                        "W_beta", "0; 0; 0; beta(x,y,t)", (f"beta[x,x] -> -({hl}) - beta(x,y,t)",), beta
                    ),
                ],
                anchor="f = u",
            ),
            FCase(
                "power",
                "u^p",
                [CorpusGenerator("D_p", "x; y; 2*t; 2/(1-p)*u")],
                params=("p",),
                anchor="d3",
            ),
            FCase(
                "exponential",
                "exp(u)",
                [CorpusGenerator("E", "x; y; 2*t; -2")],
                anchor="E",
            ),
            FCase(
                "cubic",
                "u^3",
                [*v, CorpusGenerator("D3", "x; y; 2*t; -u")],
                anchor="critical case",
            ),
        ],
        "klgen",
        "Kohn-Laplace equation on the Heisenberg group",
    )


@lru_cache(maxsize=None)
def _corpus() -> tuple:
    return (
        _poisson(),
        _polyharmonic(1, 3),
        _polyharmonic(2, 3),
        _polyharmonic(1, 2),
        _polyharmonic(2, 4),
        _wave(),
        _heat(),
        _kohn_laplace(),
    )


def load_corpus() -> list[CorpusEntry]:
    return list(_corpus())


def lookup(entry_id: str) -> CorpusEntry:
    for e in _corpus():
        if e.id == entry_id:
            return e
    raise KeyError(f"no corpus entry {entry_id!r}")


# --------------------------------------------------------------------------
# running


def _certificates(P: SemilinearPDE, prediction) -> list[dict]:
    out = []
    if not prediction.semilinear:
        return out
    try:
        out.append(certify_xi_u(P, raise_on_failure=False).summary())
    except CertificationError as exc:
        out.append({"claim": "xi_u_zero", "ok": False, "error": str(exc)})
    if prediction.eta_affine_in_u:
        try:
            out.append(certify_eta_uu(P, raise_on_failure=False).summary())
        except CertificationError as exc:
            out.append({"claim": "eta_uu_zero", "ok": False, "error": str(exc)})
    return out


def run_case(entry: CorpusEntry, case: FCase, overrides: dict | None = None) -> dict:
    start = time.perf_counter()
    P = entry.case_pde(case)
    prediction = predict_structure(P)
    certs = _certificates(P, prediction)
    gens = []
    for g in case.generators:
        row = {"name": g.name, "components": g.components, "expected": g.expected}
        if g.conditions:
            row["conditions"] = list(g.conditions)
        if g.paper_text:
            row["paper_text"] = g.paper_text
        try:
            S, conds = entry.build_generator(case, g)
            rep = is_symmetry(S, P, conds)
            row["verdict"] = rep.verdict
            row["residual_text"] = str(rep.residual)
        except Exception as exc:  # reported, not raised
            row["verdict"] = "error"
            row["residual_text"] = f"{type(exc).__name__}: {exc}"
        gens.append(row)
    entry_row = {
        "id": entry.id,
        "f_case": case.key,
        "f": case.f if case.f is not None else "f(u)",
        "paper_anchor": f"{entry.paper_anchor}: {case.anchor}" if case.anchor else entry.paper_anchor,
        "pde": str(P.full),
        "prediction": prediction.to_dict(),
        "certificates": certs,
        "generators": gens,
        "wall_time": round(time.perf_counter() - start, 4),
    }
    entry_row["pass"] = score_entry(entry_row, overrides)
    return entry_row


def _matches(verdict: str, expected: str) -> bool:
    if expected == CONFIRMS:
        return verdict == "symmetry"
    return verdict == "not-symmetry"


def score_entry(row: dict, overrides: dict | None = None) -> bool:
    overrides = overrides or {}
    ok = all(c.get("ok") for c in row["certificates"])
    for g in row["generators"]:
        expected = overrides.get((row["id"], row["f_case"], g["name"]), g["expected"])
        ok = ok and _matches(g["verdict"], expected)
    return ok


@dataclass
class RunReport:
    entries: list
    engine_version: str = __version__
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(e["pass"] for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "engine_version": self.engine_version,
            "entries": self.entries,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def rescore(self, overrides: dict) -> "RunReport":
        """Same verdicts scored against altered expected tags.

        ``overrides`` maps (id, f_case, generator name) to a tag.
        """
        rows = []
        for e in self.entries:
            e2 = dict(e)
            e2["pass"] = score_entry(e, overrides)
            rows.append(e2)
        return RunReport(rows, self.engine_version, self.wall_time)

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            mark = "PASS" if e["pass"] else "FAIL"
            certs = ", ".join(f"{c['claim']}={'ok' if c.get('ok') else 'FAILED'}" for c in e["certificates"])
            lines.append(f"[{mark}] {e['id']} / {e['f_case']}  ({e['pde']} = 0)  {certs}")
            for g in e["generators"]:
                ok = _matches(g["verdict"], g["expected"])
                res = "" if g["verdict"] == "symmetry" else f"  residual: {g['residual_text']}"
                lines.append(f"    {'ok ' if ok else 'BAD'} {g['name']:<14} {g['verdict']:<13} ({g['expected']}){res}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({len(self.entries)} cases)")
        return "\n".join(lines)


def _select(filter: str | None):
    """Filter is ``id``, ``id/f_case``, or a bare f_case label."""
    tasks = []
    for entry in _corpus():
        for case in entry.cases:
            if filter:
                if "/" in filter:
                    eid, fc = filter.split("/", 1)
                    if entry.id != eid or fc not in (case.key, case.f_case):
                        continue
                elif filter not in (entry.id, case.key, case.f_case):
                    continue
            tasks.append((entry.id, case.key))
    return tasks


def _run_task(task):
    eid, key = task
    entry = lookup(eid)
    return run_case(entry, entry.case(key))


def run_corpus(filter: str | None = None, parallel: bool = False, workers: int | None = None) -> RunReport:
    start = time.perf_counter()
    tasks = _select(filter)
    if parallel and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, tasks))
    else:
        rows = [_run_task(t) for t in tasks]
    return RunReport(rows, wall_time=round(time.perf_counter() - start, 4))


def strip_timings(doc):
    if isinstance(doc, dict):
        return {k: strip_timings(v) for k, v in doc.items() if not k.startswith("wall_time")}
    if isinstance(doc, list):
        return [strip_timings(v) for v in doc]
    return doc


# --------------------------------------------------------------------------
# PDE documents


def parse_pde_document(text: str) -> tuple[SemilinearPDE, Context]:
    """Read ``vars:``, ``dep:``, ``params:``, ``unknowns:`` and ``eq:`` lines.

    ``unknowns:`` lists declarations such as ``f(u), a(x,y)``.
    """
    fields: dict = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"expected 'key: value', got {line!r}")
        k, v = line.split(":", 1)
        k = k.strip().lower()
        if k not in ("vars", "dep", "params", "unknowns", "eq"):
            raise ValueError(f"unknown field {k!r}")
        fields[k] = v.strip()
    if "vars" not in fields or "eq" not in fields:
        raise ValueError("a PDE document needs vars: and eq: lines")
    vs = tuple(s.strip() for s in fields["vars"].split(",") if s.strip())
    dep = fields.get("dep", "u") or "u"
    params = tuple(s.strip() for s in fields.get("params", "").split(",") if s.strip())
    unknowns = parse_declarations(fields.get("unknowns", ""))
    ctx = Context(vs, dep, params, tuple(unknowns.items()))
    eq = fields["eq"]
    if "=" in eq:
        lhs, rhs = eq.split("=", 1)
        F = ctx.parse(lhs) - ctx.parse(rhs)
    else:
        F = ctx.parse(eq)
    return solve_principal(F, ctx), ctx


def parse_declarations(text: str) -> dict:
    """``f(u), beta(x,y)`` -> {"f": ("u",), "beta": ("x", "y")}."""
    out = {}
    text = text.strip()
    i = 0
    while i < len(text):
        j = text.find("(", i)
        if j < 0:
            raise ValueError(f"bad declaration list {text!r}")
        name = text[i:j].strip().lstrip(",").strip()
        k = text.find(")", j)
        if k < 0:
            raise ValueError(f"bad declaration list {text!r}")
        args = tuple(a.strip() for a in text[j + 1:k].split(",") if a.strip())
        if not name:
            raise ValueError(f"bad declaration list {text!r}")
        out[name] = args
        i = k + 1
        while i < len(text) and text[i] in " ,":
            i += 1
    return out


def load_pde(ref: str) -> tuple[SemilinearPDE, Context]:
    """``builtin:<id>[/<f_case>]`` or a path to a PDE document."""
    if ref.startswith("builtin:"):
        spec = ref[len("builtin:"):]
        eid, _, key = spec.partition("/")
        entry = lookup(eid)
        if key:
            case = entry.case(key)
            P = entry.case_pde(case)
        else:
            P = entry.pde
        return P, P.ctx
    with open(ref) as fh:
        return parse_pde_document(fh.read())


__all__ = [
    "CONFIRMS",
    "CONTRADICTS",
    "CorpusEntry",
    "CorpusGenerator",
    "FCase",
    "RunReport",
    "load_corpus",
    "load_pde",
    "lookup",
    "parse_pde_document",
    "run_corpus",
    "strip_timings",
]
