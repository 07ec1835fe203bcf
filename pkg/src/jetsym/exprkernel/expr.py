"""Canonical sparse expressions over jet-space atoms.

An :class:`Expr` is a finite map from monomials to coefficients in
``Q(params)``.  A monomial is a tuple of ``(atom, exponent)`` pairs sorted by
the atom's ``key``.  Plain atoms (independent variables, jet coordinates,
unknown-function derivatives) carry nonzero integer exponents, negative ones
included, so single monomials are always invertible.  Power atoms with a
non-integer exponent and exponential atoms always appear with exponent 1;
same-base powers and all exponentials of one monomial are merged on
multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Mapping

from .coef import ONE, ZERO, CoefField, as_integer, field_for, norm, to_coef

INDEP, JET, UNKNOWN, POWER, EXP = range(5)

RESERVED = frozenset({"exp"})


class ExprError(ValueError):
    pass


class NotRepresentable(ExprError):
    """The result falls outside the supported expression class."""


class NonPolynomialCarrier(ExprError):
    pass


# --------------------------------------------------------------------------
# context


@dataclass(frozen=True)
class Context:
    """Names an expression is interpreted against.

    ``unknowns`` maps each undetermined function to its ordered argument
    names (independent variables and/or the dependent variable).
    """

    indep_vars: tuple[str, ...]
    dep_var: str = "u"
    params: tuple[str, ...] = ()
    unknowns: tuple[tuple[str, tuple[str, ...]], ...] = dc_field(default=())

    def __post_init__(self):
        object.__setattr__(self, "indep_vars", tuple(self.indep_vars))
        object.__setattr__(self, "params", tuple(self.params))
        unk = self.unknowns
        if isinstance(unk, Mapping):
            unk = unk.items()
        object.__setattr__(self, "unknowns", tuple((n, tuple(a)) for n, a in unk))
        names = list(self.indep_vars) + [self.dep_var] + list(self.params)
        names += [n for n, _ in self.unknowns]
        if len(set(names)) != len(names):
            raise ExprError(f"context names must be distinct: {names}")
        bad = RESERVED.intersection(names)
        if bad:
            raise ExprError(f"reserved name used: {sorted(bad)}")
        coords = set(self.indep_vars) | {self.dep_var}
        for fn, args in self.unknowns:
            if not set(args) <= coords or len(set(args)) != len(args):
                raise ExprError(f"bad argument list for {fn}: {args}")

    @classmethod
    def make(cls, indep_vars, dep_var="u", params=(), unknowns=None) -> "Context":
        if isinstance(indep_vars, str):
            indep_vars = [v.strip() for v in indep_vars.split(",") if v.strip()]
        return cls(tuple(indep_vars), dep_var, tuple(params), tuple((unknowns or {}).items()))

    @property
    def n(self) -> int:
        return len(self.indep_vars)

    @cached_property
    def field(self) -> CoefField:
        return field_for(self.params)

    @cached_property
    def fn_table(self) -> dict[str, tuple[str, ...]]:
        return dict(self.unknowns)

    def fn_args(self, name: str) -> tuple[str, ...]:
        return self.fn_table[name]

    def kind(self, name: str) -> str | None:
        if name in self.indep_vars:
            return "indep"
        if name == self.dep_var:
            return "dep"
        if name in self.params:
            return "param"
        if name in self.fn_table:
            return "unknown"
        return None

    def with_unknowns(self, extra: Mapping[str, Iterable[str]]) -> "Context":
        merged = dict(self.unknowns)
        for k, v in extra.items():
            v = tuple(v)
            if merged.get(k, v) != v:
                raise ExprError(f"unknown {k} redeclared with different arguments")
            merged[k] = v
        return Context(self.indep_vars, self.dep_var, self.params, tuple(merged.items()))

    def without_unknowns(self, names: Iterable[str]) -> "Context":
        drop = set(names)
        kept = tuple((k, v) for k, v in self.unknowns if k not in drop)
        return Context(self.indep_vars, self.dep_var, self.params, kept)

    def extends(self, other: "Context") -> bool:
        return (
            self.indep_vars == other.indep_vars
            and self.dep_var == other.dep_var
            and self.params == other.params
            and set(other.unknowns) <= set(self.unknowns)
        )

    def fresh_name(self, base: str) -> str:
        name = base
        while self.kind(name) is not None or name in RESERVED:
            name += "_"
        return name

    # -- expression builders ------------------------------------------------

    def const(self, c) -> "Expr":
        c = to_coef(c)
        return Expr(self, {(): c} if c else {})

    def zero(self) -> "Expr":
        return Expr(self, {})

    def one(self) -> "Expr":
        return Expr(self, {(): ONE})

    def var(self, name: str) -> "Expr":
        kind = self.kind(name)
        if kind == "indep":
            return atom_expr(self, IndepVar(self.indep_vars.index(name), name))
        if kind == "dep":
            return atom_expr(self, JetAtom(()))
        if kind == "param":
            return Expr(self, {(): self.field.gen(name)})
        raise ExprError(f"not a variable or parameter: {name}")

    def jet(self, *names: str) -> "Expr":
        return atom_expr(self, JetAtom(tuple(sorted(self.indep_vars.index(v) for v in names))))

    def jet_atom(self, index) -> "JetAtom":
        return JetAtom(tuple(sorted(index)))

    def unknown(self, fn: str, *wrt: str) -> "Expr":
        return atom_expr(self, self.unknown_atom(fn, wrt))

    def unknown_atom(self, fn: str, wrt=()) -> "UnknownDeriv":
        args = self.fn_args(fn)
        return UnknownDeriv(fn, tuple(sorted(args.index(v) for v in wrt)))

    def parse(self, text: str) -> "Expr":
        from .parser import parse_expr

        return parse_expr(text, self)


# --------------------------------------------------------------------------
# atoms


class Atom:
    """Base class; identity and total order both come from ``key``."""

    __slots__ = ("key", "_hash")
    tag = -1

    def _set_key(self, key):
        self.key = key
        self._hash = hash(key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Atom) and self.key == other.key)

    def __lt__(self, other):
        return self.key < other.key

    def inner_atoms(self) -> set["Atom"]:
        return set()

    def __repr__(self):
        return f"{type(self).__name__}{self.key[1:]}"


class IndepVar(Atom):
    __slots__ = ("index", "name")
    tag = INDEP

    def __init__(self, index: int, name: str):
        self.index, self.name = index, name
        self._set_key((INDEP, index, name))


class JetAtom(Atom):
    """u_K for a sorted multi-index K; K == () is u itself."""

    __slots__ = ("index",)
    tag = JET

    def __init__(self, index: tuple[int, ...]):
        self.index = index
        self._set_key((JET, len(index), index))

    @property
    def order(self) -> int:
        return len(self.index)


class UnknownDeriv(Atom):
    """Derivative of an undetermined function; ``derivs`` holds sorted argument positions."""

    __slots__ = ("fn", "derivs")
    tag = UNKNOWN

    def __init__(self, fn: str, derivs: tuple[int, ...] = ()):
        self.fn, self.derivs = fn, derivs
        self._set_key((UNKNOWN, fn, len(derivs), derivs))

    @property
    def order(self) -> int:
        return len(self.derivs)

    def extend(self, pos: int) -> "UnknownDeriv":
        return UnknownDeriv(self.fn, tuple(sorted(self.derivs + (pos,))))

    def count(self, pos: int) -> int:
        return self.derivs.count(pos)


class PowerAtom(Atom):
    """base ** exponent with a non-integer (possibly symbolic) exponent."""

    __slots__ = ("base", "exp")
    tag = POWER

    def __init__(self, base, exp):
        self.base, self.exp = base, exp
        bkey = (0, base.key) if isinstance(base, Atom) else (1, base.key)
        self._set_key((POWER, bkey, str(exp)))

    def base_expr(self, ctx: Context) -> "Expr":
        return atom_expr(ctx, self.base) if isinstance(self.base, Atom) else self.base

    def inner_atoms(self):
        if isinstance(self.base, Atom):
            return {self.base} | self.base.inner_atoms()
        return self.base.atoms()


class ExpAtom(Atom):
    __slots__ = ("arg",)
    tag = EXP

    def __init__(self, arg: "Expr"):
        self.arg = arg
        self._set_key((EXP, arg.key))

    def inner_atoms(self):
        return self.arg.atoms()


def _fkey(pair):
    return pair[0].key


def _is_plain(m) -> bool:
    return not m or m[-1][0].tag < POWER


def atom_expr(ctx: Context, a: Atom, k: int = 1) -> "Expr":
    return Expr(ctx, {((a, k),): ONE})


# --------------------------------------------------------------------------
# monomial arithmetic


def _acc(out: dict, m, c):
    v = out.get(m)
    if v is None:
        out[m] = c
    else:
        v = norm(v + c)
        if v:
            out[m] = v
        else:
            del out[m]


def _merge_plain(m1, m2):
    d = dict(m1)
    for a, k in m2:
        s = d.get(a, 0) + k
        if s:
            d[a] = s
        else:
            del d[a]
    return tuple(sorted(d.items(), key=_fkey))


def _merge_general(ctx: Context, monos) -> dict:
    powers: dict = {}
    exparg = None
    for m in monos:
        for a, k in m:
            if a.tag == EXP:
                arg = a.arg if k == 1 else a.arg * k
                exparg = arg if exparg is None else exparg + arg
            elif a.tag == POWER:
                powers[a.base] = norm(powers.get(a.base, ZERO) + a.exp * k)
            else:
                powers[a] = powers.get(a, 0) + k
    return _assemble(ctx, powers, exparg)


def _assemble(ctx: Context, powers: dict, exparg) -> dict:
    plain = []
    expand = []
    for base, e in powers.items():
        e = norm(to_coef(e))
        n = as_integer(e)
        if n is not None:
            if n == 0:
                continue
            if isinstance(base, Atom):
                plain.append((base, n))
            else:
                expand.append(expr_power(base, n))
        else:
            plain.append((PowerAtom(base, e), 1))
    if exparg is not None and exparg.terms:
        plain.append((ExpAtom(exparg), 1))
    terms = {tuple(sorted(plain, key=_fkey)): ONE}
    for x in expand:
        terms = _mul_terms(ctx, terms, x.terms)
    return terms


def _mul_terms(ctx: Context, t1: dict, t2: dict) -> dict:
    out: dict = {}
    for m1, c1 in t1.items():
        p1 = _is_plain(m1)
        for m2, c2 in t2.items():
            c = norm(c1 * c2)
            if not m1:
                _acc(out, m2, c)
            elif not m2:
                _acc(out, m1, c)
            elif p1 and _is_plain(m2):
                _acc(out, _merge_plain(m1, m2), c)
            else:
                for m, cm in _merge_general(ctx, (m1, m2)).items():
                    _acc(out, m, norm(c * cm))
    return out


def _acc_product(ctx: Context, out: dict, rest, c, terms: dict):
    """out += c * rest * terms."""
    plain = _is_plain(rest)
    for m2, c2 in terms.items():
        cc = norm(c * c2)
        if not rest:
            _acc(out, m2, cc)
        elif not m2:
            _acc(out, rest, cc)
        elif plain and _is_plain(m2):
            _acc(out, _merge_plain(rest, m2), cc)
        else:
            for m, cm in _merge_general(ctx, (rest, m2)).items():
                _acc(out, m, norm(cc * cm))


def _join_ctx(a: Context, b: Context) -> Context:
    if a is b or a == b:
        return a
    if a.extends(b):
        return a
    if b.extends(a):
        return b
    raise ExprError("expressions belong to incompatible contexts")


# --------------------------------------------------------------------------
# Expr


class Expr:
    """Immutable canonical expression.  ``terms`` must never be mutated."""

    __slots__ = ("ctx", "terms", "_hash", "_key")

    def __init__(self, ctx: Context, terms: dict):
        self.ctx = ctx
        self.terms = terms
        self._hash = None
        self._key = None

    # -- coercion ------------------------------------------------------------

    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            return other
        return self.ctx.const(other)

    def retag(self, ctx: Context) -> "Expr":
        """Reinterpret under a compatible context (shares the term map)."""
        return self if ctx is self.ctx else Expr(ctx, self.terms)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        ctx = _join_ctx(self.ctx, other.ctx)
        if not self.terms:
            return other.retag(ctx)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _acc(out, m, c)
        return Expr(ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Expr):
            c = to_coef(other)
            if not c:
                return self.ctx.zero()
            return Expr(self.ctx, {m: norm(v * c) for m, v in self.terms.items()})
        ctx = _join_ctx(self.ctx, other.ctx)
        return Expr(ctx, _mul_terms(ctx, self.terms, other.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * invert(other)

    def __rtruediv__(self, other):
        return self._coerce(other) * invert(self)

    def __pow__(self, q):
        return expr_power(self, q)

    # -- identity -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, type(ONE))):
            return self.terms == self.ctx.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    @property
    def key(self):
        if self._key is None:
            self._key = tuple(
                sorted((tuple((a.key, k) for a, k in m), str(c)) for m, c in self.terms.items())
            )
        return self._key

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"Expr({self})"

    def __str__(self):
        from .printer import to_text

        return to_text(self)

    # -- inspection -------------------------------------------------------

    def atoms(self) -> set[Atom]:
        """All atoms, including those nested inside powers and exponentials."""
        out: set[Atom] = set()
        for m in self.terms:
            for a, _ in m:
                out.add(a)
                if a.tag >= POWER:
                    out |= a.inner_atoms()
        return out

    def jet_atoms(self) -> set[JetAtom]:
        return {a for a in self.atoms() if a.tag == JET}

    def unknown_atoms(self) -> set[UnknownDeriv]:
        return {a for a in self.atoms() if a.tag == UNKNOWN}

    def jet_order(self) -> int:
        return max((a.order for a in self.jet_atoms()), default=0)

    def free_of(self, pred: Callable[[Atom], bool]) -> bool:
        return not any(pred(a) for a in self.atoms())

    def constant_value(self):
        """The coefficient if the expression is a constant, else None."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: tuple((a.key, k) for a, k in mc[0]))

    def leading(self):
        """(monomial, coefficient) first in canonical order."""
        return self.sorted_terms()[0]

    def monic(self) -> "Expr":
        if not self.terms:
            return self
        return self * (ONE / self.leading()[1])

    def normalize(self) -> "Expr":
        """Rebuild from scratch; identity on canonical input."""
        out = self.ctx.zero()
        for m, c in self.terms.items():
            term = self.ctx.const(c)
            for a, k in m:
                if a.tag == POWER:
                    term = term * expr_power(a.base_expr(self.ctx).normalize(), a.exp)
                elif a.tag == EXP:
                    term = term * exp(a.arg.normalize())
                else:
                    term = term * atom_expr(self.ctx, a, k)
            out = out + term
        return out


def monomial_expr(ctx: Context, m) -> Expr:
    return Expr(ctx, {m: ONE})


# --------------------------------------------------------------------------
# powers, inverses, exponentials


def invert(e: Expr) -> Expr:
    if len(e.terms) != 1:
        raise NotRepresentable(f"cannot divide by non-monomial {e}")
    (m, c), = e.terms.items()
    neg = tuple((a, -k) for a, k in m if a.tag < POWER)
    extra = []
    for a, _ in m:
        if a.tag == POWER:
            extra.append(((PowerAtom(a.base, norm(-a.exp)), 1),))
        elif a.tag == EXP:
            extra.append(((ExpAtom(-a.arg), 1),))
    terms = _merge_general(e.ctx, (neg, *extra)) if extra else {neg: ONE}
    inv = norm(ONE / c)
    return Expr(e.ctx, {mm: norm(cm * inv) for mm, cm in terms.items()})


def expr_power(e: Expr, q) -> Expr:
    q = to_coef(q)
    n = as_integer(q)
    if n is not None:
        if n < 0:
            return expr_power(invert(e), -n)
        result = e.ctx.one()
        base = e
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result
    if not e.terms:
        raise NotRepresentable("zero raised to a non-integer power")
    if len(e.terms) == 1:
        (m, c), = e.terms.items()
        if not m:
            raise NotRepresentable(f"constant {c} raised to non-integer power")
        if c == ONE:
            powers: dict = {}
            exparg = None
            for a, k in m:
                if a.tag == EXP:
                    arg = a.arg * norm(q * k)
                    exparg = arg if exparg is None else exparg + arg
                elif a.tag == POWER:
                    powers[a.base] = norm(powers.get(a.base, ZERO) + a.exp * k * q)
                else:
                    powers[a] = norm(powers.get(a, ZERO) + q * k)
            return Expr(e.ctx, _assemble(e.ctx, powers, exparg))
    return Expr(e.ctx, {((PowerAtom(e, q), 1),): ONE})


def exp(arg: Expr) -> Expr:
    if not arg.terms:
        return arg.ctx.one()
    return atom_expr(arg.ctx, ExpAtom(arg))


# --------------------------------------------------------------------------
# derivations


def derive(e: Expr, plain_rule: Callable[[Atom], Expr | None], coef_rule=None) -> Expr:
    """Apply the derivation fixed by its value on plain atoms.

    ``plain_rule`` returns the image of an atom or None for zero; powers and
    exponentials follow by the chain rule.
    """
    ctx = e.ctx
    memo: dict = {}

    def d_atom(a):
        if a in memo:
            return memo[a]
        if a.tag == POWER:
            base = a.base_expr(ctx).retag(ctx)
            db = derive(base, plain_rule, coef_rule)
            r = expr_power(base, norm(a.exp - 1)) * db * a.exp if db.terms else None
        elif a.tag == EXP:
            da = derive(a.arg.retag(ctx), plain_rule, coef_rule)
            r = atom_expr(ctx, a) * da if da.terms else None
        else:
            r = plain_rule(a)
        r = r.terms if r is not None and r.terms else None
        memo[a] = r
        return r

    out: dict = {}
    for m, c in e.terms.items():
        if coef_rule is not None:
            dc = coef_rule(c)
            if dc:
                _acc(out, m, dc)
        for i, (a, k) in enumerate(m):
            da = d_atom(a)
            if da is None:
                continue
            rest = m[:i] + m[i + 1:] if k == 1 else m[:i] + ((a, k - 1),) + m[i + 1:]
            _acc_product(ctx, out, rest, norm(c * k), da)
    return Expr(ctx, out)


def _coordinate(ctx: Context, v) -> Atom | str:
    if isinstance(v, Atom):
        return v
    kind = ctx.kind(v)
    if kind == "indep":
        return IndepVar(ctx.indep_vars.index(v), v)
    if kind == "dep":
        return JetAtom(())
    if kind == "param":
        return v
    raise ExprError(f"cannot differentiate with respect to {v!r}")


def diff(e: Expr, v, ctx: Context | None = None) -> Expr:
    """Partial derivative; jet coordinates are independent of each other."""
    ctx = ctx or e.ctx
    e = e.retag(ctx) if ctx.extends(e.ctx) else e
    target = _coordinate(ctx, v)
    if isinstance(target, str):
        f = ctx.field
        for a in e.atoms():
            if a.tag == POWER and f.depends_on(a.exp, target):
                raise NotRepresentable("derivative of a parameter-dependent exponent needs log")
        return derive(e, lambda a: None, lambda c: f.diff(c, target))
    if target.tag == INDEP:
        name = target.name
    elif target.tag == JET and target.index == ():
        name = ctx.dep_var
    else:
        name = None
    one = ctx.one()

    def rule(a):
        if a == target:
            return one
        if name is not None and a.tag == UNKNOWN:
            args = ctx.fn_args(a.fn)
            if name in args:
                return atom_expr(ctx, a.extend(args.index(name)))
        return None

    return derive(e, rule)


def rewrite_atoms(e: Expr, image: Callable[[Atom], Expr | None]) -> Expr:
    """Replace plain atoms by expressions, also inside powers and exponentials."""
    ctx = e.ctx
    memo: dict = {}

    def img(a):
        if a in memo:
            return memo[a]
        if a.tag == POWER:
            base = a.base_expr(ctx)
            nb = rewrite_atoms(base, image)
            r = None if nb == base else expr_power(nb, a.exp)
        elif a.tag == EXP:
            na = rewrite_atoms(a.arg, image)
            r = None if na == a.arg else exp(na)
        else:
            r = image(a)
        memo[a] = r
        return r

    out: dict = {}
    for m, c in e.terms.items():
        kept = []
        changed = []
        for a, k in m:
            r = img(a)
            if r is None:
                kept.append((a, k))
            else:
                changed.append((r, k))
        if not changed:
            _acc(out, m, c)
            continue
        # dropping factors from a canonical monomial keeps it canonical
        prod = Expr(ctx, {tuple(kept): c})
        for r, k in changed:
            prod = prod * (r if k == 1 else expr_power(r.retag(ctx), k))
            if not prod.terms:
                break
        for mm, cm in prod.terms.items():
            _acc(out, mm, cm)
    return Expr(ctx, out)


def substitute(e: Expr, target: Atom, replacement: Expr) -> Expr:
    return rewrite_atoms(e, lambda a: replacement if a == target else None)


def substitute_many(e: Expr, mapping: Mapping[Atom, Expr]) -> Expr:
    if not mapping:
        return e
    return rewrite_atoms(e, mapping.get)


def is_zero(e: Expr) -> bool:
    return not e.terms


def collect(e: Expr, carrier: Callable[[Atom], bool], transcendental: bool = False) -> dict:
    """Split ``e`` as a sum of carrier monomials times carrier-free coefficients.

    Returns ``{carrier monomial: coefficient Expr}``.  Carrier atoms nested in
    a power or exponential raise :class:`NonPolynomialCarrier`, unless
    ``transcendental`` is set; then powers whose base is built from carriers
    only, and the carrier-only part of an exponential's argument, go into
    the key.
    """
    ctx = e.ctx
    groups: dict = {}
    for m, c in e.terms.items():
        key, rest = [], []
        kexp = rexp = None
        for a, k in m:
            if a.tag < POWER:
                (key if carrier(a) else rest).append((a, k))
                continue
            inner = a.inner_atoms()
            nested = [b for b in inner if b.tag < POWER and carrier(b)]
            if not nested:
                rest.append((a, k))
                continue
            if not transcendental:
                from .printer import atom_text

                raise NonPolynomialCarrier(f"non-polynomial carrier: {atom_text(a, e.ctx)}")
            if a.tag == POWER:
                if not all(carrier(b) for b in inner if b.tag < POWER):
                    raise NonPolynomialCarrier(f"power mixes carrier and other atoms: {a!r}")
                key.append((a, k))
                continue
            pure, free = {}, {}
            for am, ac in a.arg.terms.items():
                flags = set()
                for b, _ in am:
                    sub = {b} | b.inner_atoms()
                    flags |= {carrier(s) for s in sub if s.tag < POWER}
                if flags == {True}:
                    pure[am] = ac
                elif True in flags:
                    raise NonPolynomialCarrier(f"exponent mixes carrier and other atoms: {a!r}")
                else:
                    free[am] = ac
            kexp = Expr(ctx, pure) if pure else None
            rexp = Expr(ctx, free) if free else None
        kmono = tuple(key)
        if kexp is not None:
            kmono = tuple(sorted(key + [(ExpAtom(kexp), 1)], key=_fkey))
        rmono = tuple(rest)
        if rexp is not None:
            rmono = tuple(sorted(rest + [(ExpAtom(rexp), 1)], key=_fkey))
        bucket = groups.setdefault(kmono, {})
        _acc(bucket, rmono, c)
    return {k: Expr(ctx, v) for k, v in groups.items() if v}


def monomial_key(m):
    return tuple((a.key, k) for a, k in m)


def multi_indices(n: int, k: int):
    """All sorted multi-indices of order k over axes 0..n-1."""
    return list(combinations_with_replacement(range(n), k))
