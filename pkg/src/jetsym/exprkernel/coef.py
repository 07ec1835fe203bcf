"""Exact coefficient field Q(params).

Constants are kept as rationals (``QQ`` elements, gmpy2 ``mpq`` when
available); anything that actually depends on a parameter is a sympy
``FracElement`` of the rational function field over the parameters.  Every
arithmetic result is passed through :meth:`CoefField.norm` so a constant
never hides inside a ``FracElement``; equality of coefficients is then plain
``==``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import QQ
from sympy.polys.fields import FracElement

ZERO = QQ(0)
ONE = QQ(1)


def norm(c):
    """Collapse parameter-free field elements to plain rationals."""
    if isinstance(c, FracElement):
        num, den = c.numer, c.denom
        if num.is_ground and den.is_ground:
            return QQ(num.LC) / QQ(den.LC) if num else ZERO
    return c


def is_constant(c) -> bool:
    return not isinstance(c, FracElement)


def as_integer(c):
    """Return ``c`` as an ``int`` if it is an integer constant, else None."""
    if isinstance(c, int):
        return c
    if isinstance(c, FracElement):
        return None
    if c.denominator == 1:
        return int(c.numerator)
    return None


def to_coef(value):
    if isinstance(value, FracElement):
        return norm(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return value


def _rat_text(q) -> str:
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


class CoefField:
    """Q(p1, ..., pk) for a fixed ordered tuple of parameter names."""

    def __init__(self, params: tuple[str, ...]):
        self.params = tuple(params)
        self.field = QQ.frac_field(*self.params) if self.params else None

    def __repr__(self):
        return f"CoefField({', '.join(self.params) or 'Q'})"

    def gen(self, name: str):
        return self.field.gens[self.params.index(name)]

    def diff(self, c, name: str):
        if not isinstance(c, FracElement):
            return ZERO
        return norm(c.diff(self.gen(name)))

    def depends_on(self, c, name: str) -> bool:
        return self.diff(c, name) != 0

    # -- printing -----------------------------------------------------------

    def _poly_text(self, poly) -> str:
        parts = []
        for monom, coeff in poly.terms():
            factors = []
            for name, e in zip(self.params, monom):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            neg = coeff < 0
            mag = -coeff if neg else coeff
            if not factors:
                body = _rat_text(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _rat_text(mag) + "*" + "*".join(factors)
            parts.append((neg, body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def to_text(self, c) -> str:
        """Parseable text for a coefficient, parenthesised unless atomic."""
        if not isinstance(c, FracElement):
            return _rat_text(c)
        num = self._poly_text(c.numer)
        if c.denom.is_ground and c.denom.LC == 1:
            return num if len(c.numer.terms()) == 1 and "/" not in num else f"({num})"
        den = self._poly_text(c.denom)
        if len(c.numer.terms()) > 1 or num.startswith("-"):
            num = f"({num})"
        if len(c.denom.terms()) > 1 or "*" in den or "^" in den or "/" in den:
            den = f"({den})"
        return f"({num}/{den})"

    def sign_hint(self, c) -> int:
        """Sign of the leading numeric coefficient, used only for printing."""
        if not isinstance(c, FracElement):
            return -1 if c < 0 else 1
        return -1 if c.numer.LC < 0 else 1


@lru_cache(maxsize=None)
def field_for(params: tuple[str, ...]) -> CoefField:
    return CoefField(params)
