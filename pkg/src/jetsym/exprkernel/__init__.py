"""Exact symbolic expressions over jet space."""

from .coef import CoefField, field_for
from .expr import (
    EXP,
    INDEP,
    JET,
    POWER,
    UNKNOWN,
    Atom,
    Context,
    ExpAtom,
    Expr,
    ExprError,
    IndepVar,
    JetAtom,
    NonPolynomialCarrier,
    NotRepresentable,
    PowerAtom,
    UnknownDeriv,
    atom_expr,
    collect,
    derive,
    diff,
    exp,
    expr_power,
    invert,
    is_zero,
    monomial_expr,
    monomial_key,
    multi_indices,
    rewrite_atoms,
    substitute,
    substitute_many,
)
from .parser import ParseError, parse_expr
from .printer import atom_text, monomial_text, to_text

__all__ = [name for name in dir() if not name.startswith("_")]
