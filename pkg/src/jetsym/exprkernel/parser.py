"""Recursive-descent parser for the expression grammar.

    expr     := term (("+" | "-") term)*
    term     := factor (("*" | "/") factor)*
    factor   := base ("^" exponent)?
    base     := NUMBER | IDENT | IDENT "[" names "]" | IDENT "(" names ")"
              | "(" expr ")" | "-" factor
    exponent := ["-"] NUMBER | IDENT | "(" expr ")"

Division is only accepted by monomials (or constants); ``u[x,x,t]`` is a jet
coordinate, ``f(u)`` an unknown function, ``f[u,u]`` its derivative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .coef import to_coef
from .expr import Context, Expr, ExprError, NotRepresentable, exp


class ParseError(ExprError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line, self.col = line, col


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\],]))")


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        start = pos
        if m is None or m.end() == pos:
            rest = text[pos:]
            stripped = rest.lstrip()
            where = pos + len(rest) - len(stripped)
            line = text.count("\n", 0, where) + 1
            col = where - (text.rfind("\n", 0, where) + 1) + 1
            if not stripped:
                out.append(Token("end", "", line, col))
                return out
            raise ParseError(f"unexpected character {stripped[0]!r}", line, col)
        kind = m.lastgroup
        where = m.start(kind)
        line = text.count("\n", 0, where) + 1
        col = where - (text.rfind("\n", 0, where) + 1) + 1
        out.append(Token(kind, m.group(kind), line, col))
        pos = m.end()
        assert pos > start


class Parser:
    def __init__(self, text: str, ctx: Context):
        self.ctx = ctx
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def eat(self, text=None, kind=None) -> Token:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = text or kind
            got = t.text or "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return t

    def at(self, text) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.eat().text
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.at("*") or self.at("/"):
            tok = self.eat()
            rhs = self.factor()
            if tok.text == "*":
                e = e * rhs
            else:
                if not rhs.terms:
                    raise self.error("division by zero", tok)
                try:
                    e = e / rhs
                except NotRepresentable as exc:
                    raise self.error(str(exc), tok) from None
        return e

    def factor(self) -> Expr:
        b = self.base()
        if self.at("^"):
            tok = self.eat("^")
            q = self.exponent()
            try:
                return b ** q
            except NotRepresentable as exc:
                raise self.error(str(exc), tok) from None
        return b

    def exponent(self):
        t = self.tok
        if self.at("-"):
            self.eat()
            return -to_coef(int(self.eat(kind="num").text))
        if t.kind == "num":
            self.eat()
            return to_coef(int(t.text))
        if t.kind == "id":
            self.eat()
            if self.ctx.kind(t.text) != "param":
                raise self.error(f"exponent {t.text!r} is not a parameter", t)
            return self.ctx.field.gen(t.text)
        if self.at("("):
            self.eat("(")
            e = self.expr()
            self.eat(")")
            q = e.constant_value()
            if q is None:
                raise self.error("exponent must depend on parameters only", t)
            return q
        raise self.error("bad exponent")

    def names(self, close: str) -> list[Token]:
        out = [self.eat(kind="id")]
        while self.at(","):
            self.eat(",")
            out.append(self.eat(kind="id"))
        self.eat(close)
        return out

    def base(self) -> Expr:
        t = self.tok
        ctx = self.ctx
        if self.at("-"):
            self.eat()
            return -self.factor()
        if self.at("("):
            self.eat("(")
            e = self.expr()
            self.eat(")")
            return e
        if t.kind == "num":
            self.eat()
            return ctx.const(int(t.text))
        if t.kind != "id":
            raise self.error(f"unexpected {t.text or 'end of input'!r}")
        self.eat()
        name = t.text
        kind = ctx.kind(name)
        if name == "exp":
            self.eat("(")
            arg = self.expr()
            self.eat(")")
            return exp(arg)
        if self.at("["):
            self.eat("[")
            idx = self.names("]")
            if kind == "dep":
                for tk in idx:
                    if ctx.kind(tk.text) != "indep":
                        raise self.error(f"{tk.text!r} is not an independent variable", tk)
                return ctx.jet(*[tk.text for tk in idx])
            if kind == "unknown":
                args = ctx.fn_args(name)
                for tk in idx:
                    if tk.text not in args:
                        raise self.error(f"{name} does not depend on {tk.text!r}", tk)
                return ctx.unknown(name, *[tk.text for tk in idx])
            raise self.error(f"cannot index {name!r}", t)
        if self.at("("):
            if kind != "unknown":
                raise self.error(f"unknown function {name!r}", t)
            self.eat("(")
            args = [tk.text for tk in self.names(")")]
            declared = list(ctx.fn_args(name))
            if args != declared:
                raise self.error(
                    f"arity violation: {name} takes ({', '.join(declared)}), got ({', '.join(args)})", t
                )
            return ctx.unknown(name)
        if kind in ("indep", "dep", "param"):
            return ctx.var(name)
        if kind == "unknown":
            raise self.error(f"arity violation: {name} needs its argument list", t)
        raise self.error(f"unknown identifier {name!r}", t)


def parse_expr(text: str, ctx: Context) -> Expr:
    return Parser(text, ctx).parse()
