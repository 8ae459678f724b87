"""Recursive-descent parser for the expression grammar.

Grammar (whitespace insignificant)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' exponent)?
    exponent:= ('+' | '-')* (INT | '(' sum ')')
    atom    := INT | NAME | ('sin' | 'cos') '(' sum ')' | '(' sum ')'

Division is accepted when the divisor is a single phi-free term, which
covers rationals ``p/q`` and Laurent factors such as ``u/ell^2``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .expr import (JETS, PHI, RESERVED, ExponentError, Expr, ExprError,
                   TrigArgumentError, _phi_multiple)

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-z][a-z0-9_]*)|(\S))")


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break  # trailing whitespace
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", start)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ExprSyntaxError(f"expected {op!r}", tok[2])
        return tok

    def parse(self) -> Expr:
        e = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return e

    def sum(self) -> Expr:
        e = self.product()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.product()
            e = e + rhs if op == "+" else e - rhs
        return e

    def product(self) -> Expr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                e = e * rhs
            else:
                try:
                    e = e / rhs
                except ExprError as exc:
                    raise ExprSyntaxError(f"invalid divisor ({exc})", tok[2]) from None
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            e = self.unary()
            return -e if tok[1] == "-" else e
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            n = self.exponent()
            try:
                return base ** n
            except ExponentError:
                raise
            except ExprError as exc:
                raise ExprSyntaxError(str(exc), tok[2]) from None
        return base

    def exponent(self) -> int:
        sign = 1
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            if self.take()[1] == "-":
                sign = -sign
        tok = self.take()
        if tok[0] == "int":
            return sign * tok[1]
        if tok[0] == "op" and tok[1] == "(":
            e = self.sum()
            self.expect(")")
            if not e.is_constant():
                raise ExponentError(f"exponent {e} is not a constant integer")
            q = e.as_fraction()
            if q.denominator != 1:
                raise ExponentError(f"non-integer exponent {q}")
            return sign * q.numerator
        if tok[0] == "name":
            raise ExponentError(f"symbolic exponent {tok[1]!r} at position {tok[2]}")
        raise ExprSyntaxError("expected integer exponent", tok[2])

    def atom(self) -> Expr:
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            return Expr.const(Fraction(val))
        if kind == "name":
            if val in ("sin", "cos"):
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                m = _phi_multiple(arg)
                if m is None:
                    raise TrigArgumentError(
                        f"argument of {val} must be an integer multiple of phi, got {arg}"
                        f" (position {pos})")
                return Expr.trig(val, m)
            if val in RESERVED - {PHI, *JETS}:
                raise ExprSyntaxError(f"{val!r} is not a symbol", pos)
            return Expr.symbol(val)
        if kind == "op" and val == "(":
            e = self.sum()
            self.expect(")")
            return e
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected token {val!r}", pos)


def parse(text: str) -> Expr:
    """Parse ``text`` into a canonical :class:`Expr`."""
    return _Parser(text).parse()


__all__ = ["parse", "ExprSyntaxError", "PHI"]
