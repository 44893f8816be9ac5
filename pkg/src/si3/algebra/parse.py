"""Recursive-descent parser for the expression syntax.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' uint)?
    base   := rational | 'i' | ident | 'sqrt' '(' uint ')' | '(' expr ')'
    rational := int ('/' uint)?

``ident`` is one of x, y, z, p1, p2, p3, a, b, c, d.  The leading minus and
``sqrt(n)`` (n squarefree over 2, 3, 5, 7) extend the base grammar so that
every printed polynomial can be read back.
"""
from __future__ import annotations

import re

from gmpy2 import mpq

from .field import ExtScalar
from .poly import VAR_INDEX, Poly
from .ratfn import RatFn


class ParseError(ValueError):
    def __init__(self, msg, pos, text=""):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos
        self.text = text


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0
        self._last_power = None

    def peek(self, off=0):
        return self.toks[min(self.k + off, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def expect_op(self, op):
        t = self.peek()
        if t[0] != "op" or t[1] != op:
            self.fail(f"expected '{op}'")
        self.take()

    def parse(self):
        r = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return r

    def expr(self):
        neg = False
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            neg = True
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                rhs = self.factor()
                if t[1] == "*":
                    acc = acc * rhs
                else:
                    if rhs.is_zero():
                        self.fail("division by zero", t)
                    if self._last_power is not None:
                        # keep (base)^n as a repeated denominator factor
                        base, e = self._last_power
                        acc = acc * RatFn.from_factors(1, {base: e})
                    else:
                        acc = acc / rhs
            else:
                return acc

    def factor(self):
        b = self.base()
        self._last_power = None
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "int":
                self.fail("expected unsigned integer exponent", e)
            if b.is_zero() and e[1] == 0:
                self.fail("0^0 is undefined", e)
            if b.is_polynomial() and not b.num.is_constant() and e[1] > 0:
                self._last_power = (b.num, e[1])
            b = b ** e[1]
        return b

    def base(self):
        t = self.take()
        kind, val, pos = t
        if kind == "int":
            nt, dt = self.peek(), self.peek(1)
            if nt[0] == "op" and nt[1] == "/" and dt[0] == "int":
                self.take()
                self.take()
                if dt[1] == 0:
                    self.fail("zero denominator", dt)
                return RatFn(Poly.const(_clean(mpq(val, dt[1]))))
            return RatFn(Poly.const(val))
        if kind == "name":
            if val == "i":
                return RatFn(Poly.const(ExtScalar.gen("i")))
            if val == "sqrt":
                self.expect_op("(")
                n = self.take()
                if n[0] != "int":
                    self.fail("expected integer in sqrt", n)
                try:
                    s = ExtScalar.sqrt(n[1])
                except ValueError:
                    self.fail("square root outside the coefficient field", n)
                self.expect_op(")")
                return RatFn(Poly.const(s))
            if val in VAR_INDEX:
                return RatFn(Poly.var(val))
            self.fail(f"unknown identifier '{val}'", t)
        if kind == "op" and val == "(":
            r = self.expr()
            self.expect_op(")")
            return r
        if kind == "end":
            self.fail("unexpected end of input", t)
        self.fail(f"unexpected '{val}'", t)


def _clean(q):
    return int(q.numerator) if q.denominator == 1 else q


def parse_expr(text: str) -> RatFn:
    """Parse an expression into an exact RatFn."""
    if not isinstance(text, str):
        raise TypeError("expression must be a string")
    return _Parser(text).parse()


def parse_poly(text: str) -> Poly:
    r = parse_expr(text)
    if not r.is_polynomial():
        raise ParseError("expected a polynomial", 0, text)
    return r.num
