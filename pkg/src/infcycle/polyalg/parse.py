"""Infix polynomial parser: ``x^2*y - 3/2*z``, parentheses, rational constants.

Division by a non-constant is accepted and produces a rational expression
(numerator, denominator); callers that need a polynomial use ``parse_poly``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import Poly


class PolyParseError(ValueError):
    def __init__(self, message: str, column: int, text: str = ""):
        super().__init__(f"{message} at column {column + 1}" + (f" in {text!r}" if text else ""))
        self.message = message
        self.column = column


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


@dataclass(frozen=True)
class RationalExpr:
    num: Poly
    den: Poly

    def __add__(self, o):
        return RationalExpr(self.num * o.den + o.num * self.den, self.den * o.den) if self.den != o.den else RationalExpr(self.num + o.num, self.den)

    def __sub__(self, o):
        return self + RationalExpr(-o.num, o.den)

    def __mul__(self, o):
        return RationalExpr(self.num * o.num, self.den * o.den)

    def __truediv__(self, o):
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        return RationalExpr(self.num * o.den, self.den * o.num)


def _tokenize(text: str):
    pos = 0
    toks = []
    text_len = len(text)
    while pos < text_len:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            ws = len(text[pos:]) - len(text[pos:].lstrip())
            raise PolyParseError(f"unexpected character {text[pos + ws]!r}", pos + ws, text)
        start = m.start(m.lastindex)
        num, ident, op = m.groups()
        if num is not None:
            toks.append(("num", num, start))
        elif ident is not None:
            toks.append(("id", ident, start))
        else:
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(("end", "", text_len))
    return toks


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = {n: i for i, n in enumerate(names)}
        self.n = len(names)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def const(self, c) -> RationalExpr:
        return RationalExpr(Poly.const(self.n, c), Poly.const(self.n, 1))

    def parse(self) -> RationalExpr:
        if self.peek()[0] == "end":
            raise PolyParseError("empty expression", 0, self.text)
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolyParseError(f"unexpected {val!r}", pos, self.text)
        return e

    def expr(self) -> RationalExpr:
        left = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self) -> RationalExpr:
        left = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            _, op, pos = self.take()
            right = self.unary()
            if op == "*":
                left = left * right
            else:
                if right.num.is_zero():
                    raise PolyParseError("division by zero", pos, self.text)
                left = left / right
        return left

    def unary(self) -> RationalExpr:
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return inner if val == "+" else RationalExpr(-inner.num, inner.den)
        return self.power()

    def power(self) -> RationalExpr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or "." in val:
                raise PolyParseError("exponent must be a nonnegative integer", pos, self.text)
            k = int(val)
            return RationalExpr(base.num ** k, base.den ** k)
        return base

    def atom(self) -> RationalExpr:
        kind, val, pos = self.take()
        if kind == "num":
            if "." in val:
                return self.const(Fraction(val))
            return self.const(int(val))
        if kind == "id":
            if val not in self.names:
                raise PolyParseError(f"unknown variable {val!r}", pos, self.text)
            return RationalExpr(Poly.var(self.n, self.names[val]), Poly.const(self.n, 1))
        if (kind, val) == ("op", "("):
            e = self.expr()
            k2, v2, p2 = self.take()
            if (k2, v2) != ("op", ")"):
                raise PolyParseError("expected ')'", p2, self.text)
            return e
        raise PolyParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse_rational(text: str, names: Sequence[str]) -> RationalExpr:
    return _Parser(text, names).parse()


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    r = parse_rational(text, names)
    if not r.den.is_constant():
        raise PolyParseError("division by a non-constant polynomial is not allowed here", 0, text)
    return r.num * (Fraction(1) / r.den.constant_term())


def split_list(text: str) -> list[str]:
    """Split a comma-separated list, respecting parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or out:
        out.append(tail)
    return [s for s in out]
