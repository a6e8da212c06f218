"""Sparse multivariate polynomials with rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Monomial = tuple  # exponent vector


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# -- monomial orders ---------------------------------------------------------

def degrevlex_key(weights: Sequence[int] | None = None) -> Callable[[Monomial], tuple]:
    """Sort key: larger key means larger monomial (weighted degree, then revlex)."""
    if weights is None:
        return lambda e: (sum(e), tuple(-x for x in reversed(e)))
    w = tuple(weights)
    return lambda e: (sum(a * b for a, b in zip(w, e)), tuple(-x for x in reversed(e)))


def lex_key() -> Callable[[Monomial], tuple]:
    return lambda e: e


def elimination_key(k: int, weights: Sequence[int] | None = None) -> Callable[[Monomial], tuple]:
    """Block order eliminating the first ``k`` variables, degrevlex inside."""
    inner = degrevlex_key(weights)
    return lambda e: (sum(e[:k]), inner(e))


def order_key(name: str, nvars: int, weights: Sequence[int] | None = None):
    if name == "degrevlex":
        return degrevlex_key(weights)
    if name == "lex":
        return lex_key()
    if name.startswith("elim"):
        k = int(name[4:] or 1)
        return elimination_key(k, weights)
    raise ValueError(f"unknown monomial order {name!r}")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


class Poly:
    """Immutable polynomial: map from exponent tuples to nonzero Fractions."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                c = _frac(c)
                if c:
                    if len(e) != nvars:
                        raise ValueError("exponent length does not match variable count")
                    clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = _frac(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int, power: int = 1) -> "Poly":
        e = [0] * nvars
        e[i] = power
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exp: Monomial, c=1) -> "Poly":
        return cls(len(exp), {tuple(exp): c})

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self, weights: Sequence[int] | None = None) -> int:
        if not self.terms:
            return -1
        if weights is None:
            return max(sum(e) for e in self.terms)
        return max(sum(a * b for a, b in zip(weights, e)) for e in self.terms)

    def min_degree(self, weights: Sequence[int] | None = None) -> int:
        if not self.terms:
            return -1
        w = weights or (1,) * self.nvars
        return min(sum(a * b for a, b in zip(w, e)) for e in self.terms)

    def is_homogeneous(self, weights: Sequence[int] | None = None) -> bool:
        w = weights or (1,) * self.nvars
        degs = {sum(a * b for a, b in zip(w, e)) for e in self.terms}
        return len(degs) <= 1

    def variables_used(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in rings of different size")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _frac(other)
            if not c:
                return Poly._raw(self.nvars, {})
            return Poly._raw(self.nvars, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Poly":
        return self * (Fraction(1) / _frac(c))

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def mul_term(self, exp: Monomial, c) -> "Poly":
        c = _frac(c)
        return Poly._raw(
            self.nvars,
            {tuple(x + y for x, y in zip(e, exp)): c * v for e, v in self.terms.items()},
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution -------------------------------------
    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                out[tuple(e2)] = c * k
        return Poly._raw(self.nvars, out)

    def substitute(self, images: Sequence["Poly"], nvars_out: int | None = None) -> "Poly":
        """Ring map sending variable i to images[i]."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        n = nvars_out if nvars_out is not None else (images[0].nvars if images else 0)
        result = Poly._raw(n, {})
        cache: dict = {}
        for e, c in self.terms.items():
            term = Poly.const(n, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            result = result + term
        return result

    def embed(self, positions: Sequence[int], nvars_out: int) -> "Poly":
        """Rename variable i to variable positions[i] in a ring with nvars_out variables."""
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars_out
            for i, k in enumerate(e):
                if k:
                    e2[positions[i]] += k
            e2 = tuple(e2)
            out[e2] = out.get(e2, 0) + c
        return Poly(nvars_out, out)

    def evaluate(self, values: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(values, e):
                if k:
                    t *= _frac(v) ** k
            total += t
        return total

    # -- ordered access ------------------------------------------------
    def leading(self, key) -> tuple[Monomial, Fraction]:
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def sorted_terms(self, key, reverse: bool = True) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=reverse)

    def monic(self, key) -> "Poly":
        if not self.terms:
            return self
        _, c = self.leading(key)
        return self * (Fraction(1) / c)

    def content_normalized(self, key) -> "Poly":
        return self.monic(key)

    def format(self, names: Sequence[str], key=None) -> str:
        return format_poly(self, names, key)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self, [f'x{i}' for i in range(self.nvars)])})"


def format_monomial(e: Monomial, names: Sequence[str]) -> str:
    parts = []
    for n, k in zip(names, e):
        if k == 1:
            parts.append(n)
        elif k > 1:
            parts.append(f"{n}^{k}")
    return "*".join(parts) if parts else "1"


def _format_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly, names: Sequence[str], key=None) -> str:
    if not p.terms:
        return "0"
    key = key or degrevlex_key()
    out = []
    for e, c in p.sorted_terms(key):
        mono = format_monomial(e, names)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono == "1":
            body = _format_coef(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coef(a)}*{mono}"
        out.append((sign, body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


def poly_from_terms(nvars: int, items: Iterable[tuple[Monomial, object]]) -> Poly:
    out: dict = {}
    for e, c in items:
        out[e] = out.get(e, 0) + _frac(c)
    return Poly(nvars, out)
