"""Buchberger's algorithm, normal forms with quotients, and ``PolyContext``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .parse import parse_poly, parse_rational
from .poly import (
    Poly,
    mono_div,
    mono_divides,
    mono_lcm,
    order_key,
)


def _lm_table(G: Sequence[Poly], key):
    return [g.leading(key) for g in G]


def reduce_full(p: Poly, G: Sequence[Poly], key, lms=None, track: bool = False):
    """Full reduction of ``p`` by ``G``.

    Returns ``(remainder, quotients)``; ``quotients`` is None unless ``track``.
    p = sum(q_j * G[j]) + remainder and no term of remainder is divisible by a
    leading monomial of G.
    """
    n = p.nvars
    if lms is None:
        lms = _lm_table(G, key)
    cur = dict(p.terms)
    rem: dict = {}
    quots = [dict() for _ in G] if track else None
    while cur:
        lm = max(cur, key=key)
        c = cur[lm]
        for j, (glm, glc) in enumerate(lms):
            if mono_divides(glm, lm):
                shift = mono_div(lm, glm)
                q = c / glc
                for e, v in G[j].terms.items():
                    e2 = tuple(a + b for a, b in zip(e, shift))
                    s = cur.get(e2, 0) - q * v
                    if s:
                        cur[e2] = s
                    else:
                        cur.pop(e2, None)
                if track:
                    quots[j][shift] = quots[j].get(shift, 0) + q
                break
        else:
            rem[lm] = c
            del cur[lm]
    remainder = Poly._raw(n, rem)
    if track:
        return remainder, [Poly(n, q) for q in quots]
    return remainder, None


def _spoly(f: Poly, g: Poly, key, lf, lg) -> tuple[Poly, tuple, tuple, Fraction, Fraction]:
    (ef, cf), (eg, cg) = lf, lg
    L = mono_lcm(ef, eg)
    sf = mono_div(L, ef)
    sg = mono_div(L, eg)
    s = f.mul_term(sf, Fraction(1) / cf) - g.mul_term(sg, Fraction(1) / cg)
    return s, sf, sg, cf, cg


def buchberger(F: Sequence[Poly], key, track: bool = False):
    """Reduced Groebner basis of the ideal generated by F.

    With ``track`` the second return value gives, for each basis element, a
    cofactor list expressing it in terms of F.
    """
    gens = [f for f in F if not f.is_zero()]
    if not gens:
        return [], ([] if track else None)
    n = gens[0].nvars
    m = len(F)
    zero = Poly.const(n, 0)

    G: list[Poly] = []
    C: list[list[Poly]] = []
    lms: list = []

    def unit_cof(i):
        return [Poly.const(n, 1) if k == i else zero for k in range(m)]

    pending: set = set()

    def add(g: Poly, cof):
        _, lc = g.leading(key)
        inv = Fraction(1) / lc
        g = g * inv
        cof = [c * inv for c in cof] if track else None
        idx = len(G)
        G.append(g)
        C.append(cof)
        lms.append(g.leading(key))
        for i in range(idx):
            pending.add((i, idx))

    for i, f in enumerate(F):
        if f.is_zero():
            continue
        r, q = reduce_full(f, G, key, lms, track) if G else (f, None)
        if r.is_zero():
            continue
        cof = None
        if track:
            cof = unit_cof(i)
            if q is not None:
                for j, qj in enumerate(q):
                    if qj:
                        cof = [a - qj * b for a, b in zip(cof, C[j])]
        add(r, cof)

    done: set = set()
    while pending:
        i, j = min(pending, key=lambda ij: key(mono_lcm(lms[ij[0]][0], lms[ij[1]][0])))
        pending.discard((i, j))
        done.add((i, j))
        ei, ej = lms[i][0], lms[j][0]
        L = mono_lcm(ei, ej)
        # Buchberger's first criterion: coprime leading monomials
        if all(a == 0 or b == 0 for a, b in zip(ei, ej)):
            continue
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not mono_divides(lms[k][0], L):
                continue
            a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
            if a not in pending and b not in pending:
                skip = True
                break
        if skip:
            continue
        s, si, sj, ci, cj = _spoly(G[i], G[j], key, lms[i], lms[j])
        r, q = reduce_full(s, G, key, lms, track)
        if r.is_zero():
            continue
        cof = None
        if track:
            cof = [a.mul_term(si, Fraction(1) / ci) - b.mul_term(sj, Fraction(1) / cj) for a, b in zip(C[i], C[j])]
            for k, qk in enumerate(q):
                if qk:
                    cof = [a - qk * b for a, b in zip(cof, C[k])]
        add(r, cof)

    # minimalise
    order = sorted(range(len(G)), key=lambda t: key(lms[t][0]))
    keep = []
    for t in order:
        if not any(mono_divides(lms[u][0], lms[t][0]) for u in keep):
            keep.append(t)
    Gm = [G[t] for t in keep]
    Cm = [C[t] for t in keep]
    # interreduce
    out, outc = [], []
    for a in range(len(Gm)):
        others = Gm[:a] + Gm[a + 1:]
        r, q = reduce_full(Gm[a], others, key, None, track) if others else (Gm[a], None)
        # leading term survives (minimal basis), so r is nonzero with the same LM
        _, lc = r.leading(key)
        r = r * (Fraction(1) / lc)
        cof = None
        if track:
            cof = list(Cm[a])
            if q is not None:
                oc = Cm[:a] + Cm[a + 1:]
                for k, qk in enumerate(q):
                    if qk:
                        cof = [x - qk * y for x, y in zip(cof, oc[k])]
            cof = [x * (Fraction(1) / lc) for x in cof]
        out.append(r)
        outc.append(cof)
    # sort reduced basis by leading monomial, ascending, for deterministic output
    idx = sorted(range(len(out)), key=lambda t: key(out[t].leading(key)[0]))
    out = [out[t] for t in idx]
    outc = [outc[t] for t in idx] if track else None
    return out, outc


@dataclass
class Membership:
    """Outcome of an ideal-membership test.

    ``cofactors`` (when a member) satisfy ``p == sum(c*g for c, g in zip(cofactors, generators))``;
    otherwise ``normal_form`` is the nonzero remainder modulo the Groebner basis.
    """

    member: bool
    cofactors: list[Poly] | None
    normal_form: Poly

    def __iter__(self):
        yield self.member
        yield self.cofactors if self.member else self.normal_form


@dataclass
class PolyContext:
    """Polynomial ring over Q with an ideal of relations and a monomial order."""

    variables: tuple
    relations: list = field(default_factory=list)
    order: str = "degrevlex"
    weights: tuple | None = None

    def __post_init__(self):
        self.variables = tuple(self.variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        if self.order not in ("degrevlex", "lex") and not self.order.startswith("elim"):
            raise ValueError(f"unknown monomial order {self.order!r}")
        if self.weights is not None:
            self.weights = tuple(int(w) for w in self.weights)
            if len(self.weights) != len(self.variables):
                raise ValueError("one weight per variable required")
        rels = []
        for r in self.relations:
            if isinstance(r, str):
                r = self.parse(r)
            if r.nvars != self.nvars:
                raise ValueError("relation lives in a different ring")
            rels.append(r)
        self.relations = rels
        self._gb = None
        self._gb_cof = None
        self.key = order_key(self.order, self.nvars, self.weights)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def degree_weights(self) -> tuple:
        return self.weights or (1,) * self.nvars

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self.variables)

    def parse_rational(self, text: str):
        return parse_rational(text, self.variables)

    def var(self, name: str) -> Poly:
        return Poly.var(self.nvars, self.variables.index(name))

    def const(self, c) -> Poly:
        return Poly.const(self.nvars, c)

    def fmt(self, p: Poly) -> str:
        return p.format(self.variables, self.key)

    def with_relations(self, extra: Sequence[Poly]) -> "PolyContext":
        return PolyContext(self.variables, list(self.relations) + list(extra), self.order, self.weights)

    # -- Groebner ------------------------------------------------------
    def groebner(self) -> list[Poly]:
        if self._gb is None:
            self._gb, _ = buchberger(self.relations, self.key)
        return self._gb

    def _tracked(self):
        if self._gb_cof is None:
            gb, cof = buchberger(self.relations, self.key, track=True)
            self._gb = gb
            self._gb_cof = cof
        return self._gb, self._gb_cof

    def leading_monomials(self) -> list[tuple]:
        return [g.leading(self.key)[0] for g in self.groebner()]

    def normal_form(self, p: Poly) -> Poly:
        gb = self.groebner()
        if not gb:
            return p
        r, _ = reduce_full(p, gb, self.key)
        return r

    def is_unit_ideal(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def ideal_member(self, p: Poly) -> Membership:
        gb, cof = self._tracked()
        n = self.nvars
        if not gb:
            if p.is_zero():
                return Membership(True, [Poly.const(n, 0) for _ in self.relations], p)
            return Membership(False, None, p)
        r, q = reduce_full(p, gb, self.key, track=True)
        if not r.is_zero():
            return Membership(False, None, r)
        m = len(self.relations)
        out = [Poly.const(n, 0) for _ in range(m)]
        for j, qj in enumerate(q):
            if qj:
                out = [a + qj * b for a, b in zip(out, cof[j])]
        return Membership(True, out, r)

    def contains_ideal(self, gens: Sequence[Poly]) -> bool:
        return all(self.normal_form(g).is_zero() for g in gens)

    def standard_monomials(self, limit: int = 100000) -> list[tuple]:
        """All standard monomials of a finite-dimensional quotient, ascending.

        Raises ValueError("not artinian") when the quotient is infinite-dimensional.
        """
        lms = self.leading_monomials()
        n = self.nvars
        for i in range(n):
            if not any(lm[i] > 0 and sum(lm) == lm[i] for lm in lms):
                raise ValueError("not artinian")
        if any(not any(lm) for lm in lms):
            return []
        seen = {(0,) * n}
        frontier = [(0,) * n]
        while frontier:
            nxt = []
            for e in frontier:
                for i in range(n):
                    e2 = e[:i] + (e[i] + 1,) + e[i + 1:]
                    if e2 in seen:
                        continue
                    if any(mono_divides(lm, e2) for lm in lms):
                        continue
                    seen.add(e2)
                    nxt.append(e2)
                    if len(seen) > limit:
                        raise ValueError("not artinian")
            frontier = nxt
        return sorted(seen, key=self.key)


def exact_divide(a: Poly, b: Poly) -> Poly | None:
    """a / b when b divides a exactly, else None."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    key = order_key("lex", a.nvars)
    r, q = reduce_full(a, [b], key, track=True)
    if not r.is_zero():
        return None
    return q[0]


def intersect_ideals(I: Sequence[Poly], J: Sequence[Poly], nvars: int) -> list[Poly]:
    """Generators of I ∩ J via elimination of an auxiliary variable."""
    n = nvars
    T = Poly.var(n + 1, 0)
    lift = lambda p: p.embed(list(range(1, n + 1)), n + 1)
    gens = [T * lift(f) for f in I] + [(Poly.const(n + 1, 1) - T) * lift(g) for g in J]
    gb, _ = buchberger(gens, order_key("elim1", n + 1))
    out = []
    for g in gb:
        if all(e[0] == 0 for e in g.terms):
            out.append(Poly(n, {e[1:]: c for e, c in g.terms.items()}))
    return out


def colon_ideal(I: Sequence[Poly], f: Poly, nvars: int) -> list[Poly]:
    """Generators of (I : f)."""
    if f.is_zero():
        return [Poly.const(nvars, 1)]
    inter = intersect_ideals(I, [f], nvars)
    out = []
    for g in inter:
        q = exact_divide(g, f)
        if q is None:
            raise ArithmeticError("intersection element not divisible by f")
        out.append(q)
    return out


# -- Hilbert series of monomial ideals -------------------------------------

def _tpoly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _tpoly_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def _minimal_monomials(gens):
    gens = sorted(set(gens), key=sum)
    out = []
    for g in gens:
        if not any(mono_divides(h, g) for h in out):
            out.append(g)
    return out


def hilbert_numerator(monomials: Sequence[tuple], weights: Sequence[int]) -> dict:
    """Numerator N(t) with HS(Q[x]/M) = N(t) / prod(1 - t^w_i)."""
    gens = _minimal_monomials(monomials)
    if not gens:
        return {0: 1}
    if any(not any(g) for g in gens):
        return {}
    *rest, m = gens
    deg = sum(a * b for a, b in zip(m, weights))
    first = hilbert_numerator(rest, weights)
    colon = [tuple(max(a - b, 0) for a, b in zip(g, m)) for g in rest]
    second = hilbert_numerator(colon, weights)
    return _tpoly_sub(first, _tpoly_mul({deg: 1}, second))
