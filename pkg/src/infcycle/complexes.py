"""Chain complexes over Q and over polynomial contexts; Koszul complexes and Ext classes."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .exactla import RatMatrix, rank
from .polyalg.groebner import Membership, PolyContext
from .polyalg.poly import Poly, mono_divides


# -- complexes of finite-dimensional Q-vector spaces -------------------------

@dataclass
class ChainComplex:
    """Finite complex of Q-vector spaces; ``diffs[n]`` maps degree n to n + step."""

    ranks: dict[int, int]
    diffs: dict[int, RatMatrix]
    step: int = -1

    def rank_of(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def diff(self, n: int) -> RatMatrix:
        if n in self.diffs:
            return self.diffs[n]
        return RatMatrix.zero(self.rank_of(n + self.step), self.rank_of(n))

    def check_d2(self) -> bool:
        for n in self.ranks:
            if not (self.diff(n + self.step) @ self.diff(n)).is_zero():
                return False
        return True

    def homology_dim(self, n: int) -> int:
        out_rank = rank(self.diff(n))
        in_rank = rank(self.diff(n - self.step))
        return self.rank_of(n) - out_rank - in_rank


# -- Koszul data ----------------------------------------------------------------

@dataclass
class KoszulData:
    context: PolyContext
    sequence: list
    exponents: list = field(default_factory=list)

    def __post_init__(self):
        seq = []
        for f in self.sequence:
            if isinstance(f, str):
                f = self.context.parse(f)
            if not isinstance(f, Poly) or f.nvars != self.context.nvars:
                raise TypeError("sequence entries must be polynomials of the context")
            seq.append(f)
        if not seq:
            raise ValueError("empty sequence")
        self.sequence = seq
        if not self.exponents:
            self.exponents = [1] * len(seq)
        self.exponents = [int(a) for a in self.exponents]
        if len(self.exponents) != len(seq) or any(a < 1 for a in self.exponents):
            raise ValueError("one exponent >= 1 per sequence element")

    @property
    def length(self) -> int:
        return len(self.sequence)

    def powered(self) -> list[Poly]:
        return [f ** a for f, a in zip(self.sequence, self.exponents)]

    def at_level(self, exponents: Sequence[int]) -> "KoszulData":
        return KoszulData(self.context, list(self.sequence), list(exponents))

    def is_homogeneous(self) -> bool:
        w = self.context.degree_weights
        return all(x > 0 for x in w) and all(f.is_homogeneous(w) for f in self.sequence) and all(
            r.is_homogeneous(w) for r in self.context.relations
        )

    def ideal_context(self) -> PolyContext:
        """The context modulo (f_1^a_1, ..., f_p^a_p)."""
        return self.context.with_relations(self.powered())


# -- complexes of free modules over a polynomial context ------------------------

def _weighted_degree(e, w) -> int:
    return sum(a * b for a, b in zip(e, w))


def monomials_of_degree(nvars: int, weights: Sequence[int], D: int) -> list[tuple]:
    """All exponent vectors of weighted degree exactly D (positive weights)."""
    out: list = []

    def rec(i, remaining, prefix):
        if i == nvars - 1:
            if remaining % weights[i] == 0:
                out.append(prefix + (remaining // weights[i],))
            return
        for k in range(remaining // weights[i] + 1):
            rec(i + 1, remaining - k * weights[i], prefix + (k,))

    if D < 0:
        return []
    if nvars == 0:
        return [()] if D == 0 else []
    rec(0, D, ())
    return out


@dataclass
class PolyComplex:
    """Complex of free modules over ``context`` with polynomial matrices.

    ``diffs[n]`` is a matrix (list of rows) from degree n to degree n + step.
    ``shifts[n][j]`` is the internal degree of generator j of degree n.
    """

    context: PolyContext
    ranks: dict[int, int]
    diffs: dict[int, list]
    shifts: dict[int, list]
    step: int = -1
    labels: dict[int, list] = field(default_factory=dict)

    def matrix(self, n: int) -> list:
        return self.diffs.get(n, [])

    def check_d2(self) -> bool:
        """Symbolic d∘d = 0 modulo the context relations."""
        ctx = self.context
        for n in self.ranks:
            A = self.diffs.get(n)
            B = self.diffs.get(n + self.step)
            if not A or not B:
                continue
            for i in range(len(B)):
                for j in range(len(A[0])):
                    s = Poly.const(ctx.nvars, 0)
                    for k in range(len(A)):
                        s = s + B[i][k] * A[k][j]
                    if not ctx.normal_form(s).is_zero():
                        return False
        return True

    def is_graded(self) -> bool:
        w = self.context.degree_weights
        if not all(x > 0 for x in w) or not all(r.is_homogeneous(w) for r in self.context.relations):
            return False
        for n, M in self.diffs.items():
            src, tgt = self.shifts[n], self.shifts.get(n + self.step, [])
            for i, row in enumerate(M):
                for j, p in enumerate(row):
                    if p.is_zero():
                        continue
                    if not p.is_homogeneous(w) or p.total_degree(w) != src[j] - tgt[i]:
                        return False
        return True

    # -- slices --------------------------------------------------------
    def _standard(self, D: int, filtered: bool) -> list[tuple]:
        ctx = self.context
        w = ctx.degree_weights
        lms = ctx.leading_monomials()
        degs = range(D + 1) if filtered else [D]
        out = []
        for d in degs:
            for e in monomials_of_degree(ctx.nvars, w, d):
                if not any(mono_divides(lm, e) for lm in lms):
                    out.append(e)
        return out

    def _slice_basis(self, n: int, D: int, filtered: bool) -> dict:
        idx: dict = {}
        for j, s in enumerate(self.shifts.get(n, [])):
            for e in self._standard(D - s, filtered):
                idx[(j, e)] = len(idx)
        return idx

    def slice_matrix(self, n: int, D: int, filtered: bool = False):
        ctx = self.context
        src = self._slice_basis(n, D, filtered)
        tgt = self._slice_basis(n + self.step, D, filtered)
        M = self.diffs.get(n)
        cols = []
        for (j, e) in src:
            col: dict = {}
            if M:
                for i in range(len(M)):
                    p = M[i][j]
                    if p.is_zero():
                        continue
                    img = ctx.normal_form(p.mul_term(e, 1))
                    for e2, c in img.terms.items():
                        k = tgt.get((i, e2))
                        if k is None:
                            raise ArithmeticError("differential leaves the degree slice")
                        col[k] = col.get(k, 0) + c
            cols.append({k: v for k, v in col.items() if v})
        return RatMatrix.from_columns(len(tgt), cols), len(src)

    def slice_homology(self, n: int, D: int, filtered: bool = False) -> int:
        out_m, dim_n = self.slice_matrix(n, D, filtered)
        in_m, _ = self.slice_matrix(n - self.step, D, filtered)
        return dim_n - rank(out_m) - rank(in_m)

    def slice_complex(self, D: int, filtered: bool = False) -> ChainComplex:
        ranks, diffs = {}, {}
        for n in self.ranks:
            m, dim_n = self.slice_matrix(n, D, filtered)
            ranks[n] = dim_n
            diffs[n] = m
        return ChainComplex(ranks, diffs, self.step)


def _koszul_basis(p: int) -> dict[int, list[tuple]]:
    return {i: list(combinations(range(p), i)) for i in range(p + 1)}


def koszul(k: KoszulData) -> PolyComplex:
    """Koszul complex; ∂(e_J) = Σ_t (-1)^(t+1) f_{j_t}^{a} e_{J minus j_t} (t counted from 1)."""
    ctx = k.context
    p = k.length
    fs = k.powered()
    w = ctx.degree_weights
    deg = [max(f.total_degree(w), 0) for f in fs]
    basis = _koszul_basis(p)
    pos = {i: {J: c for c, J in enumerate(basis[i])} for i in basis}
    zero = Poly.const(ctx.nvars, 0)
    flip = -1 if "koszul-sign" in os.environ.get("INFCYCLE_FAULT", "").split(",") else 1
    diffs = {}
    for i in range(1, p + 1):
        M = [[zero] * len(basis[i]) for _ in basis[i - 1]]
        for c, J in enumerate(basis[i]):
            for t, j in enumerate(J):
                sign = (1 if t % 2 == 0 else -1) * flip
                face = J[:t] + J[t + 1:]
                M[pos[i - 1][face]][c] = fs[j] * sign
        diffs[i] = M
    ranks = {i: len(basis[i]) for i in basis}
    shifts = {i: [sum(deg[j] for j in J) for J in basis[i]] for i in basis}
    return PolyComplex(ctx, ranks, diffs, shifts, -1, labels=basis)


@dataclass
class KoszulHomology:
    degree: int
    bound: int
    mode: str  # "graded" (exact slices) or "filtered" (degree <= D truncation)
    dims: dict[int, int]

    @property
    def vanishes(self) -> bool:
        return all(v == 0 for v in self.dims.values())


def koszul_homology(k: KoszulData, i: int, deg_bound: int, mode: str | None = None) -> KoszulHomology:
    if i < 0:
        raise ValueError("homological degree must be >= 0")
    K = koszul(k)
    if mode is None:
        mode = "graded" if K.is_graded() else "filtered"
    filtered = mode == "filtered"
    if i > k.length:
        return KoszulHomology(i, deg_bound, mode, {D: 0 for D in range(deg_bound + 1)})
    dims = {D: K.slice_homology(i, D, filtered) for D in range(deg_bound + 1)}
    return KoszulHomology(i, deg_bound, mode, dims)


# -- Hom into a free module and Ext classes ---------------------------------------

def hom_into(k: KoszulData, target) -> PolyComplex:
    """Cochain complex Hom(Koszul(k), target) for a free target module.

    ``target`` needs ``context``, ``rank`` and ``generator_degrees``.
    Degree i has basis (J, t) with |J| = i and t a target generator; the
    differential is the transpose of the Koszul boundary tensored with the identity.
    """
    if target.context.variables != k.context.variables:
        raise ValueError("target lives over a different context")
    ctx = k.context
    K = koszul(k)
    r = target.rank
    tdeg = list(target.generator_degrees)
    zero = Poly.const(ctx.nvars, 0)
    ranks, diffs, shifts, labels = {}, {}, {}, {}
    for i in K.ranks:
        ranks[i] = K.ranks[i] * r
        shifts[i] = [K.shifts[i][a] + tdeg[t] for a in range(K.ranks[i]) for t in range(r)]
        labels[i] = [(K.labels[i][a], t) for a in range(K.ranks[i]) for t in range(r)]
    for i in range(k.length):
        D = K.diffs[i + 1]  # C_{i+1} -> C_i, rows indexed by C_i
        rows, cols = K.ranks[i + 1], K.ranks[i]
        M = [[zero] * (cols * r) for _ in range(rows * r)]
        for a in range(rows):
            for b in range(cols):
                p = D[b][a]
                if p.is_zero():
                    continue
                for t in range(r):
                    M[a * r + t][b * r + t] = p
        diffs[i] = M
    return PolyComplex(ctx, ranks, diffs, shifts, +1, labels=labels)


@dataclass
class ExtZeroTest:
    zero: bool
    witness: dict  # component -> cofactor list (when zero)
    normal_forms: dict  # component -> nonzero normal form (when nonzero)
    generators: list  # the ideal generators f_i^{a_i}


def ext_class_is_zero(k: KoszulData, numerator: Mapping) -> ExtZeroTest:
    """Decide whether numerator ∈ (f_1^a_1, ..., f_p^a_p)·M for a free module M.

    ``numerator`` maps component keys to polynomials of ``k.context``.
    """
    gens = k.powered()
    ictx = k.context.with_relations(gens)
    nrel = len(k.context.relations)
    witness, nfs = {}, {}
    for key in sorted(numerator, key=repr):
        p = numerator[key]
        if p.is_zero():
            continue
        m: Membership = ictx.ideal_member(p)
        if m.member:
            witness[key] = m.cofactors[nrel:]
        else:
            nfs[key] = m.normal_form
    zero = not nfs
    return ExtZeroTest(zero, witness if zero else {}, nfs, gens)


def verify_witness(k: KoszulData, numerator: Mapping, test: ExtZeroTest) -> bool:
    """Re-expand cofactors: numerator ≡ Σ c_i f_i^a_i modulo the context relations."""
    ctx = k.context
    gens = k.powered()
    for key, p in numerator.items():
        if p.is_zero():
            continue
        cof = test.witness.get(key)
        if cof is None:
            return False
        s = Poly.const(ctx.nvars, 0)
        for c, g in zip(cof, gens):
            s = s + c * g
        if not ctx.normal_form(p - s).is_zero():
            return False
    return True


def verify_normal_forms(k: KoszulData, numerator: Mapping, test: ExtZeroTest) -> bool:
    """Each reported normal form is nonzero, reduced, and congruent to its component."""
    ictx = k.context.with_relations(k.powered())
    for key, nf in test.normal_forms.items():
        if nf.is_zero() or ictx.normal_form(nf) != nf:
            return False
        if not ictx.ideal_member(numerator[key] - nf).member:
            return False
    return bool(test.normal_forms) or test.zero


def transition(k: KoszulData, numerator: Mapping, exponents: Sequence[int]) -> tuple[KoszulData, dict]:
    """Move a class from level k.exponents to a higher level."""
    if len(exponents) != k.length or any(b < a for a, b in zip(k.exponents, exponents)):
        raise ValueError("transition needs exponents >= the current ones")
    factor = Poly.const(k.context.nvars, 1)
    for f, a, b in zip(k.sequence, k.exponents, exponents):
        factor = factor * f ** (b - a)
    return k.at_level(exponents), {key: factor * p for key, p in numerator.items()}
