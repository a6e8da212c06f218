"""Regular-sequence certification.

The verdict comes from the colon criterion: f_1..f_p is regular on R = Q[x]/J
when (J, f_1..f_{i-1}) : f_i = (J, f_1..f_{i-1}) for every i and the ideal
(J, f) is proper.  Homogeneous input is cross-checked by comparing Hilbert
series; otherwise Koszul homology can be sampled on degree-filtered pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .groebner import PolyContext, colon_ideal, hilbert_numerator, _tpoly_mul
from .poly import Poly


@dataclass
class RegularityReport:
    regular: bool
    exact: bool  # verdict is a theorem, not a truncated sample
    method: str
    certified_degree: int | None = None
    failing_index: int | None = None  # first f_i that is a zero divisor (0-based)
    koszul: dict = field(default_factory=dict)  # i -> {degree: dim H_i}
    notes: str = ""

    def __bool__(self) -> bool:
        return self.regular


def _coerce(ctx: PolyContext, seq) -> list[Poly]:
    out = []
    for f in seq:
        if isinstance(f, str):
            f = ctx.parse(f)
        if not isinstance(f, Poly) or f.nvars != ctx.nvars:
            raise TypeError("sequence entries must be polynomials of the context")
        out.append(f)
    return out


def colon_verdict(ctx: PolyContext, seq: Sequence[Poly]) -> tuple[bool, int | None]:
    n = ctx.nvars
    base = list(ctx.relations)
    for i, f in enumerate(seq):
        I = base + list(seq[:i])
        Ictx = PolyContext(ctx.variables, I, ctx.order, ctx.weights)
        if Ictx.is_unit_ideal():
            return False, i
        if Ictx.normal_form(f).is_zero():
            return False, i
        col = colon_ideal(I, f, n)
        if not Ictx.contains_ideal(col):
            return False, i
    full = PolyContext(ctx.variables, base + list(seq), ctx.order, ctx.weights)
    if full.is_unit_ideal():
        return False, len(seq) - 1
    return True, None


def _hilbert_check(ctx: PolyContext, seq: Sequence[Poly]) -> bool:
    w = ctx.degree_weights
    num_R = hilbert_numerator(ctx.leading_monomials(), w)
    full = ctx.with_relations(seq)
    num_Q = hilbert_numerator(full.leading_monomials(), w)
    expected = num_R
    for f in seq:
        expected = _tpoly_mul(expected, {0: 1, f.total_degree(w): -1})
    return expected == num_Q


def is_regular_sequence(
    ctx: PolyContext,
    seq,
    degree_bound: int | None = None,
    koszul_check: bool | None = None,
) -> RegularityReport:
    seq = _coerce(ctx, seq)
    if not seq:
        raise ValueError("empty sequence")
    if len(seq) > ctx.nvars:
        raise ValueError("sequence longer than the number of variables")
    regular, bad = colon_verdict(ctx, seq)
    w = ctx.degree_weights
    homog = all(x > 0 for x in w) and all(f.is_homogeneous(w) and not f.is_zero() for f in seq) and all(
        r.is_homogeneous(w) for r in ctx.relations
    )
    if degree_bound is None:
        degree_bound = 2 * max(max(f.total_degree(w), 1) for f in seq) * len(seq)
    report = RegularityReport(regular, True, "colon", degree_bound, bad)
    if homog:
        hs = _hilbert_check(ctx, seq)
        if hs != regular:
            raise AssertionError("colon criterion and Hilbert-series comparison disagree")
        report.method = "colon+hilbert"
    if koszul_check is None:
        koszul_check = homog
    if koszul_check:
        from ..complexes import KoszulData, koszul_homology

        k = KoszulData(ctx, seq)
        for i in range(1, len(seq) + 1):
            kh = koszul_homology(k, i, degree_bound)
            report.koszul[i] = kh.dims
        mode = "graded" if homog else "filtered"
        nonzero = any(v for dims in report.koszul.values() for v in dims.values())
        if mode == "graded" and regular and nonzero:
            raise AssertionError("regular sequence with nonvanishing Koszul homology")
        report.notes = f"Koszul homology sampled ({mode}) through degree {degree_bound}"
    return report
