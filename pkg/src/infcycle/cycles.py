"""Deformed regular sequences, their Koszul complexes, Newton classes and the
boundary test deciding whether a deformation is a Milnor K-theoretic cycle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .complexes import (
    ExtZeroTest,
    KoszulData,
    PolyComplex,
    ext_class_is_zero,
    koszul,
    transition,
    verify_witness,
)
from .kaehler import MixedForms, PolyForm, wedge_all
from .polyalg.artin import AlgebraMap, ArtinAlgebra, truncated
from .polyalg.groebner import PolyContext, exact_divide
from .polyalg.parse import RationalExpr, parse_rational
from .polyalg.poly import Poly
from .polyalg.regular import RegularityReport, is_regular_sequence


class RegularityError(ValueError):
    pass


def koszul_top_sign(p: int) -> int:
    """Sign s with (1/p!) dM_1···dM_p = s·df_1∧…∧df_p for the Koszul convention in use."""
    return -1 if (p * (p - 1) // 2) % 2 else 1


# -- germs and deformations ---------------------------------------------------------

@dataclass
class SubvarietyGerm:
    context: PolyContext
    sequence: list
    report: RegularityReport | None = None

    def __post_init__(self):
        if self.context.relations:
            raise ValueError("the ambient patch must be a polynomial ring")
        self.sequence = [self.context.parse(f) if isinstance(f, str) else f for f in self.sequence]
        if self.report is None:
            self.report = is_regular_sequence(self.context, self.sequence)
        if not self.report.regular:
            raise RegularityError("base sequence is not regular")

    @property
    def codim(self) -> int:
        return len(self.sequence)


def _lift_base(p: Poly, nb: int, n: int) -> Poly:
    return p.embed(list(range(nb)), n)


@dataclass
class Deformation:
    """f^A_i = numerators[i] / g^powers[i] over P⊗A, reducing to f_i under the augmentation."""

    base: SubvarietyGerm
    algebra: ArtinAlgebra
    deformed: list
    denominator: Poly | str | None = None
    certify: bool = True
    forms: MixedForms = field(init=False)
    numerators: list = field(init=False)
    powers: list = field(init=False)
    report: RegularityReport | None = field(init=False, default=None)

    def __post_init__(self):
        base, A = self.base, self.algebra
        if not A.is_local:
            raise ValueError("the thickening algebra must be local artinian")
        self.forms = MixedForms(base.context, A, base.codim)
        ctx = self.forms.context
        nb, n = base.context.nvars, ctx.nvars
        g = self.denominator
        if isinstance(g, str):
            g = base.context.parse(g)
        self.denominator = g
        if len(self.deformed) != base.codim:
            raise ValueError("one deformed entry per base sequence element")
        nums, pows = [], []
        for entry in self.deformed:
            if isinstance(entry, str):
                entry = parse_rational(entry, ctx.variables)
            if isinstance(entry, Poly):
                entry = RationalExpr(entry, Poly.const(n, 1))
            num, den = entry.num, entry.den
            k = 0
            if not den.is_constant():
                if g is None:
                    raise ValueError("deformed entry has a denominator but none was declared")
                gl = _lift_base(g, nb, n)
                while not den.is_constant():
                    q = exact_divide(den, gl)
                    if q is None:
                        raise ValueError("entry denominator is not a power of the declared denominator")
                    den = q
                    k += 1
            c = den.constant_term()
            nums.append(num * (Fraction(1) / c))
            pows.append(k)
        self.numerators, self.powers = nums, pows
        zero_a = [Poly.var(nb, i) for i in range(nb)] + [Poly.const(nb, 0)] * A.ctx.nvars
        for f, N, k in zip(base.sequence, nums, pows):
            gk = g ** k if g is not None else Poly.const(nb, 1)
            if N.substitute(zero_a, nb) != f * gk:
                raise ValueError("deformed entry does not reduce to the base element under the augmentation")
        if g is not None:
            mem = base.context.with_relations(base.sequence).ideal_member(g)
            if mem.member:
                raise ValueError("denominator lies in the ideal of the germ")
        if self.certify:
            self.report = self.regularity()
            if not self.report.regular:
                raise RegularityError("deformed sequence is not regular over P⊗A")

    @property
    def context(self) -> PolyContext:
        return self.forms.context

    @property
    def is_polynomial(self) -> bool:
        return all(k == 0 for k in self.powers)

    def localized(self) -> tuple[PolyContext, list[Poly]]:
        """Context P⊗A (with u·g - 1 when a denominator is present) and the sequence."""
        ctx = self.context
        if self.is_polynomial:
            return ctx, list(self.numerators)
        n = ctx.nvars
        vars2 = ctx.variables + ("u_inv",)
        lift = lambda p: p.embed(list(range(n)), n + 1)
        u = Poly.var(n + 1, n)
        g = lift(_lift_base(self.denominator, self.base.context.nvars, n))
        rels = [lift(r) for r in ctx.relations] + [u * g - 1]
        lctx = PolyContext(vars2, rels, "degrevlex")
        seq = [lift(N) * u ** k for N, k in zip(self.numerators, self.powers)]
        return lctx, seq

    def regularity(self) -> RegularityReport:
        lctx, seq = self.localized()
        return is_regular_sequence(lctx, seq, koszul_check=False)

    def differentials(self) -> list[tuple[PolyForm, int]]:
        """d f^A_i as (numerator form, power of g)."""
        out = []
        n = self.context.nvars
        nb = self.base.context.nvars
        for N, k in zip(self.numerators, self.powers):
            if k == 0:
                out.append((PolyForm.d_of(N), 0))
                continue
            g = _lift_base(self.denominator, nb, n)
            om = PolyForm.d_of(N).scale(g) - PolyForm.d_of(g).scale(N * k)
            out.append((om, k + 1))
        return out

    def fmt(self) -> list[str]:
        ctx = self.context
        out = []
        for N, k in zip(self.numerators, self.powers):
            s = ctx.fmt(N)
            if k:
                g = self.base.context.fmt(self.denominator)
                s = f"({s})/({g})" + (f"^{k}" if k > 1 else "")
            out.append(s)
        return out


def _cancel_denominator(form: PolyForm, g: Poly | None, power: int, nb: int) -> tuple[PolyForm, int]:
    if g is None or power == 0 or form.is_zero():
        return form, (0 if form.is_zero() else power)
    gl = _lift_base(g, nb, form.nvars)
    while power > 0:
        qs = {}
        for w, c in form.terms.items():
            q = exact_divide(c, gl)
            if q is None:
                return form, power
            qs[w] = q
        form = PolyForm(form.nvars, qs)
        power -= 1
    return form, power


# -- Ext classes ----------------------------------------------------------------------

@dataclass
class ExtClass:
    """Class [numerator / (f^a · g^k)] in Ext^p(P/(f), Ω̄^p_{P⊗A})."""

    koszul_data: KoszulData
    forms: MixedForms
    numerator: dict  # bar component key -> base polynomial
    denominator: Poly | None = None
    denominator_power: int = 0
    numerator_form: PolyForm | None = None

    def __post_init__(self):
        if not self.forms.is_bar(self.numerator):
            raise ValueError("numerator is not killed by the augmentation")

    @property
    def p(self) -> int:
        return self.koszul_data.length

    def test_zero(self) -> ExtZeroTest:
        return ext_class_is_zero(self.koszul_data, self.numerator)

    def is_zero(self) -> bool:
        return self.test_zero().zero

    def fmt(self) -> str:
        return self.forms.fmt(self.numerator)

    def at_level(self, exponents: Sequence[int]) -> "ExtClass":
        k, num = transition(self.koszul_data, self.numerator, exponents)
        form = None
        if self.numerator_form is not None:
            f = Poly.const(self.forms.context.nvars, 1)
            for s, a, b in zip(self.koszul_data.sequence, self.koszul_data.exponents, exponents):
                f = f * self.forms.lift(s) ** (b - a)
            form = self.numerator_form.scale(f)
        return ExtClass(k, self.forms, num, self.denominator, self.denominator_power, form)

    def with_power(self, k: int) -> "ExtClass":
        """Same class written over g^k (k >= current power)."""
        if k == self.denominator_power:
            return self
        if self.denominator is None or k < self.denominator_power:
            raise ValueError("cannot lower the denominator power")
        factor = self.denominator ** (k - self.denominator_power)
        num = {key: factor * p for key, p in self.numerator.items()}
        form = None
        if self.numerator_form is not None:
            form = self.numerator_form.scale(self.forms.lift(factor))
        return ExtClass(self.koszul_data, self.forms, num, self.denominator, k, form)

    def difference(self, other: "ExtClass") -> "ExtClass":
        if [s for s in self.koszul_data.sequence] != [s for s in other.koszul_data.sequence]:
            raise ValueError("classes live over different sequences; rebase first")
        if self.forms.keys != other.forms.keys:
            raise ValueError("classes live in different form modules")
        if self.denominator is not None and other.denominator is not None and self.denominator != other.denominator:
            raise ValueError("classes carry different denominators")
        level = [max(a, b) for a, b in zip(self.koszul_data.exponents, other.koszul_data.exponents)]
        a, b = self.at_level(level), other.at_level(level)
        g = self.denominator if self.denominator is not None else other.denominator
        k = max(a.denominator_power, b.denominator_power)
        if g is not None:
            a = ExtClass(a.koszul_data, a.forms, a.numerator, g, a.denominator_power, a.numerator_form).with_power(k)
            b = ExtClass(b.koszul_data, b.forms, b.numerator, g, b.denominator_power, b.numerator_form).with_power(k)
        num = dict(a.numerator)
        for key, p in b.numerator.items():
            num[key] = num[key] - p if key in num else -p
        num = {key: p for key, p in num.items() if not p.is_zero()}
        form = None
        if a.numerator_form is not None and b.numerator_form is not None:
            form = a.numerator_form - b.numerator_form
        return ExtClass(a.koszul_data, a.forms, num, g, k, form)

    def rebase(self, sequence: Sequence[Poly], T: Sequence[Sequence]) -> "ExtClass":
        """Rewrite a level-one class over f = T·g into one over g, for T constant and invertible.

        Uses [ω/g] = [det(T)·ω/f], i.e. [ω/f] = [det(T)⁻¹·ω/g].
        """
        if any(a != 1 for a in self.koszul_data.exponents):
            raise ValueError("rebase is implemented at level one")
        n = self.koszul_data.context.nvars
        det = _det([[_as_poly(x, n) for x in row] for row in T])
        if not det.is_constant() or det.is_zero():
            raise ValueError("rebase needs a constant invertible matrix")
        inv = Fraction(1) / det.constant_term()
        num = {key: p * inv for key, p in self.numerator.items()}
        form = self.numerator_form.scale(inv) if self.numerator_form is not None else None
        k = KoszulData(self.koszul_data.context, list(sequence))
        return ExtClass(k, self.forms, num, self.denominator, self.denominator_power, form)


def _as_poly(x, n: int) -> Poly:
    return x if isinstance(x, Poly) else Poly.const(n, x)


def _det(M: list[list[Poly]]) -> Poly:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def alpha(def_: Deformation) -> PolyComplex:
    """Koszul complex of the deformed sequence over P⊗A (localized at g when needed)."""
    if def_.report is None:
        def_.report = def_.regularity()
    if not def_.report.regular:
        raise RegularityError("regularity of the deformed sequence is not certified")
    lctx, seq = def_.localized()
    return koszul(KoszulData(lctx, seq))


# -- local fundamental classes ------------------------------------------------------

def _dmatrix(M: list[list[Poly]]) -> list[list[PolyForm]]:
    return [[PolyForm.d_of(p) for p in row] for row in M]


def _form_matmul(A: list[list[PolyForm]], B: list[list[PolyForm]], n: int) -> list[list[PolyForm]]:
    out = []
    for i in range(len(A)):
        row = []
        for j in range(len(B[0])):
            acc = PolyForm(n)
            for k in range(len(B)):
                acc = acc + A[i][k].wedge(B[k][j])
            row.append(acc)
        out.append(row)
    return out


@dataclass
class FundamentalClass:
    p: int
    components: dict  # j -> matrix of p-forms, C_{j+p-1} -> C_{j-1}
    top: PolyForm  # value on the top Koszul generator (component j = 1)


def local_fundamental_class(c: PolyComplex, p: int | None = None) -> FundamentalClass:
    """(1/p!) dM_j ∘ dM_{j+1} ∘ … ∘ dM_{j+p-1} for every admissible j."""
    degs = sorted(d for d in c.diffs)
    if not degs:
        raise ValueError("complex has no differentials")
    length = max(degs)
    if p is None:
        p = length
    if p < 1 or p > length:
        raise ValueError("need 1 <= p <= length of the complex")
    n = c.context.nvars
    scale = Fraction(1, factorial(p))
    comps = {}
    for j in range(1, length - p + 2):
        acc = _dmatrix(c.diffs[j])
        for t in range(j + 1, j + p):
            acc = _form_matmul(acc, _dmatrix(c.diffs[t]), n)
        comps[j] = [[f.scale(scale).reduce(c.context) for f in row] for row in acc]
    top = comps[1][0][0] if 1 in comps and comps[1] and comps[1][0] else PolyForm(n)
    return FundamentalClass(p, comps, top)


# -- Newton classes -------------------------------------------------------------------

def newton_class(def_: Deformation, denominators: str = "base") -> ExtClass:
    """Newton class of a deformation.

    ``denominators="base"``: numerator df^A_1∧…∧df^A_p − df_1∧…∧df_p over the
    base sequence at level one.  ``denominators="deformed"``: the class of
    df^A/f^A − df/f, expanding 1/(f + η) = Σ (−η)^k / f^{k+1} with η nilpotent;
    it lands at level K + 1 with K the nilpotency bound of η.
    """
    base = def_.base
    forms = def_.forms
    n = forms.context.nvars
    nb = base.context.nvars
    p = base.codim
    lift = lambda q: _lift_base(q, nb, n)
    df_base = wedge_all([PolyForm.d_of(lift(f)) for f in base.sequence], n)
    if denominators == "base":
        diffs = def_.differentials()
        num = wedge_all([w for w, _ in diffs], n)
        power = sum(k for _, k in diffs)
        g = def_.denominator
        if power:
            num = num - df_base.scale(lift(g ** power))
        else:
            num = num - df_base
        num = num.reduce(forms.context)
        num, power = _cancel_denominator(num, g, power, nb)
        k = KoszulData(base.context, list(base.sequence))
        return ExtClass(k, forms, forms.decompose(num), g if power else None, power, num)
    if denominators != "deformed":
        raise ValueError("denominators must be 'base' or 'deformed'")
    if not def_.is_polynomial:
        raise ValueError("deformed denominators are implemented for polynomial deformations")
    N = def_.algebra.nilpotency_index() or 1
    L = N  # η^N = 0, so the expansion stops at k = N - 1 and needs level N
    total = PolyForm.function(Poly.const(n, 1))
    for f, fa in zip(base.sequence, def_.numerators):
        fl = lift(f)
        eta = fa - fl
        Q = Poly.const(n, 0)
        for kk in range(L):
            Q = Q + (-eta) ** kk * fl ** (L - 1 - kk)
        total = total.wedge(PolyForm.d_of(fa).scale(Q))
    shift = Poly.const(n, 1)
    for f in base.sequence:
        shift = shift * lift(f) ** (L - 1)
    num = (total - df_base.scale(shift)).reduce(forms.context)
    k = KoszulData(base.context, list(base.sequence), [L] * p)
    return ExtClass(k, forms, forms.decompose(num), None, 0, num)


# -- boundary test --------------------------------------------------------------------

@dataclass
class BoundaryResult:
    element: Poly
    gamma: ExtClass
    test: ExtZeroTest

    @property
    def vanishes(self) -> bool:
        return self.test.zero


def cousin_boundary(cls: ExtClass, g: Poly | str) -> BoundaryResult:
    """Boundary of cls at the codim-(p+1) point cut out by (f_1, …, f_p, g).

    The class is rewritten over the extended sequence with exponent max(k, 1)
    on g, where g^k is the denominator power of cls (numerator multiplied by
    g^{max(k,1) − k}); vanishing is ideal membership.
    """
    k0 = cls.koszul_data
    ctx = k0.context
    if isinstance(g, str):
        g = ctx.parse(g)
    seq = list(k0.sequence)
    if ctx.with_relations(seq).ideal_member(g).member:
        raise RegularityError("extension element lies in the ideal of the germ")
    rep = is_regular_sequence(ctx, seq + [g])
    if not rep.regular:
        raise RegularityError("extended sequence is not regular")
    d = cls.denominator
    kpow = cls.denominator_power if d is not None else 0
    if kpow and d != g:
        # the pole along d is invertible at the new point unless d vanishes there
        if ctx.with_relations(seq + [g]).ideal_member(d).member:
            raise ValueError("denominator vanishes at the extension point but differs from the extension element")
        kpow = 0
    a = max(kpow, 1)
    factor = g ** (a - kpow)
    num = {key: factor * p for key, p in cls.numerator.items()}
    num = {key: p for key, p in num.items() if not p.is_zero()}
    kd = KoszulData(ctx, seq + [g], list(k0.exponents) + [a])
    form = cls.numerator_form.scale(cls.forms.lift(factor)) if cls.numerator_form is not None else None
    gamma = ExtClass(kd, cls.forms, num, None, 0, form)
    test = ext_class_is_zero(kd, num)
    if test.zero and not verify_witness(kd, num, test):
        raise AssertionError("cofactor witness does not re-expand")
    return BoundaryResult(g, gamma, test)


def default_extensions(germ: SubvarietyGerm) -> list[Poly]:
    """Coordinate variables v with v ∉ (f) and (f, v) regular."""
    ctx = germ.context
    out = []
    for i in range(ctx.nvars):
        v = Poly.var(ctx.nvars, i)
        if ctx.with_relations(germ.sequence).ideal_member(v).member:
            continue
        if len(germ.sequence) + 1 > ctx.nvars:
            continue
        if is_regular_sequence(ctx, list(germ.sequence) + [v]).regular:
            out.append(v)
    return out


@dataclass
class CycleReport:
    verdict: str  # "cycle" or "not a cycle"
    newton: ExtClass
    boundaries: list  # BoundaryResult per extension element

    @property
    def is_cycle(self) -> bool:
        return self.verdict == "cycle"


def is_milnor_cycle(
    def_: Deformation,
    extension_elements: Sequence[Poly | str] | None = None,
    include_defaults: bool = True,
    denominators: str = "base",
) -> CycleReport:
    germ = def_.base
    ctx = germ.context
    elems: list[Poly] = []
    for g in extension_elements or []:
        elems.append(ctx.parse(g) if isinstance(g, str) else g)
    if include_defaults:
        for v in default_extensions(germ):
            if v not in elems:
                elems.append(v)
    cls = newton_class(def_, denominators)
    results = [cousin_boundary(cls, g) for g in elems]
    verdict = "cycle" if all(r.vanishes for r in results) else "not a cycle"
    return CycleReport(verdict, cls, results)


# -- naturality -----------------------------------------------------------------------

def push_forward(phi: AlgebraMap, def_C: Deformation) -> Deformation:
    if not phi.respects_augmentation():
        raise ValueError("algebra map is not augmentation-compatible")
    if phi.source is not def_C.algebra:
        raise ValueError("deformation lives over a different algebra")
    germ = def_C.base
    nb = germ.context.nvars
    A = phi.target
    formsA = MixedForms(germ.context, A, germ.codim)
    images = _combined_images(phi, nb, formsA.context.nvars)
    n = formsA.context.nvars
    nums = []
    g = def_C.denominator
    for N, k in zip(def_C.numerators, def_C.powers):
        num = N.substitute(images, n)
        den = _lift_base(g, nb, n) ** k if k else Poly.const(n, 1)
        nums.append(RationalExpr(num, den))
    return Deformation(germ, A, nums, g, certify=def_C.certify)


def _combined_images(phi: AlgebraMap, nb: int, n_out: int) -> list[Poly]:
    na_t = phi.target.ctx.nvars
    base = [Poly.var(n_out, i) for i in range(nb)]
    pos = list(range(nb, nb + na_t))
    return base + [img.embed(pos, n_out) for img in phi.images]


def push_class(phi: AlgebraMap, cls: ExtClass) -> ExtClass:
    """Image of an Ext class under the map induced by phi on forms."""
    if cls.numerator_form is None:
        raise ValueError("class carries no form representative")
    nb = cls.koszul_data.context.nvars
    formsA = MixedForms(cls.koszul_data.context, phi.target, cls.p)
    images = _combined_images(phi, nb, formsA.context.nvars)
    form = cls.numerator_form.substitute(images, formsA.context.nvars).reduce(formsA.context)
    return ExtClass(cls.koszul_data, formsA, formsA.decompose(form), cls.denominator, cls.denominator_power, form)


@dataclass
class NaturalityReport:
    commutes: bool
    difference: ExtClass
    test: ExtZeroTest
    boundaries_agree: bool = True

    def __bool__(self) -> bool:
        return self.commutes and self.boundaries_agree


def naturality_check(
    phi: AlgebraMap,
    def_C: Deformation,
    extensions: Sequence[Poly | str] = (),
    denominators: str = "base",
) -> NaturalityReport:
    def_A = push_forward(phi, def_C)
    cA = newton_class(def_A, denominators)
    cC = push_class(phi, newton_class(def_C, denominators))
    diff = cA.difference(cC)
    test = diff.test_zero()
    agree = True
    for g in extensions:
        bA = cousin_boundary(cA, g).vanishes
        bC = cousin_boundary(cC, g).vanishes
        agree = agree and bA == bC
    return NaturalityReport(test.zero, diff, test, agree)


# -- first-order deformations -----------------------------------------------------------

def dual_numbers_tangent(
    base: SubvarietyGerm, normal_data: Sequence[Poly | str], denominators: str = "base", var: str = "eps"
) -> ExtClass:
    ctx = base.context
    while var in ctx.variables:
        var += "_"
    A = truncated(var, 2)
    nb = ctx.nvars
    n = nb + 1
    gs = [ctx.parse(g) if isinstance(g, str) else g for g in normal_data]
    if len(gs) != base.codim:
        raise ValueError("one normal-data entry per sequence element")
    e = Poly.var(n, nb)
    deformed = [_lift_base(f, nb, n) + e * _lift_base(g, nb, n) for f, g in zip(base.sequence, gs)]
    d = Deformation(base, A, deformed)
    return newton_class(d, denominators)


# -- basis changes ------------------------------------------------------------------------

def basis_change(def_: Deformation, M: Sequence[Sequence]) -> Deformation:
    """The deformation with sequences M·f and M·f^A (M constant, invertible)."""
    if not def_.is_polynomial:
        raise ValueError("basis changes are implemented for polynomial deformations")
    germ = def_.base
    nb = germ.context.nvars
    n = def_.context.nvars
    p = germ.codim
    new_f = []
    new_fa = []
    for i in range(p):
        acc = Poly.const(nb, 0)
        acc_a = Poly.const(n, 0)
        for j in range(p):
            acc = acc + germ.sequence[j] * M[i][j]
            acc_a = acc_a + def_.numerators[j] * M[i][j]
        new_f.append(acc)
        new_fa.append(acc_a)
    germ2 = SubvarietyGerm(germ.context, new_f)
    return Deformation(germ2, def_.algebra, new_fa, certify=def_.certify)


def newton_via_fundamental_class(def_: Deformation) -> ExtClass:
    """Newton class assembled from the top components of the local fundamental classes."""
    if not def_.is_polynomial:
        raise ValueError("implemented for polynomial deformations")
    germ = def_.base
    forms = def_.forms
    n = forms.context.nvars
    nb = germ.context.nvars
    KA = koszul(KoszulData(forms.context, list(def_.numerators)))
    K0 = koszul(KoszulData(forms.context, [_lift_base(f, nb, n) for f in germ.sequence]))
    s = koszul_top_sign(germ.codim)
    top = (local_fundamental_class(KA).top - local_fundamental_class(K0).top).scale(s)
    top = top.reduce(forms.context)
    return ExtClass(KoszulData(germ.context, list(germ.sequence)), forms, forms.decompose(top), None, 0, top)
