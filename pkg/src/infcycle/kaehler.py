"""Kähler differentials over Q: polynomial forms, finite Ω^p of artinian algebras,
relative forms of split pairs and the quotient Ω¹_{S,I}/dI."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exactla import QuotientSpace, RatMatrix, Subspace, complement_representatives, kernel_basis
from .polyalg.artin import ArtinAlgebra, RelativePair
from .polyalg.groebner import PolyContext
from .polyalg.poly import Poly


def _coef_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_combination(items: Iterable[tuple[str, Fraction]]) -> str:
    """'2*x*dy - eps*dx' style rendering of Σ c·name."""
    parts = []
    for name, c in items:
        if not c:
            continue
        a = abs(c)
        body = name if a == 1 else (_coef_str(a) if name == "1" else f"{_coef_str(a)}*{name}")
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def wedge_name(w: Sequence[int], names: Sequence[str]) -> str:
    return "∧".join("d" + names[i] for i in w)


def _merge_sign(a: Sequence[int], b: Sequence[int]) -> tuple[int, tuple] | None:
    """Sign and sorted index tuple of dx_a ∧ dx_b (None when an index repeats)."""
    if set(a) & set(b):
        return None
    seq = list(a) + list(b)
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


# -- forms with polynomial coefficients -----------------------------------------

class PolyForm:
    """Differential form Σ c_W dx_W with polynomial coefficients in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, Poly] | None = None):
        self.nvars = nvars
        self.terms = {tuple(w): p for w, p in (terms or {}).items() if not p.is_zero()}

    @classmethod
    def function(cls, p: Poly) -> "PolyForm":
        return cls(p.nvars, {(): p})

    @classmethod
    def d_of(cls, p: Poly) -> "PolyForm":
        return cls(p.nvars, {(i,): p.diff(i) for i in range(p.nvars)})

    @classmethod
    def basis(cls, nvars: int, w: Sequence[int]) -> "PolyForm":
        return cls(nvars, {tuple(w): Poly.const(nvars, 1)})

    def degrees(self) -> set[int]:
        return {len(w) for w in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PolyForm") -> "PolyForm":
        out = dict(self.terms)
        for w, p in other.terms.items():
            out[w] = out[w] + p if w in out else p
        return PolyForm(self.nvars, out)

    def __neg__(self) -> "PolyForm":
        return PolyForm(self.nvars, {w: -p for w, p in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        if isinstance(c, Poly):
            return PolyForm(self.nvars, {w: c * p for w, p in self.terms.items()})
        return PolyForm(self.nvars, {w: p * c for w, p in self.terms.items()})

    def wedge(self, other: "PolyForm") -> "PolyForm":
        out: dict = {}
        for w1, p1 in self.terms.items():
            for w2, p2 in other.terms.items():
                m = _merge_sign(w1, w2)
                if m is None:
                    continue
                s, w = m
                term = p1 * p2 * s
                out[w] = out[w] + term if w in out else term
        return PolyForm(self.nvars, out)

    def d(self) -> "PolyForm":
        out = PolyForm(self.nvars)
        for w, p in self.terms.items():
            out = out + PolyForm.d_of(p).wedge(PolyForm.basis(self.nvars, w))
        return out

    def substitute(self, images: Sequence[Poly], nvars_out: int) -> "PolyForm":
        """Pull back along the ring map x_i ↦ images[i] (d commutes with the map)."""
        dimg = [PolyForm.d_of(g) for g in images]
        out = PolyForm(nvars_out)
        for w, p in self.terms.items():
            acc = PolyForm.function(p.substitute(images, nvars_out))
            for i in w:
                acc = acc.wedge(dimg[i])
            out = out + acc
        return out

    def reduce(self, ctx: PolyContext) -> "PolyForm":
        return PolyForm(self.nvars, {w: ctx.normal_form(p) for w, p in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyForm) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def fmt(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for w in sorted(self.terms, key=lambda t: (len(t), t)):
            p = self.terms[w]
            coef = p.format(names)
            wn = wedge_name(w, names)
            if not w:
                pieces.append(coef)
            elif coef == "1":
                pieces.append(wn)
            elif coef == "-1":
                pieces.append("-" + wn)
            elif len(p.terms) == 1:
                pieces.append(f"{coef}*{wn}")
            else:
                pieces.append(f"({coef})*{wn}")
        s = pieces[0]
        for t in pieces[1:]:
            s += " - " + t[1:] if t.startswith("-") else " + " + t
        return s

    def __repr__(self) -> str:
        return f"PolyForm({self.fmt([f'x{i}' for i in range(self.nvars)])})"


def wedge_all(forms: Sequence[PolyForm], nvars: int) -> PolyForm:
    acc = PolyForm.function(Poly.const(nvars, 1))
    for f in forms:
        acc = acc.wedge(f)
    return acc


# -- form modules -----------------------------------------------------------------

class FormModule:
    """Ω^p of a context.

    For an ArtinAlgebra the module is an explicit finite-dimensional quotient of
    A ⊗ Λ^p with coordinates ``w * dim A + b`` (wedge-major); the surviving
    coordinates form the basis.  For a polynomial ring without relations it is
    free on the dx_I.  Other polynomial contexts keep only the presentation.
    """

    def __init__(self, ctx, p: int):
        if p < 0:
            raise ValueError("form degree must be >= 0")
        self.p = p
        if isinstance(ctx, PolyContext) and ctx.relations:
            try:
                ctx = ArtinAlgebra(ctx)
            except ValueError:
                pass
        self.algebra: ArtinAlgebra | None = ctx if isinstance(ctx, ArtinAlgebra) else None
        self.context: PolyContext = ctx.ctx if self.algebra else ctx
        n = self.context.nvars
        self.wedges: list[tuple] = list(combinations(range(n), p))
        self.wedge_pos = {w: i for i, w in enumerate(self.wedges)}
        self.relations_presentation = self._presentation()
        if self.algebra is not None:
            self._build_finite()
        self._d_matrix = None

    # -- shared --------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.algebra is not None

    @property
    def is_free(self) -> bool:
        return self.algebra is None and not self.context.relations

    @property
    def rank(self) -> int:
        if not self.is_free:
            raise ValueError("rank is defined for free form modules only")
        return len(self.wedges)

    @property
    def generator_degrees(self) -> list[int]:
        w = self.context.degree_weights
        return [sum(w[i] for i in W) for W in self.wedges]

    @property
    def generators(self) -> list[str]:
        return [wedge_name(w, self.context.variables) or "1" for w in self.wedges]

    def _presentation(self) -> list[PolyForm]:
        """d(rel) ∧ dx_J for each ideal generator and |J| = p - 1."""
        if self.p == 0:
            return []
        n = self.context.nvars
        out = []
        for g in self.context.relations:
            dg = PolyForm.d_of(g)
            for J in combinations(range(n), self.p - 1):
                f = dg.wedge(PolyForm.basis(n, J))
                if not f.is_zero():
                    out.append(f)
        return out

    # -- finite case ---------------------------------------------------
    def _build_finite(self):
        A = self.algebra
        ctx = A.ctx
        n = ctx.nvars
        self.ambient_dim = len(self.wedges) * A.dim
        rels = []
        if self.p > 0:
            for g in ctx.groebner():
                dg = [ctx.normal_form(g.diff(i)) for i in range(n)]
                for J in combinations(range(n), self.p - 1):
                    for b in range(A.dim):
                        xb = A.basis_poly(b)
                        vec: dict = {}
                        for i in range(n):
                            if dg[i].is_zero():
                                continue
                            m = _merge_sign((i,), J)
                            if m is None:
                                continue
                            s, w = m
                            coeff = A.element(xb * dg[i])
                            base = self.wedge_pos[w] * A.dim
                            for k, c in coeff.items():
                                key = base + k
                                vec[key] = vec.get(key, 0) + s * c
                        vec = {k: v for k, v in vec.items() if v}
                        if vec:
                            rels.append(vec)
        self.quotient = QuotientSpace(self.ambient_dim, rels, prefer="low")
        self.basis_coords = self.quotient.basis_coords
        self.names = [self.coord_name(c) for c in self.basis_coords]

    @property
    def dim(self) -> int:
        if not self.is_finite:
            raise ValueError("dimension is only available for finite-dimensional contexts")
        return len(self.basis_coords)

    def coord_name(self, c: int) -> str:
        A = self.algebra
        w, b = divmod(c, A.dim)
        mono = A.names[b]
        wn = wedge_name(self.wedges[w], A.variables)
        if not wn:
            return mono
        return wn if mono == "1" else f"{mono}*{wn}"

    def ambient_of(self, form: PolyForm) -> dict:
        """Ambient coordinates of a polynomial-coefficient p-form."""
        A = self.algebra
        vec: dict = {}
        for w, p in form.terms.items():
            if len(w) != self.p:
                raise ValueError("form has the wrong degree")
            base = self.wedge_pos[w] * A.dim
            for k, c in A.element(p).items():
                vec[base + k] = vec.get(base + k, 0) + c
        return {k: v for k, v in vec.items() if v}

    def element(self, form: PolyForm | Poly | str) -> dict:
        """Quotient-basis coordinates (sparse) of a form or, for p = 0, a function."""
        if isinstance(form, str):
            form = self.algebra.ctx.parse(form)
        if isinstance(form, Poly):
            if self.p != 0:
                raise ValueError("a function is a 0-form")
            form = PolyForm.function(form)
        return self.quotient.coords(self.ambient_of(form))

    def representative(self, coords: Mapping[int, Fraction]) -> PolyForm:
        A = self.algebra
        n = A.ctx.nvars
        terms: dict = {}
        for i, c in coords.items():
            w, b = divmod(self.basis_coords[i], A.dim)
            W = self.wedges[w]
            terms[W] = terms.get(W, Poly.const(n, 0)) + A.basis_poly(b) * c
        return PolyForm(n, terms)

    def fmt(self, coords: Mapping[int, Fraction]) -> str:
        return format_combination((self.names[i], coords[i]) for i in sorted(coords))

    def d_matrix(self) -> RatMatrix:
        """de Rham d: Ω^p → Ω^{p+1} in quotient bases."""
        if self._d_matrix is None:
            nxt = omega(self.algebra, self.p + 1)
            cols = []
            for i in range(self.dim):
                rep = self.representative({i: Fraction(1)})
                cols.append(nxt.element(rep.d()))
            self._d_matrix = RatMatrix.from_columns(nxt.dim, cols)
        return self._d_matrix

    def __repr__(self) -> str:
        if self.is_finite:
            return f"FormModule(p={self.p}, dim={self.dim}, basis={self.names})"
        return f"FormModule(p={self.p}, generators={self.generators})"


def omega(ctx, p: int) -> FormModule:
    """Ω^p of an ArtinAlgebra or PolyContext (cached on algebras)."""
    if isinstance(ctx, ArtinAlgebra):
        cache = ctx.__dict__.setdefault("_omega_cache", {})
        if p not in cache:
            cache[p] = FormModule(ctx, p)
        return cache[p]
    return FormModule(ctx, p)


@dataclass
class FormElement:
    module: FormModule
    coords: dict

    def __str__(self) -> str:
        return self.module.fmt(self.coords)


def de_rham(omega_el):
    """d on a PolyForm, or on a FormElement of a finite form module."""
    if isinstance(omega_el, PolyForm):
        return omega_el.d()
    if isinstance(omega_el, Poly):
        return PolyForm.d_of(omega_el)
    if isinstance(omega_el, FormElement):
        M = omega_el.module
        nxt = omega(M.algebra, M.p + 1)
        return FormElement(nxt, M.d_matrix().apply(omega_el.coords))
    raise TypeError("expected a PolyForm, polynomial or FormElement")


def exact_forms(A: ArtinAlgebra, p: int) -> Subspace:
    """dΩ^{p-1} inside Ω^p."""
    M = omega(A, p)
    if p == 0:
        return Subspace(M.dim)
    return Subspace.span(M.dim, omega(A, p - 1).d_matrix().column_dicts())


# -- relative forms and the Bloch group ------------------------------------------

def projection_matrix(pair: RelativePair, p: int) -> RatMatrix:
    """Induced map Ω^p_S → Ω^p_R in quotient bases."""
    S, R = pair.S, pair.R
    MS, MR = omega(S, p), omega(R, p)
    nr = R.ctx.nvars
    cols = []
    for c in MS.basis_coords:
        w, b = divmod(c, S.dim)
        W = MS.wedges[w]
        e = S.monomials[b]
        if any(i >= nr for i in W) or any(e[nr:]):
            cols.append({})
            continue
        amb = {MR.wedge_pos[W] * R.dim + R.index[e[:nr]]: Fraction(1)}
        cols.append(MR.quotient.coords(amb))
    return RatMatrix.from_columns(MR.dim, cols)


@dataclass
class RelativeFormGroup:
    pair: RelativePair
    p: int
    module: FormModule  # Ω^p_S
    kernel: Subspace  # Ω^p_{S,I} in Ω^p_S coordinates
    exact_ideal: Subspace | None = None  # dI (p = 1)
    quotient_basis: list | None = None  # representatives of Ω¹_{S,I}/dI

    @property
    def dim(self) -> int:
        return self.kernel.dim

    def basis_names(self) -> list[str]:
        return [self.module.fmt(v) for v in self.kernel.vectors()]


def relative_forms(pair: RelativePair, p: int) -> RelativeFormGroup:
    MS = omega(pair.S, p)
    K = kernel_basis(projection_matrix(pair, p))
    grp = RelativeFormGroup(pair, p, MS, K)
    if p == 1:
        d0 = omega(pair.S, 0).d_matrix()
        dI = Subspace.span(MS.dim, (d0.column(i) for i in pair.ideal))
        if not K.contains_subspace(dI):
            raise AssertionError("dI is not contained in the relative forms")
        grp.exact_ideal = dI
        grp.quotient_basis = complement_representatives(K.vectors(), dI)
    return grp


@dataclass
class BlochGroup:
    dim: int
    basis: list[dict]  # coordinates in Ω¹_S
    names: list[str]
    relative: RelativeFormGroup
    label: str = "K2(S,I)_Q"


def bloch_group(pair: RelativePair) -> BlochGroup:
    rel = relative_forms(pair, 1)
    reps = rel.quotient_basis
    names = [rel.module.fmt(v) for v in reps]
    return BlochGroup(len(reps), reps, names, rel)


# -- forms over Q[x] ⊗ A as a free Q[x]-module ---------------------------------

class MixedForms:
    """Ω^p of P⊗A (P = Q[base vars]) as the free P-module ⊕_j Ω^{p-j}_P ⊗ Ω^j_A.

    Components are keyed (I, j, k): dx_I with |I| = p - j and k a basis index
    of Ω^j_A.  ``bar_keys`` omits the (j = 0, k = 1) summand, giving the kernel
    of the augmentation to Ω^p_P.
    """

    def __init__(self, base: PolyContext, A: ArtinAlgebra, p: int):
        if base.relations:
            raise ValueError("base ring must be a polynomial ring")
        if set(base.variables) & set(A.variables):
            raise ValueError("base and algebra share variable names")
        self.base, self.A, self.p = base, A, p
        nb, na = base.nvars, A.ctx.nvars
        self.nb, self.na = nb, na
        self.variables = base.variables + A.variables
        weights = None
        if base.weights is not None or A.ctx.weights is not None:
            weights = base.degree_weights + A.ctx.degree_weights
        self.context = PolyContext(
            self.variables, [r.embed(list(range(nb, nb + na)), nb + na) for r in A.ctx.relations], "degrevlex", weights
        )
        self.keys: list[tuple] = []
        for j in range(0, min(p, na) + 1):
            if p - j > nb:
                continue
            Mj = omega(A, j)
            for I in combinations(range(nb), p - j):
                for k in range(Mj.dim):
                    self.keys.append((I, j, k))
        one = A.one_index
        bar = []
        for key in self.keys:
            I, j, k = key
            if j == 0 and omega(A, 0).basis_coords[k] == one:
                continue
            bar.append(key)
        self.bar_keys = bar

    @property
    def rank(self) -> int:
        return len(self.bar_keys)

    @property
    def generator_degrees(self) -> list[int]:
        w = self.base.degree_weights
        return [sum(w[i] for i in I) for (I, j, k) in self.bar_keys]

    def lift(self, p: Poly) -> Poly:
        """Base polynomial into the combined ring."""
        return p.embed(list(range(self.nb)), self.nb + self.na)

    def decompose(self, form: PolyForm) -> dict:
        """Components (I, j, k) -> base polynomial."""
        nb = self.nb
        A = self.A
        out: dict = {}
        for W, c in form.terms.items():
            if len(W) != self.p:
                raise ValueError("form has the wrong degree")
            I = tuple(i for i in W if i < nb)
            K = tuple(i - nb for i in W if i >= nb)
            j = len(K)
            Mj = omega(A, j)
            wpos = Mj.wedge_pos[K] * A.dim
            by_a: dict = {}
            for e, coef in c.terms.items():
                by_a.setdefault(e[nb:], {})[e[:nb]] = coef
            for ea, xpart in by_a.items():
                coords = Mj.quotient.coords(
                    {wpos + k: v for k, v in A.element(Poly.monomial(ea)).items()}
                )
                xp = Poly(nb, xpart)
                for k, v in coords.items():
                    key = (I, j, k)
                    out[key] = out.get(key, Poly.const(nb, 0)) + xp * v
        return {k: v for k, v in out.items() if not v.is_zero()}

    def is_bar(self, comps: Mapping) -> bool:
        bar = set(self.bar_keys)
        return all(k in bar for k, v in comps.items() if not v.is_zero())

    def key_name(self, key: tuple) -> str:
        I, j, k = key
        Mj = omega(self.A, j)
        a = Mj.names[k]
        x = wedge_name(I, self.base.variables)
        if not x:
            return a
        return x if a == "1" else f"{a}*{x}" if j == 0 else f"{x}⊗{a}"

    def fmt(self, comps: Mapping) -> str:
        parts = []
        for key in self.keys:
            p = comps.get(key)
            if p is None or p.is_zero():
                continue
            coef = p.format(self.base.variables)
            name = self.key_name(key)
            if coef == "1":
                parts.append(name)
            elif coef == "-1":
                parts.append("-" + name)
            elif len(p.terms) == 1:
                parts.append(f"{coef}*{name}")
            else:
                parts.append(f"({coef})*{name}")
        if not parts:
            return "0"
        s = parts[0]
        for t in parts[1:]:
            s += " - " + t[1:] if t.startswith("-") else " + " + t
        return s
