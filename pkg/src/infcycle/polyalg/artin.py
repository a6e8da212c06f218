"""Finite-dimensional commutative quotient algebras and split pairs S = R⊗A."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from ..exactla import RatMatrix
from .groebner import PolyContext
from .poly import Poly, format_monomial

Vec = dict  # sparse coordinates: basis index -> Fraction


class ArtinAlgebra:
    """Q[vars]/J with a monomial basis of standard monomials.

    ``augmentation`` is evaluation at the origin; it is None unless every
    variable is nilpotent and J lies in the ideal of the origin.
    """

    def __init__(self, ctx: PolyContext):
        self.ctx = ctx
        self.monomials: list[tuple] = ctx.standard_monomials()
        if not self.monomials:
            raise ValueError("zero algebra: the relations generate the unit ideal")
        self.index = {e: i for i, e in enumerate(self.monomials)}
        self.names = [format_monomial(e, ctx.variables) for e in self.monomials]
        self._mult: dict = {}
        n = ctx.nvars
        self.one_index = self.index[(0,) * n]
        local = all(not g.constant_term() for g in ctx.groebner())
        if local:
            for i in range(n):
                if not ctx.normal_form(Poly.var(n, i, self.dim)).is_zero():
                    local = False
                    break
        self.augmentation: list[Fraction] | None = None
        if local:
            self.augmentation = [Fraction(1) if i == self.one_index else Fraction(0) for i in range(self.dim)]
        w = ctx.degree_weights
        homog = all(r.is_homogeneous(w) for r in ctx.relations) and all(x > 0 for x in w)
        self.grading: list[int] | None = (
            [sum(a * b for a, b in zip(w, e)) for e in self.monomials] if homog else None
        )

    # -- basic data ----------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.monomials)

    @property
    def variables(self) -> tuple:
        return self.ctx.variables

    @property
    def is_local(self) -> bool:
        return self.augmentation is not None

    @property
    def is_graded(self) -> bool:
        return self.grading is not None

    def maximal_ideal(self) -> list[int]:
        """Basis indices spanning the augmentation kernel."""
        if not self.is_local:
            raise ValueError("algebra has no augmentation at the origin")
        return [i for i in range(self.dim) if i != self.one_index]

    def __repr__(self) -> str:
        rels = ", ".join(self.ctx.fmt(r) for r in self.ctx.relations)
        return f"ArtinAlgebra(Q[{', '.join(self.variables)}]/({rels}), dim={self.dim})"

    # -- elements ------------------------------------------------------
    def one(self) -> Vec:
        return {self.one_index: Fraction(1)}

    def basis_poly(self, i: int) -> Poly:
        return Poly.monomial(self.monomials[i])

    def element(self, p: Poly | str) -> Vec:
        if isinstance(p, str):
            p = self.ctx.parse(p)
        r = self.ctx.normal_form(p)
        return {self.index[e]: c for e, c in r.terms.items()}

    def to_poly(self, v: Mapping[int, Fraction]) -> Poly:
        n = self.ctx.nvars
        return Poly(n, {self.monomials[i]: c for i, c in v.items()})

    def fmt(self, v: Mapping[int, Fraction]) -> str:
        return self.ctx.fmt(self.to_poly(v))

    def mult_basis(self, i: int, j: int) -> Vec:
        if i > j:
            i, j = j, i
        key = (i, j)
        if key not in self._mult:
            e = tuple(a + b for a, b in zip(self.monomials[i], self.monomials[j]))
            self._mult[key] = self.element(Poly.monomial(e))
        return self._mult[key]

    def mul(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Vec:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mult_basis(i, j).items():
                    s = out.get(k, 0) + a * b * c
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def mult_matrix(self, v: Mapping[int, Fraction]) -> RatMatrix:
        """Matrix of multiplication by v."""
        cols = [self.mul(v, {j: Fraction(1)}) for j in range(self.dim)]
        return RatMatrix.from_columns(self.dim, cols)

    def augment(self, v: Mapping[int, Fraction]) -> Fraction:
        if self.augmentation is None:
            raise ValueError("algebra has no augmentation at the origin")
        return v.get(self.one_index, Fraction(0))

    # -- checks --------------------------------------------------------
    def check_axioms(self) -> None:
        """Exhaustive commutativity/associativity and augmentation checks."""
        d = self.dim
        for i, j in product(range(d), repeat=2):
            if self.mult_basis(i, j) != self.mult_basis(j, i):
                raise AssertionError("multiplication is not commutative")
        for i, j, k in product(range(d), repeat=3):
            left = self.mul(self.mult_basis(i, j), {k: Fraction(1)})
            right = self.mul({i: Fraction(1)}, self.mult_basis(j, k))
            if left != right:
                raise AssertionError("multiplication is not associative")
        if self.is_local:
            for i, j in product(range(d), repeat=2):
                lhs = self.augment(self.mult_basis(i, j))
                rhs = self.augment({i: Fraction(1)}) * self.augment({j: Fraction(1)})
                if lhs != rhs:
                    raise AssertionError("augmentation is not multiplicative")
            if self.nilpotency_index() is None:
                raise AssertionError("maximal ideal is not nilpotent")
        if self.grading is not None:
            for i, j in product(range(d), repeat=2):
                for k in self.mult_basis(i, j):
                    if self.grading[k] != self.grading[i] + self.grading[j]:
                        raise AssertionError("multiplication does not respect the grading")
            if [i for i in range(d) if self.grading[i] == 0] != [self.one_index]:
                raise AssertionError("weight-zero part is not Q·1")

    def nilpotency_index(self) -> int | None:
        """Smallest N with m^N = 0, or None when m is not nilpotent."""
        from ..exactla import Subspace

        m = [{i: Fraction(1)} for i in self.maximal_ideal()]
        power = m
        N = 1
        while power:
            if N > self.dim:
                return None
            prods = (self.mul(u, v) for u in power for v in m)
            power = Subspace.span(self.dim, (w for w in prods if w)).vectors()
            N += 1
        return N


def quotient_algebra(ctx: PolyContext) -> ArtinAlgebra:
    return ArtinAlgebra(ctx)


def algebra(variables: Sequence[str], relations: Sequence[str | Poly] = (), weights=None) -> ArtinAlgebra:
    """Shorthand: ``algebra(["eps"], ["eps^2"])``."""
    return ArtinAlgebra(PolyContext(tuple(variables), list(relations), "degrevlex", weights))


class AlgebraMap:
    """Q-algebra map between presented algebras, given by images of generators."""

    def __init__(self, source: ArtinAlgebra, target: ArtinAlgebra, images: Sequence[Poly | str]):
        if len(images) != source.ctx.nvars:
            raise ValueError("need one image per source variable")
        imgs = [target.ctx.parse(g) if isinstance(g, str) else g for g in images]
        for g in imgs:
            if g.nvars != target.ctx.nvars:
                raise ValueError("image lives in the wrong ring")
        self.source = source
        self.target = target
        self.images = imgs
        n = target.ctx.nvars
        for r in source.ctx.relations:
            if not target.ctx.normal_form(r.substitute(imgs, n)).is_zero():
                raise ValueError("images do not satisfy the source relations")
        self._matrix = None

    def apply_poly(self, p: Poly) -> Poly:
        return p.substitute(self.images, self.target.ctx.nvars)

    def apply(self, v: Mapping[int, Fraction]) -> Vec:
        return self.target.element(self.apply_poly(self.source.to_poly(v)))

    @property
    def matrix(self) -> RatMatrix:
        if self._matrix is None:
            cols = [self.target.element(self.apply_poly(self.source.basis_poly(i))) for i in range(self.source.dim)]
            self._matrix = RatMatrix.from_columns(self.target.dim, cols)
        return self._matrix

    def respects_augmentation(self) -> bool:
        if not (self.source.is_local and self.target.is_local):
            return False
        return all(not g.constant_term() for g in self.images)

    def respects_grading(self) -> bool:
        if self.source.grading is None or self.target.grading is None:
            return False
        sw = self.source.ctx.degree_weights
        tw = self.target.ctx.degree_weights
        for i, g in enumerate(self.images):
            g = self.target.ctx.normal_form(g)
            if g.is_zero():
                continue
            if not g.is_homogeneous(tw) or g.total_degree(tw) != sw[i]:
                return False
        return True


@dataclass
class RelativePair:
    """S = R⊗A with projection S→R, section R→S and ideal I = R⊗m_A."""

    S: ArtinAlgebra
    R: ArtinAlgebra
    A: ArtinAlgebra
    projection: AlgebraMap
    section: AlgebraMap
    ideal: list[int]  # S-basis indices spanning I
    r_positions: list[int]  # positions of R's variables among S's
    a_positions: list[int]

    def check(self) -> None:
        comp = self.projection.matrix @ self.section.matrix
        if comp != RatMatrix.identity(self.R.dim):
            raise AssertionError("projection∘section is not the identity")
        if self.S.dim != self.R.dim * self.A.dim:
            raise AssertionError("dim S != dim R · dim A")
        for i in self.ideal:
            if self.projection.apply({i: Fraction(1)}):
                raise AssertionError("ideal element not killed by the projection")


def tensor_pair(R: ArtinAlgebra, A: ArtinAlgebra) -> RelativePair:
    if not A.is_local:
        raise ValueError("the thickening algebra needs an augmentation (local artinian)")
    clash = set(R.variables) & set(A.variables)
    if clash:
        raise ValueError(f"variable names shared by R and A: {sorted(clash)}")
    nr, na = R.ctx.nvars, A.ctx.nvars
    n = nr + na
    rpos = list(range(nr))
    apos = list(range(nr, n))
    rels = [r.embed(rpos, n) for r in R.ctx.relations] + [a.embed(apos, n) for a in A.ctx.relations]
    weights = None
    if R.ctx.weights is not None or A.ctx.weights is not None:
        weights = R.ctx.degree_weights + A.ctx.degree_weights
    S = ArtinAlgebra(PolyContext(R.variables + A.variables, rels, "degrevlex", weights))
    proj_images = [Poly.var(nr, i) for i in range(nr)] + [Poly.const(nr, 0) for _ in range(na)]
    projection = AlgebraMap(S, R, proj_images)
    section = AlgebraMap(R, S, [Poly.var(n, i) for i in range(nr)])
    ideal = [i for i, e in enumerate(S.monomials) if any(e[nr:])]
    pair = RelativePair(S, R, A, projection, section, ideal, rpos, apos)
    return pair


# -- catalogue used by tests and the self-test -----------------------------

def rational_field() -> ArtinAlgebra:
    return algebra([], [])


def truncated(var: str = "eps", n: int = 2) -> ArtinAlgebra:
    """Q[var]/(var^n)."""
    return algebra([var], [f"{var}^{n}"])


def catalog() -> dict[str, ArtinAlgebra]:
    return {
        "Q": rational_field(),
        "Q[eps]/(eps^2)": truncated("eps", 2),
        "Q[x]/(x^3)": truncated("x", 3),
        "Q[x,y]/(x^2,xy,y^2)": algebra(["x", "y"], ["x^2", "x*y", "y^2"]),
        "Q[x]/(x^2)⊗Q[eps]/(eps^2)": tensor_pair(truncated("x", 2), truncated("eps", 2)).S,
    }
