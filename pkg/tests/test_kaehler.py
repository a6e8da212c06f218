from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from infcycle.exactla import rank
from infcycle.kaehler import (
    FormElement,
    MixedForms,
    PolyForm,
    bloch_group,
    de_rham,
    omega,
    projection_matrix,
    relative_forms,
)
from infcycle.polyalg import PolyContext, algebra, catalog, tensor_pair, truncated
from infcycle.polyalg.artin import rational_field


def kahler_dim_via_diagonal(A) -> int:
    """dim I/I² for I = ker(A⊗A → A); an independent model of Ω¹."""
    d = A.dim
    idx = lambda i, j: i * d + j
    mu = sympy.zeros(d, d * d)
    for i in range(d):
        for j in range(d):
            for k, c in A.mult_basis(i, j).items():
                mu[k, idx(i, j)] += sympy.Rational(c.numerator, c.denominator)
    I = mu.nullspace()

    def mul(u, v):
        out = sympy.zeros(d * d, 1)
        for a in range(d * d):
            if u[a] == 0:
                continue
            i, j = divmod(a, d)
            for b in range(d * d):
                if v[b] == 0:
                    continue
                k, l = divmod(b, d)
                for r, c1 in A.mult_basis(i, k).items():
                    for s, c2 in A.mult_basis(j, l).items():
                        out[idx(r, s)] += u[a] * v[b] * sympy.Rational(c1 * c2)
        return out

    I2 = [mul(u, v) for u in I for v in I]
    r2 = sympy.Matrix.hstack(*I2).rank() if I2 else 0
    return len(I) - r2


def jacobian_dim(A) -> int:
    """n·dim A minus the rank of the A-span of Jacobian rows of the relations."""
    ctx = A.ctx
    n, d = ctx.nvars, A.dim
    rows = []
    for g in ctx.groebner():
        for b in range(d):
            vec = {}
            for i in range(n):
                for k, c in A.element(A.basis_poly(b) * g.diff(i)).items():
                    vec[i * d + k] = c
            if vec:
                rows.append(vec)
    from infcycle.exactla import RatMatrix

    return n * d - (rank(RatMatrix.from_rows(n * d, rows)) if rows else 0)


def test_omega_examples():
    D = truncated("eps", 2)
    M = omega(D, 1)
    assert M.dim == 1 and M.names == ["deps"]
    S = tensor_pair(truncated("x", 2), D).S
    assert sorted(omega(S, 1).names) == sorted(["dx", "eps*dx", "deps", "x*deps"])
    free = omega(PolyContext(("x", "y"), []), 2)
    assert free.is_free and free.rank == 1 and free.generators == ["dx∧dy"]
    assert omega(D, 0).dim == 2  # Ω⁰ is the ring itself


def test_omega_hand_values():
    assert omega(truncated("x", 3), 1).dim == 2
    T = algebra(["x", "y"], ["x^2", "x*y", "y^2"])
    assert omega(T, 1).dim == 3
    assert omega(T, 2).dim == 1


@pytest.mark.parametrize("name", list(catalog()))
def test_omega1_matches_independent_models(name):
    A = catalog()[name]
    assert omega(A, 1).dim == kahler_dim_via_diagonal(A)
    assert omega(A, 1).dim == jacobian_dim(A)


def test_de_rham_examples():
    P = PolyContext(("x", "y"), [])
    assert de_rham(P.parse("x*y")).fmt(P.variables) == "y*dx + x*dy"
    assert de_rham(PolyForm.d_of(P.parse("x"))).is_zero()
    D = truncated("eps", 2)
    eps = FormElement(omega(D, 0), omega(D, 0).element("eps"))
    assert str(de_rham(eps)) == "deps"
    assert not omega(D, 1).element(PolyForm.d_of(D.ctx.parse("eps^2")))


@pytest.mark.parametrize("name", list(catalog()))
def test_d_squared_zero_on_catalog(name):
    A = catalog()[name]
    for p in range(3):
        d1 = omega(A, p).d_matrix()
        d2 = omega(A, p + 1).d_matrix()
        assert (d2 @ d1).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), st.integers(-3, 3), max_size=5))
def test_d_squared_zero_on_polynomial_forms(terms):
    from infcycle.polyalg.poly import Poly

    f = Poly(3, {e: Fraction(c) for e, c in terms.items()})
    assert PolyForm.d_of(f).d().is_zero()
    w = PolyForm.d_of(f).wedge(PolyForm.d_of(Poly.var(3, 1)).scale(f))
    assert w.d().d().is_zero()


def test_relative_forms_examples():
    P = tensor_pair(rational_field(), truncated("eps", 2))
    assert relative_forms(P, 1).basis_names() == ["deps"]
    P = tensor_pair(truncated("x", 2), truncated("eps", 2))
    rel = relative_forms(P, 1)
    assert rel.dim == 3
    assert sorted(rel.basis_names()) == sorted(["eps*dx", "deps", "x*deps"])
    assert relative_forms(tensor_pair(truncated("x", 2), rational_field()), 1).dim == 0


def test_bloch_examples():
    assert bloch_group(tensor_pair(rational_field(), truncated("eps", 2))).dim == 0
    g = bloch_group(tensor_pair(truncated("x", 2), truncated("eps", 2)))
    assert g.dim == 1 and g.names == ["eps*dx"] and g.label == "K2(S,I)_Q"
    assert bloch_group(tensor_pair(truncated("x", 3), truncated("eps", 2))).dim == 2


R_CATALOG = [
    rational_field(),
    truncated("x", 2),
    truncated("x", 3),
    truncated("x", 4),
    algebra(["x", "y"], ["x^2", "x*y", "y^2"]),
    algebra(["x", "y"], ["x^2", "y^2"]),
]


@pytest.mark.parametrize("R", R_CATALOG, ids=repr)
def test_bloch_group_of_dual_numbers_equals_forms(R):
    assert bloch_group(tensor_pair(R, truncated("eps", 2))).dim == omega(R, 1).dim


@pytest.mark.parametrize("R", R_CATALOG[:4], ids=repr)
@pytest.mark.parametrize("p", [0, 1, 2])
def test_split_exactness(R, p):
    pair = tensor_pair(R, truncated("delta", 3))
    proj = projection_matrix(pair, p)
    assert rank(proj) == omega(R, p).dim  # surjective
    assert omega(pair.S, p).dim == relative_forms(pair, p).dim + omega(R, p).dim


def test_mixed_forms_decomposition():
    base = PolyContext(("x", "y"), [])
    A = truncated("eps", 2)
    M = MixedForms(base, A, 2)
    ctx = M.context
    form = PolyForm.d_of(ctx.parse("x+eps*y^2")).wedge(PolyForm.d_of(ctx.parse("y")))
    comps = M.decompose(form - PolyForm.d_of(ctx.parse("x")).wedge(PolyForm.d_of(ctx.parse("y"))))
    assert M.is_bar(comps)
    assert M.fmt(comps) == "-y^2*dy⊗deps"
