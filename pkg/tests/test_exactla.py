from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from infcycle.exactla import (
    QuotientSpace,
    RatMatrix,
    Subspace,
    kernel_basis,
    quotient_dim,
    rank,
    solve,
)

small = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return rows


def test_rank_examples():
    assert rank(RatMatrix.identity(2)) == 2
    assert rank(RatMatrix.zero(3, 5)) == 0
    assert rank(RatMatrix.from_dense([[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert kernel_basis(RatMatrix.identity(3)).dim == 0
    assert kernel_basis(RatMatrix.zero(2, 3)).dim == 3
    K = kernel_basis(RatMatrix.from_dense([[1, 1]]))
    assert K.dim == 1
    (v,) = K.vectors()
    assert v[0] == -v[1] != 0


def test_solve_examples():
    assert solve(RatMatrix.identity(3), [1, 2, 3]) == [1, 2, 3]
    x = solve(RatMatrix.from_dense([[1, 1]]), [2])
    assert x[0] + x[1] == 2
    assert solve(RatMatrix.from_dense([[0]]), [1]) is None


def test_quotient_dim_examples():
    full = Subspace.full(3)
    assert quotient_dim(full, Subspace(3)) == 3
    assert quotient_dim(full, full) == 0
    big = Subspace.span(5, [{0: Fraction(1)}, {1: Fraction(1)}, {2: Fraction(1)}, {3: Fraction(1)}])
    small = Subspace.span(5, [{0: Fraction(1), 1: Fraction(1)}, {2: Fraction(1)}])
    assert quotient_dim(big, small) == 2
    with pytest.raises(ValueError, match="not a subspace"):
        quotient_dim(small, big)


def test_no_stored_zeros():
    m = RatMatrix.from_dense([[0, 1], [0, 0]])
    assert m.nnz() == 1
    assert (m - m).nnz() == 0


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_independent_oracle(rows):
    m = RatMatrix.from_dense(rows)
    assert rank(m) == sympy.Matrix(rows).rank()


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_transpose_and_rank_nullity(rows):
    m = RatMatrix.from_dense(rows)
    assert rank(m) == rank(m.transpose())
    K = kernel_basis(m)
    assert K.dim + rank(m) == m.cols
    for v in K.vectors():
        assert not m.apply(v)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_remultiplies(rows, rhs):
    m = RatMatrix.from_dense(rows)
    b = rhs[: m.rows]
    x = solve(m, b)
    consistent = sympy.Matrix(rows).rank() == sympy.Matrix(rows).row_join(sympy.Matrix(b)).rank()
    assert (x is not None) == consistent
    if x is not None:
        got = m.apply({i: Fraction(v) for i, v in enumerate(x) if v})
        assert [got.get(i, 0) for i in range(m.rows)] == [Fraction(v) for v in b]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=0, max_size=4), st.lists(small, min_size=4, max_size=4))
def test_quotient_space_normal_form(rels, v):
    rel_dicts = [{i: Fraction(a) for i, a in enumerate(r) if a} for r in rels]
    Q = QuotientSpace(4, rel_dicts)
    assert Q.dim + Q.relation_dim == 4
    vec = {i: Fraction(a) for i, a in enumerate(v) if a}
    nf = Q.normal_form(vec)
    assert set(nf) <= set(Q.basis_coords)
    # v - nf lies in the relation span
    diff = {i: vec.get(i, 0) - nf.get(i, 0) for i in range(4)}
    diff = {i: c for i, c in diff.items() if c}
    assert Subspace.span(4, rel_dicts).contains(diff)
