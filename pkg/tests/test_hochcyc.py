import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from infcycle.hochcyc import (
    BarComplex,
    BudgetError,
    TruncationError,
    bar,
    check_idempotents,
    eulerian_idempotents,
    goodwillie_k,
    hc,
    hh,
    hodge,
    idempotents_commute,
    relative,
    relative_additivity,
    sbi_split_check,
)
from infcycle.hochcyc.eulerian import MAX_N
from infcycle.kaehler import exact_forms, omega
from infcycle.polyalg import algebra, catalog, tensor_pair, truncated
from infcycle.polyalg.artin import rational_field

CATALOG = catalog()


def truncated_hh_oracle(m: int, n: int) -> int:
    """HH_n(Q[x]/(x^m)) from the 2-periodic resolution: ker/coker of multiplication by m·x^(m-1)."""
    if n == 0:
        return m
    mat = sympy.zeros(m, m)
    for j in range(m):  # basis x^j ↦ m x^(j+m-1)
        if j + m - 1 < m:
            mat[j + m - 1, j] = m
    r = mat.rank()
    return m - r  # dim coker = dim ker for a square matrix


def truncated_hc_oracle(m: int, n: int) -> int:
    """Reduced cyclic homology from H̄C_n = H̄H_n − H̄C_(n−1) (graded SBI splitting) plus HC_n(Q)."""
    reduced_hh = lambda k: truncated_hh_oracle(m, k) - (1 if k == 0 else 0)
    rc = reduced_hh(0)
    for k in range(1, n + 1):
        rc = reduced_hh(k) - rc
    return rc + (1 if n % 2 == 0 else 0)


def test_bar_examples():
    Q = rational_field()
    assert [hh(Q, n).dim for n in range(1, 4)] == [0, 0, 0]
    raw = BarComplex(truncated("eps", 2), 3, normalized=False)
    assert [raw.dim(n) for n in range(4)] == [2, 4, 8, 16]
    checks = BarComplex(truncated("x", 3), 3, normalized=False).check_identities()
    assert checks["b^2=0"]


def test_budget_error_reports_requirement():
    A = algebra(["x", "y"], ["x^3", "y^3"])  # dim 9
    with pytest.raises(BudgetError) as err:
        bar(A, 5)
    assert err.value.required == 9**6


@pytest.mark.parametrize("name", [k for k, A in CATALOG.items() if A.dim <= 4])
@pytest.mark.parametrize("normalized", [True, False])
def test_mixed_complex_identities(name, normalized):
    checks = bar(CATALOG[name], 4, normalized).check_identities()
    assert all(checks.values()), checks


def test_hh_hc_examples():
    D = truncated("eps", 2)
    for A in CATALOG.values():
        assert hh(A, 0).dim == A.dim
        assert hc(A, 0).dim == A.dim
    assert hh(D, 1).dim == 1 == omega(D, 1).dim
    assert hc(D, 1).dim == 0
    S = tensor_pair(truncated("x", 2), D).S
    assert hc(S, 1).dim == hc(truncated("x", 2), 1).dim + 1


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_truncated_polynomial_homology_matches_resolution_oracle(m, n):
    A = truncated("x", m)
    assert hh(A, n).dim == truncated_hh_oracle(m, n)
    assert hc(A, n).dim == truncated_hc_oracle(m, n)


def test_hc_truncation_error_names_depth():
    with pytest.raises(TruncationError) as err:
        hc(truncated("eps", 2), 3, n_max=3)
    assert err.value.required_n_max == 4


def test_eulerian_examples():
    (e1,) = eulerian_idempotents(1)
    assert e1 == {(0,): 1}
    a, b = eulerian_idempotents(2)
    assert a == {(0, 1): sympy.Rational(1, 2), (1, 0): sympy.Rational(1, 2)}
    assert b == {(0, 1): sympy.Rational(1, 2), (1, 0): -sympy.Rational(1, 2)}
    with pytest.raises(ValueError):
        eulerian_idempotents(MAX_N + 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_idempotent_algebra_identities(n):
    assert all(check_idempotents(n).values())


@pytest.mark.parametrize("name", [k for k, A in CATALOG.items() if A.dim <= 4])
def test_idempotents_commute_with_b_and_B(name):
    assert idempotents_commute(CATALOG[name], 4)


@pytest.mark.parametrize("name", list(CATALOG))
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_hodge_pieces(name, n):
    A = CATALOG[name]
    dh = hodge(A, n, "HH")
    assert sum(dh.pieces.values()) == hh(A, n).dim
    assert dh.pieces[n] == omega(A, n).dim
    dc = hodge(A, n, "HC")
    assert sum(dc.pieces.values()) == hc(A, n).dim
    assert dc.pieces[n] == omega(A, n).dim - exact_forms(A, n).dim


def test_hodge_examples():
    for A in CATALOG.values():
        assert hodge(A, 1, "HH").pieces[1] == omega(A, 1).dim
    X3 = truncated("x", 3)
    assert hodge(X3, 2, "HC").pieces[2] == omega(X3, 2).dim - exact_forms(X3, 2).dim


PAIRS = [
    (rational_field(), truncated("eps", 2)),
    (truncated("x", 2), truncated("eps", 2)),
    (truncated("x", 3), truncated("eps", 2)),
    (truncated("x", 2), truncated("delta", 3)),
    (algebra(["x", "y"], ["x^2", "x*y", "y^2"]), truncated("eps", 2)),
]


def test_relative_examples():
    assert relative(tensor_pair(truncated("x", 2), rational_field()), 1).dim == 0
    assert relative(tensor_pair(truncated("x", 2), truncated("eps", 2)), 1, "HC").dim == 1
    assert relative(tensor_pair(rational_field(), truncated("eps", 2)), 1, "HH").dim == 1


@pytest.mark.parametrize("R,A", PAIRS, ids=lambda a: repr(a))
@pytest.mark.parametrize("flavor", ["HH", "HC"])
def test_relative_additivity(R, A, flavor):
    pair = tensor_pair(R, A)
    for n in range(3):
        assert relative_additivity(pair, n, flavor)["additive"]


@pytest.mark.parametrize("R,A", PAIRS, ids=lambda a: repr(a))
def test_goodwillie(R, A):
    pair = tensor_pair(R, A)
    r2 = goodwillie_k(pair, 2)
    assert r2.dim == r2.bloch_dim
    assert goodwillie_k(pair, 1).dim == len(pair.ideal)


def test_goodwillie_trivial_thickening():
    pair = tensor_pair(truncated("x", 2), rational_field())
    assert [goodwillie_k(pair, n).dim for n in (1, 2, 3)] == [0, 0, 0]


@pytest.mark.parametrize("R,A", PAIRS, ids=lambda a: repr(a))
@pytest.mark.parametrize("l", [1, 2])
def test_sbi_split(R, A, l):
    r = sbi_split_check(tensor_pair(R, A), l)
    assert r.exact, r


def test_sbi_example_dims():
    r = sbi_split_check(tensor_pair(rational_field(), truncated("eps", 2)), 1)
    assert r.dims == {"left": 1, "middle": 1, "right": 0}


def test_sbi_rejects_ungraded():
    A = algebra(["s", "t"], ["s^2 - t^3", "s*t", "t^4"])  # local, not homogeneous for unit weights
    assert A.is_local and not A.is_graded
    with pytest.raises(ValueError, match="requires graded artinian algebra"):
        sbi_split_check(tensor_pair(rational_field(), A), 1)


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 4), st.integers(0, 3))
def test_hh_of_truncated_polynomials_property(m, n):
    assert hh(truncated("x", m), n).dim == truncated_hh_oracle(m, n)
