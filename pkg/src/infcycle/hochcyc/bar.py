"""Bar complexes with Hochschild boundary b and Connes' operator B."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from ..exactla import RatMatrix
from ..polyalg.artin import ArtinAlgebra

DEFAULT_BUDGET = 20000


class BudgetError(ValueError):
    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


def check_budget(A: ArtinAlgebra, n_max: int, budget: int = DEFAULT_BUDGET) -> None:
    need = A.dim ** (n_max + 1)
    if need > budget:
        raise BudgetError(
            f"bar complex up to degree {n_max} needs dim(A)^{n_max + 1} = {need} > budget {budget}", need
        )


class BarComplex:
    """C_n = A ⊗ Ā^{⊗n} (normalized) or A^{⊗(n+1)} (raw), n = 0..n_max.

    ``b[n]``: C_n → C_{n-1} for 1 <= n <= n_max.
    ``B[n]``: C_n → C_{n+1} for 0 <= n <= n_max - 1.
    """

    def __init__(self, A: ArtinAlgebra, n_max: int, normalized: bool = True, budget: int = DEFAULT_BUDGET):
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        check_budget(A, n_max, budget)
        if normalized and not A.is_local:
            raise ValueError("normalized bar complex needs the unit as a basis element")
        self.algebra = A
        self.n_max = n_max
        self.normalized = normalized
        one = A.one_index
        full = list(range(A.dim))
        bar = [i for i in full if i != one] if normalized else full
        self.basis: list[list[tuple]] = []
        self.index: list[dict] = []
        for n in range(n_max + 1):
            ts = [t for t in product(full, *([bar] * n))]
            self.basis.append(ts)
            self.index.append({t: i for i, t in enumerate(ts)})
        self.b: dict[int, RatMatrix] = {n: self._build_b(n) for n in range(1, n_max + 1)}
        self.B: dict[int, RatMatrix] = {n: self._build_B(n) for n in range(0, n_max)}

    def dim(self, n: int) -> int:
        return len(self.basis[n]) if 0 <= n <= self.n_max else 0

    def b_matrix(self, n: int) -> RatMatrix:
        if n in self.b:
            return self.b[n]
        return RatMatrix.zero(self.dim(n - 1), self.dim(n))

    def B_matrix(self, n: int) -> RatMatrix:
        if n in self.B:
            return self.B[n]
        return RatMatrix.zero(self.dim(n + 1), self.dim(n))

    # -- construction --------------------------------------------------
    def _build_b(self, n: int) -> RatMatrix:
        A = self.algebra
        one = A.one_index
        tgt = self.index[n - 1]
        cols = []
        for t in self.basis[n]:
            col: dict = {}

            def add(tensor, c):
                k = tgt[tensor]
                s = col.get(k, 0) + c
                if s:
                    col[k] = s
                else:
                    col.pop(k, None)

            for i in range(n):
                sign = 1 if i % 2 == 0 else -1
                for k, c in A.mult_basis(t[i], t[i + 1]).items():
                    if self.normalized and i >= 1 and k == one:
                        continue
                    add(t[:i] + (k,) + t[i + 2:], sign * c)
            sign = 1 if n % 2 == 0 else -1
            for k, c in A.mult_basis(t[n], t[0]).items():
                add((k,) + t[1:n], sign * c)
            cols.append(col)
        return RatMatrix.from_columns(self.dim(n - 1), cols)

    def _build_B(self, n: int) -> RatMatrix:
        if self.normalized:
            return self._build_B_normalized(n)
        return self._build_B_raw(n)

    def _build_B_normalized(self, n: int) -> RatMatrix:
        one = self.algebra.one_index
        tgt = self.index[n + 1]
        cols = []
        for t in self.basis[n]:
            col: dict = {}
            if t[0] != one:
                for i in range(n + 1):
                    sign = -1 if (n * i) % 2 else 1
                    k = tgt[(one,) + t[i:] + t[:i]]
                    col[k] = col.get(k, 0) + sign
            cols.append({k: Fraction(v) for k, v in col.items() if v})
        return RatMatrix.from_columns(self.dim(n + 1), cols)

    def cyclic_operator(self, n: int) -> RatMatrix:
        """t(a0,...,an) = (-1)^n (an, a0, ..., a_{n-1}) on the raw module."""
        if self.normalized:
            raise ValueError("the cyclic operator is used on the raw complex only")
        idx = self.index[n]
        sign = -1 if n % 2 else 1
        cols = [{idx[(t[n],) + t[:n]]: Fraction(sign)} for t in self.basis[n]]
        return RatMatrix.from_columns(self.dim(n), cols)

    def _build_B_raw(self, n: int) -> RatMatrix:
        one = self.algebra.one_index
        t_n = self.cyclic_operator(n)
        N = RatMatrix.zero(self.dim(n), self.dim(n))
        power = RatMatrix.identity(self.dim(n))
        for _ in range(n + 1):
            N = N + power
            power = t_n @ power
        idx = self.index[n + 1]
        s = RatMatrix.from_columns(self.dim(n + 1), [{idx[(one,) + t]: Fraction(1)} for t in self.basis[n]])
        one_minus_t = RatMatrix.identity(self.dim(n + 1)) - self.cyclic_operator(n + 1)
        return one_minus_t @ s @ N

    # -- identities ----------------------------------------------------
    def check_identities(self) -> dict[str, bool]:
        ok_b2 = all((self.b_matrix(n - 1) @ self.b_matrix(n)).is_zero() for n in range(2, self.n_max + 1))
        ok_B2 = all((self.B_matrix(n + 1) @ self.B_matrix(n)).is_zero() for n in range(0, self.n_max - 1))
        ok_bB = True
        for n in range(0, self.n_max):
            # on C_n: b_{n+1} B_n + B_{n-1} b_n
            lhs = self.b_matrix(n + 1) @ self.B_matrix(n)
            if n >= 1:
                lhs = lhs + self.B_matrix(n - 1) @ self.b_matrix(n)
            if not lhs.is_zero():
                ok_bB = False
        return {"b^2=0": ok_b2, "B^2=0": ok_B2, "bB+Bb=0": ok_bB}

    def tensor_name(self, t: tuple) -> str:
        names = self.algebra.names
        return "⊗".join(names[i] for i in t)

    def relative_mask(self, n: int, ideal: set[int]) -> list[int]:
        """Basis tensors with at least one factor in ``ideal`` (the kernel of a split projection)."""
        return [i for i, t in enumerate(self.basis[n]) if any(a in ideal for a in t)]


def bar(A: ArtinAlgebra, n_max: int, normalized: bool = True, budget: int = DEFAULT_BUDGET) -> BarComplex:
    """Cached bar complex of A through degree n_max."""
    cache = A.__dict__.setdefault("_bar_cache", {})
    key = normalized
    cur = cache.get(key)
    if cur is None or cur.n_max < n_max:
        cur = BarComplex(A, n_max, normalized, budget)
        cache[key] = cur
    elif budget < A.dim ** (n_max + 1):
        check_budget(A, n_max, budget)
    return cur
