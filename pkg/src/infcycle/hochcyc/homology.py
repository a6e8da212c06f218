"""Hochschild and cyclic homology, Hodge pieces, relative groups and the SBI check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..exactla import RatMatrix, Subspace, complement_representatives, kernel_basis, rank
from ..kaehler import bloch_group, exact_forms, omega
from ..polyalg.artin import ArtinAlgebra, RelativePair
from .bar import DEFAULT_BUDGET, BarComplex, bar
from .eulerian import MAX_N, action_matrix, eulerian_idempotents


class TruncationError(ValueError):
    def __init__(self, message: str, required_n_max: int):
        super().__init__(message)
        self.required_n_max = required_n_max


class _Mixed:
    """Normalized mixed complex (C, b, B), optionally restricted to a coordinate subcomplex."""

    def __init__(self, bc: BarComplex, ideal: set[int] | None = None):
        self.bar = bc
        self.ideal = ideal
        self.sel = []
        for n in range(bc.n_max + 1):
            if ideal is None:
                self.sel.append(list(range(bc.dim(n))))
            else:
                self.sel.append(bc.relative_mask(n, ideal))
        self._cache: dict = {}

    @property
    def n_max(self) -> int:
        return self.bar.n_max

    def dim(self, n: int) -> int:
        return len(self.sel[n]) if 0 <= n <= self.n_max else 0

    def _sel(self, n):
        return self.sel[n] if 0 <= n <= self.n_max else []

    def b(self, n: int) -> RatMatrix:
        key = ("b", n)
        if key not in self._cache:
            if 1 <= n <= self.n_max:
                m = self.bar.b_matrix(n).restrict(self._sel(n - 1), self._sel(n))
            else:
                m = RatMatrix.zero(self.dim(n - 1), self.dim(n))
            self._cache[key] = m
        return self._cache[key]

    def B(self, n: int) -> RatMatrix:
        key = ("B", n)
        if key not in self._cache:
            if 0 <= n < self.n_max:
                m = self.bar.B_matrix(n).restrict(self._sel(n + 1), self._sel(n))
            else:
                m = RatMatrix.zero(self.dim(n + 1), self.dim(n))
            self._cache[key] = m
        return self._cache[key]

    def E(self, n: int, i: int) -> RatMatrix:
        """Eulerian projector of weight i on C_n (weight 0 only on C_0)."""
        key = ("E", n, i)
        if key not in self._cache:
            d = self.dim(n)
            if n == 0:
                m = RatMatrix.identity(d) if i == 0 else RatMatrix.zero(d, d)
            elif 1 <= i <= n:
                if n > MAX_N:
                    raise ValueError(f"Hodge pieces need n <= {MAX_N}")
                full_key = ("Efull", n, i)
                cache = self.bar.__dict__.setdefault("_euler", {})
                if full_key not in cache:
                    e = eulerian_idempotents(n)[i - 1]
                    cache[full_key] = action_matrix(e, self.bar.basis[n], self.bar.index[n])
                m = cache[full_key].restrict(self._sel(n), self._sel(n))
            else:
                m = RatMatrix.zero(d, d)
            self._cache[key] = m
        return self._cache[key]

    # -- total complex -------------------------------------------------
    def blocks(self, n: int) -> list[int]:
        return [m for m in range(n, -1, -2)]

    def offsets(self, n: int) -> dict[int, int]:
        off, pos = {}, 0
        for m in self.blocks(n):
            off[m] = pos
            pos += self.dim(m)
        return off

    def tot_dim(self, n: int) -> int:
        return sum(self.dim(m) for m in self.blocks(n)) if n >= 0 else 0

    def D(self, n: int) -> RatMatrix:
        """b + B on Tot_n → Tot_{n-1}."""
        key = ("D", n)
        if key in self._cache:
            return self._cache[key]
        src, tgt = self.offsets(n), self.offsets(n - 1)
        ent = {}
        for m in self.blocks(n):
            if m - 1 >= 0:
                for (r, c), v in self.b(m).entries.items():
                    ent[(tgt[m - 1] + r, src[m] + c)] = v
            if m + 1 <= n - 1:
                for (r, c), v in self.B(m).entries.items():
                    ent[(tgt[m + 1] + r, src[m] + c)] = v
        M = RatMatrix(self.tot_dim(n - 1), self.tot_dim(n), ent)
        self._cache[key] = M
        return M

    def P(self, n: int, i: int) -> RatMatrix:
        """Weight-i projector on Tot_n: e^{(i-k)} on the block C_{n-2k}."""
        off = self.offsets(n)
        ent = {}
        for k, m in enumerate(self.blocks(n)):
            for (r, c), v in self.E(m, i - k).entries.items():
                ent[(off[m] + r, off[m] + c)] = v
        d = self.tot_dim(n)
        return RatMatrix(d, d, ent)

    def inclusion(self, n: int) -> RatMatrix:
        """C_n → Tot_n as the top block."""
        return RatMatrix(self.tot_dim(n), self.dim(n), {(j, j): Fraction(1) for j in range(self.dim(n))})

    def top_B(self, n: int) -> RatMatrix:
        """Tot_n → C_{n+1}: apply B to the top block."""
        Bn = self.B(n)
        return RatMatrix(self.dim(n + 1), self.tot_dim(n), dict(Bn.entries))

    # -- homology dims -------------------------------------------------
    def hh_dim(self, n: int, weight: int | None = None) -> int:
        if weight is None:
            return self.dim(n) - rank(self.b(n)) - rank(self.b(n + 1))
        En, En1 = self.E(n, weight), self.E(n + 1, weight)
        return rank(En) - rank(self.b(n) @ En) - rank(self.b(n + 1) @ En1)

    def hc_dim(self, n: int, weight: int | None = None) -> int:
        if weight is None:
            return self.tot_dim(n) - rank(self.D(n)) - rank(self.D(n + 1))
        Pn, Pn1 = self.P(n, weight), self.P(n + 1, weight)
        return rank(Pn) - rank(self.D(n) @ Pn) - rank(self.D(n + 1) @ Pn1)

    def check_commutation(self, n: int) -> bool:
        """b e^{(i)} = e^{(i)} b and B e^{(i)} = e^{(i+1)} B on C_n."""
        for i in range(0, n + 1):
            if n >= 1 and (self.b(n) @ self.E(n, i)) != (self.E(n - 1, i) @ self.b(n)):
                return False
            if n < self.n_max and (self.B(n) @ self.E(n, i)) != (self.E(n + 1, i + 1) @ self.B(n)):
                return False
        return True


def _depth(A: ArtinAlgebra, n: int, n_max: int | None, flavor: str, budget: int) -> int:
    need = n + 1
    if n_max is not None:
        if flavor == "HC" and n > n_max - 1:
            raise TruncationError(f"HC_{n} needs bar depth n_max >= {n + 1} (got {n_max})", n + 1)
        if flavor == "HH" and n > n_max:
            raise TruncationError(f"HH_{n} needs bar depth n_max >= {n} (got {n_max})", n)
    return max(need, n_max or 0)


def _mixed(A: ArtinAlgebra, depth: int, budget: int, ideal=None) -> _Mixed:
    bc = bar(A, depth, True, budget)
    cache = bc.__dict__.setdefault("_mixed", {})
    key = None if ideal is None else tuple(sorted(ideal))
    if key not in cache:
        cache[key] = _Mixed(bc, None if ideal is None else set(ideal))
    return cache[key]


def idempotents_commute(A: ArtinAlgebra, n_max: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Eulerian idempotents commute with b, and B shifts the weight by one, on C_0..C_n_max."""
    M = _mixed(A, n_max, budget)
    return all(M.check_commutation(n) for n in range(n_max + 1))


@dataclass
class HomologyResult:
    flavor: str
    degree: int
    dim: int
    basis: list = field(default_factory=list)  # representative cycles (sparse vectors)
    basis_names: list = field(default_factory=list)
    bar_depth: int = 0


def _homology_basis(Z_map: RatMatrix, B_map: RatMatrix, ambient: int) -> list[dict]:
    Z = kernel_basis(Z_map)
    Bsp = Subspace.span(ambient, B_map.column_dicts())
    return complement_representatives(Z.vectors(), Bsp)


def _tensor_combo(bc: BarComplex, n: int, sel: list[int], v: dict) -> str:
    from ..kaehler import format_combination

    return format_combination((bc.tensor_name(bc.basis[n][sel[j]]), v[j]) for j in sorted(v))


def hh(A: ArtinAlgebra, n: int, n_max: int | None = None, with_basis: bool = False, budget: int = DEFAULT_BUDGET) -> HomologyResult:
    if n < 0:
        raise ValueError("degree must be >= 0")
    depth = _depth(A, n, n_max, "HH", budget)
    M = _mixed(A, depth, budget)
    res = HomologyResult("HH", n, M.hh_dim(n), bar_depth=depth)
    if with_basis:
        res.basis = _homology_basis(M.b(n), M.b(n + 1), M.dim(n))
        res.basis_names = [_tensor_combo(M.bar, n, M.sel[n], v) for v in res.basis]
    return res


def hc(A: ArtinAlgebra, n: int, n_max: int | None = None, with_basis: bool = False, budget: int = DEFAULT_BUDGET) -> HomologyResult:
    if n < 0:
        raise ValueError("degree must be >= 0")
    depth = _depth(A, n, n_max, "HC", budget)
    M = _mixed(A, depth, budget)
    res = HomologyResult("HC", n, M.hc_dim(n), bar_depth=depth)
    if with_basis:
        res.basis = _homology_basis(M.D(n), M.D(n + 1), M.tot_dim(n))
    return res


@dataclass
class HodgeDecomposition:
    flavor: str
    degree: int
    total: int
    pieces: dict  # weight -> dim
    checks: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return all(self.checks.values())


def hodge(A: ArtinAlgebra, n: int, flavor: str = "HH", n_max: int | None = None, budget: int = DEFAULT_BUDGET, strict: bool = True) -> HodgeDecomposition:
    flavor = flavor.upper()
    if flavor not in ("HH", "HC"):
        raise ValueError("flavor must be HH or HC")
    if n + 1 > MAX_N:
        raise ValueError(f"Hodge pieces of degree {n} need idempotents of size {n + 1} > {MAX_N}")
    depth = _depth(A, n, n_max, flavor, budget)
    M = _mixed(A, depth, budget)
    if flavor == "HH":
        total = M.hh_dim(n)
        pieces = {i: M.hh_dim(n, i) for i in range(0, n + 1)}
    else:
        total = M.hc_dim(n)
        pieces = {i: M.hc_dim(n, i) for i in range(0, n + 1)}
    dec = HodgeDecomposition(flavor, n, total, pieces)
    dec.checks["sum_of_pieces"] = sum(pieces.values()) == total
    Om = omega(A, n)
    if flavor == "HH":
        dec.checks["top_piece_is_forms"] = pieces[n] == Om.dim
    else:
        dec.checks["top_piece_is_forms_mod_exact"] = pieces[n] == Om.dim - exact_forms(A, n).dim
    if strict and not dec.consistent:
        failed = [k for k, v in dec.checks.items() if not v]
        raise AssertionError(f"Hodge decomposition check failed: {failed}")
    return dec


def relative(pair: RelativePair, n: int, flavor: str = "HC", n_max: int | None = None, weight: int | None = None, budget: int = DEFAULT_BUDGET) -> HomologyResult:
    """Kernel of H(S) → H(R) computed on the coordinate subcomplex of tensors touching I."""
    flavor = flavor.upper()
    depth = _depth(pair.S, n, n_max, flavor, budget)
    M = _mixed(pair.S, depth, budget, set(pair.ideal))
    d = M.hh_dim(n, weight) if flavor == "HH" else M.hc_dim(n, weight)
    return HomologyResult("rel" + flavor, n, d, bar_depth=depth)


def relative_additivity(pair: RelativePair, n: int, flavor: str = "HC", budget: int = DEFAULT_BUDGET) -> dict:
    f = hh if flavor.upper() == "HH" else hc
    dS = f(pair.S, n, budget=budget).dim
    dR = f(pair.R, n, budget=budget).dim
    dI = relative(pair, n, flavor, budget=budget).dim
    return {"S": dS, "R": dR, "relative": dI, "additive": dS == dR + dI}


@dataclass
class GoodwillieResult:
    n: int
    dim: int
    label: str
    bloch_dim: int | None = None


def goodwillie_k(pair: RelativePair, n: int, budget: int = DEFAULT_BUDGET) -> GoodwillieResult:
    if n < 1:
        raise ValueError("n must be >= 1")
    d = relative(pair, n - 1, "HC", budget=budget).dim
    res = GoodwillieResult(n, d, f"dim K_{n}(S,I)_Q")
    if n == 2:
        bd = bloch_group(pair).dim
        res.bloch_dim = bd
        if bd != d:
            raise RuntimeError(f"Bloch/Goodwillie disagreement: Ω¹_(S,I)/dI has dim {bd}, HC_1(S,I) has dim {d}")
    return res


@dataclass
class SBIReport:
    weight: int
    dims: dict  # left, middle, right
    B_injective: bool
    I_surjective: bool
    image_in_kernel: bool
    additive: bool

    @property
    def exact(self) -> bool:
        return self.B_injective and self.I_surjective and self.image_in_kernel and self.additive


def _cycles(Z_map: RatMatrix, proj: RatMatrix) -> RatMatrix:
    """Basis (columns) of ker(Z_map) ∩ im(proj) for an idempotent proj."""
    image = Subspace.span(proj.rows, proj.column_dicts()).basis
    K = kernel_basis(Z_map @ image)
    cols = [image.apply(v) for v in K.vectors()]
    return RatMatrix.from_columns(proj.rows, cols)


def _induced_rank(f: RatMatrix, Zx: RatMatrix, By: RatMatrix) -> int:
    return rank((f @ Zx).hstack(By)) - rank(By)


def sbi_split_check(pair: RelativePair, l: int, budget: int = DEFAULT_BUDGET) -> SBIReport:
    """0 → H̄C^{(l-1)}_{l-1} →B H̄H^{(l)}_l →I H̄C^{(l)}_l → 0 on relative groups."""
    if not pair.A.is_graded:
        raise ValueError("requires graded artinian algebra")
    if l < 1:
        raise ValueError("weight must be >= 1")
    M = _mixed(pair.S, l + 1, budget, set(pair.ideal))
    # left: HC_{l-1}^{(l-1)}
    P_left = M.P(l - 1, l - 1)
    Z_left = _cycles(M.D(l - 1), P_left)
    B_left = M.D(l) @ M.P(l, l - 1)
    # middle: HH_l^{(l)}
    E_mid = M.E(l, l)
    Z_mid = _cycles(M.b(l), E_mid)
    B_mid = M.b(l + 1) @ M.E(l + 1, l)
    # right: HC_l^{(l)}
    P_right = M.P(l, l)
    Z_right = _cycles(M.D(l), P_right)
    B_right = M.D(l + 1) @ M.P(l + 1, l)

    dl = Z_left.cols - rank(B_left)
    dm = Z_mid.cols - rank(B_mid)
    dr = Z_right.cols - rank(B_right)
    rB = _induced_rank(M.top_B(l - 1), Z_left, B_mid)
    rI = _induced_rank(M.inclusion(l), Z_mid, B_right)
    comp = M.inclusion(l) @ M.top_B(l - 1)
    rIB = _induced_rank(comp, Z_left, B_right)
    return SBIReport(
        l,
        {"left": dl, "middle": dm, "right": dr},
        B_injective=rB == dl,
        I_surjective=rI == dr,
        image_in_kernel=rIB == 0,
        additive=dm == dl + dr,
    )
