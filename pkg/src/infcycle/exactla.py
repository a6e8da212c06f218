"""Exact sparse linear algebra over the rationals.

Every homology, kernel and membership computation in the package bottoms out
here.  Matrices are sparse maps ``(row, col) -> Fraction`` and elimination is
fraction-free: rows are scaled to primitive integer vectors and combined with
integer multipliers, which keeps coefficient growth in check on the very
sparse bar-complex differentials.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

Vector = dict  # sparse vector: index -> Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RatMatrix:
    """Sparse rational matrix.  Zero entries are never stored."""

    __slots__ = ("rows", "cols", "entries", "_row_cache")

    def __init__(self, rows: int, cols: int, entries: Mapping | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        clean = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry ({i}, {j}) outside {rows}x{cols}")
                v = _frac(v)
                if v:
                    clean[(i, j)] = v
        self.entries = clean
        self._row_cache = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    ent[(i, j)] = v
        return cls(rows, cols, ent)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, Fraction]]) -> "RatMatrix":
        ent = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                ent[(i, j)] = v
        return cls(nrows, len(columns), ent)

    @classmethod
    def from_rows(cls, ncols: int, rows: Sequence[Mapping[int, Fraction]]) -> "RatMatrix":
        ent = {}
        for i, row in enumerate(rows):
            for j, v in row.items():
                ent[(i, j)] = v
        return cls(len(rows), ncols, ent)

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def row_dicts(self) -> list[dict]:
        if self._row_cache is None:
            out = [dict() for _ in range(self.rows)]
            for (i, j), v in self.entries.items():
                out[i][j] = v
            self._row_cache = out
        return self._row_cache

    def column_dicts(self) -> list[dict]:
        out = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def column(self, j: int) -> dict:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self) -> str:
        return f"RatMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    # -- arithmetic ---------------------------------------------------
    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    T = property(transpose)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in matrix sum")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ent.get(k, 0) + v
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return RatMatrix(self.rows, self.cols, ent)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def scale(self, c) -> "RatMatrix":
        c = _frac(c)
        if not c:
            return RatMatrix(self.rows, self.cols)
        return RatMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        right = other.row_dicts()
        acc: dict = {}
        for (i, k), v in self.entries.items():
            for j, w in right[k].items():
                key = (i, j)
                acc[key] = acc.get(key, 0) + v * w
        return RatMatrix(self.rows, other.cols, {k: v for k, v in acc.items() if v})

    def apply(self, vec: Mapping[int, Fraction]) -> dict:
        """Matrix times sparse vector."""
        cols = self.column_dicts() if len(vec) * 4 > self.cols else None
        out: dict = {}
        if cols is None:
            for (i, j), v in self.entries.items():
                x = vec.get(j)
                if x:
                    out[i] = out.get(i, 0) + v * x
        else:
            for j, x in vec.items():
                if x:
                    for i, v in cols[j].items():
                        out[i] = out.get(i, 0) + v * x
        return {i: v for i, v in out.items() if v}

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        ent = dict(self.entries)
        ent.update({(i, j + self.cols): v for (i, j), v in other.entries.items()})
        return RatMatrix(self.rows, self.cols + other.cols, ent)

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        ent = dict(self.entries)
        ent.update({(i + self.rows, j): v for (i, j), v in other.entries.items()})
        return RatMatrix(self.rows + other.rows, self.cols, ent)

    def restrict(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        """Submatrix on the given (ordered) row and column index lists."""
        rpos = {r: a for a, r in enumerate(rows)}
        cpos = {c: b for b, c in enumerate(cols)}
        ent = {}
        for (i, j), v in self.entries.items():
            a = rpos.get(i)
            if a is None:
                continue
            b = cpos.get(j)
            if b is not None:
                ent[(a, b)] = v
        return RatMatrix(len(rows), len(cols), ent)


# ---------------------------------------------------------------------------
# fraction-free elimination on sparse integer rows


def _primitive(row: Mapping[int, Fraction]) -> dict:
    """Scale a rational row to a primitive integer row with positive leading entry."""
    den = 1
    for v in row.values():
        d = v.denominator
        den = den * d // gcd(den, d)
    ints = {j: int(v * den) for j, v in row.items() if v}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        ints = {j: v // g for j, v in ints.items()}
    return ints


def _combine(row: dict, piv: dict, col: int) -> dict:
    """Eliminate ``col`` from ``row`` using ``piv``; integer arithmetic only."""
    a = piv[col]
    b = row[col]
    g = gcd(a, b)
    a //= g
    b //= g
    out = {j: a * v for j, v in row.items()}
    for j, v in piv.items():
        s = out.get(j, 0) - b * v
        if s:
            out[j] = s
        else:
            out.pop(j, None)
    if out:
        c = 0
        for v in out.values():
            c = gcd(c, v)
            if c == 1:
                break
        if c > 1:
            out = {j: v // c for j, v in out.items()}
    return out


class Echelon:
    """Incremental row echelon form keyed by pivot column.

    Rows are inserted one at a time; the leading (smallest) column of each
    stored row is its pivot.  ``reduce`` brings a vector to normal form
    against the stored rows, so membership in the row space is a single
    reduction.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping[int, Fraction]) -> dict:
        cur = _primitive(row)
        done: dict = {}
        # walk columns in increasing order; entries left of the frontier are final
        while cur:
            c = min(cur)
            piv = self.pivots.get(c)
            if piv is None:
                done[c] = cur.pop(c)
                # scale bookkeeping: keep done and cur on a common integer scale
                continue
            a = piv[c]
            b = cur[c]
            g = gcd(a, b)
            a //= g
            b //= g
            if a != 1:
                done = {j: a * v for j, v in done.items()}
            out = {j: a * v for j, v in cur.items()}
            for j, v in piv.items():
                s = out.get(j, 0) - b * v
                if s:
                    out[j] = s
                else:
                    out.pop(j, None)
            cur = out
        return done

    def insert(self, row: Mapping[int, Fraction]) -> bool:
        """Insert a row; return True when it was independent of the stored rows."""
        cur = _primitive(row)
        while cur:
            c = min(cur)
            piv = self.pivots.get(c)
            if piv is None:
                if cur[c] < 0:
                    cur = {j: -v for j, v in cur.items()}
                self.pivots[c] = cur
                return True
            cur = _combine(cur, piv, c)
        return False

    def contains(self, row: Mapping[int, Fraction]) -> bool:
        return not self.reduce(row)

    def reduced_rows(self) -> dict[int, dict]:
        """Fully reduced echelon form: each pivot column is zero in every other row.

        Returned rows are rational and normalised so the pivot entry is 1.
        """
        cols = sorted(self.pivots, reverse=True)
        red: dict[int, dict] = {}
        for c in cols:
            row = dict(self.pivots[c])
            for c2 in [j for j in row if j != c and j in red]:
                if c2 not in row:
                    continue
                row = _combine(row, red[c2], c2)
            red[c] = row
        out = {}
        for c, row in red.items():
            p = Fraction(row[c])
            out[c] = {j: Fraction(v) / p for j, v in row.items()}
        return out


def _ordered_rows(m: RatMatrix) -> list[dict]:
    rows = [r for r in m.row_dicts() if r]
    # sparse rows and small leading entries first keep fill-in and growth low
    rows.sort(key=lambda r: (len(r), min(abs(v.numerator) for v in r.values())))
    return rows


def rank(m: RatMatrix) -> int:
    """Exact rank over the rationals."""
    if m.rows > m.cols * 2 and m.cols:
        m = m.transpose()
    ech = Echelon(m.cols)
    for r in _ordered_rows(m):
        ech.insert(r)
    return len(ech)


def row_echelon(m: RatMatrix) -> Echelon:
    ech = Echelon(m.cols)
    for r in _ordered_rows(m):
        ech.insert(r)
    return ech


class Subspace:
    """Subspace of Q^n given by a basis of linearly independent column vectors."""

    def __init__(self, ambient_dim: int, basis: RatMatrix | None = None, *, check: bool = True):
        if basis is None:
            basis = RatMatrix(ambient_dim, 0)
        if basis.rows != ambient_dim:
            raise ValueError("basis vectors must have length ambient_dim")
        if check and rank(basis) != basis.cols:
            raise ValueError("basis vectors are linearly dependent")
        self.ambient_dim = ambient_dim
        self.basis = basis
        self._ech = None

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Mapping[int, Fraction]]) -> "Subspace":
        """Subspace spanned by arbitrary vectors, keeping the first independent ones in order."""
        ech = Echelon(ambient_dim)
        keep = []
        for v in vectors:
            if ech.insert(v):
                keep.append({i: _frac(x) for i, x in v.items() if x})
        sub = cls(ambient_dim, RatMatrix.from_columns(ambient_dim, keep), check=False)
        sub._ech = ech
        return sub

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, RatMatrix.identity(n), check=False)

    @property
    def dim(self) -> int:
        return self.basis.cols

    def vectors(self) -> list[dict]:
        return self.basis.column_dicts()

    def _echelon(self) -> Echelon:
        if self._ech is None:
            ech = Echelon(self.ambient_dim)
            for v in self.vectors():
                ech.insert(v)
            self._ech = ech
        return self._ech

    def contains(self, v: Mapping[int, Fraction]) -> bool:
        return self._echelon().contains(v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.vectors())

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} in Q^{self.ambient_dim})"


def kernel_basis(m: RatMatrix) -> Subspace:
    """Basis of the right null space, one vector per free column (in column order)."""
    ech = row_echelon(m)
    red = ech.reduced_rows()
    pivots = set(red)
    by_col: dict[int, list] = {}
    for c, row in red.items():
        for j, v in row.items():
            if j != c:
                by_col.setdefault(j, []).append((c, v))
    vecs = []
    for f in range(m.cols):
        if f in pivots:
            continue
        v = {f: Fraction(1)}
        for c, coef in by_col.get(f, ()):
            v[c] = -coef
        vecs.append(v)
    return Subspace(m.cols, RatMatrix.from_columns(m.cols, vecs), check=False)


def image_basis(m: RatMatrix) -> Subspace:
    """Column space of ``m``, spanned by the first independent columns."""
    return Subspace.span(m.rows, m.column_dicts())


def solve(m: RatMatrix, b: Sequence | Mapping[int, Fraction]) -> list[Fraction] | None:
    """Some x with m·x = b, or None when the system is inconsistent."""
    if isinstance(b, Mapping):
        bvec = {i: _frac(v) for i, v in b.items() if v}
    else:
        if len(b) != m.rows:
            raise ValueError("right-hand side length must equal the row count")
        bvec = {i: _frac(v) for i, v in enumerate(b) if v}
    aug = m.hstack(RatMatrix.from_columns(m.rows, [bvec]))
    ech = row_echelon(aug)
    red = ech.reduced_rows()
    if m.cols in red:
        return None
    x = [Fraction(0)] * m.cols
    for c, row in red.items():
        x[c] = row.get(m.cols, Fraction(0))
    return x


def quotient_dim(big: Subspace, small: Subspace) -> int:
    if big.ambient_dim != small.ambient_dim or not big.contains_subspace(small):
        raise ValueError("not a subspace")
    return big.dim - small.dim


def complement_representatives(
    candidates: Iterable[Mapping[int, Fraction]], small: Subspace
) -> list[dict]:
    """Greedy representatives of span(candidates)/small, in candidate order.

    A candidate is kept when it is independent of ``small`` together with the
    candidates already kept; the result is a basis of the quotient.
    """
    ech = Echelon(small.ambient_dim)
    for v in small.vectors():
        ech.insert(v)
    out = []
    for v in candidates:
        if ech.insert(v):
            out.append({i: _frac(x) for i, x in v.items() if x})
    return out


def coordinates(basis: Sequence[Mapping[int, Fraction]], v: Mapping[int, Fraction], ambient_dim: int) -> list[Fraction] | None:
    """Coefficients expressing ``v`` in the (independent) ``basis``, or None."""
    m = RatMatrix.from_columns(ambient_dim, list(basis))
    return solve(m, dict(v))


def vec_add(u: Mapping, v: Mapping, c=1) -> dict:
    out = dict(u)
    for k, x in v.items():
        s = out.get(k, 0) + c * x
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


class QuotientSpace:
    """Q^n modulo a subspace, with a coordinate basis of surviving columns.

    With ``prefer="low"`` each relation is pivoted on its highest coordinate,
    so the lowest coordinates survive as the quotient basis.
    """

    def __init__(self, n: int, relations: Iterable[Mapping[int, Fraction]], prefer: str = "low"):
        if prefer not in ("low", "high"):
            raise ValueError("prefer must be 'low' or 'high'")
        self.n = n
        self._flip = prefer == "low"
        ech = Echelon(n)
        for r in relations:
            if r:
                ech.insert(self._map(r))
        self._rows = ech.reduced_rows()
        pivots = {self._idx(c) for c in self._rows}
        self.basis_coords = [c for c in range(n) if c not in pivots]
        self._pos = {c: i for i, c in enumerate(self.basis_coords)}

    def _idx(self, c: int) -> int:
        return self.n - 1 - c if self._flip else c

    def _map(self, v: Mapping[int, Fraction]) -> dict:
        return {self._idx(c): _frac(x) for c, x in v.items() if x}

    @property
    def dim(self) -> int:
        return len(self.basis_coords)

    @property
    def relation_dim(self) -> int:
        return len(self._rows)

    def normal_form(self, v: Mapping[int, Fraction]) -> dict:
        w = self._map(v)
        out = dict(w)
        for c, x in w.items():
            row = self._rows.get(c)
            if row is None:
                continue
            for j, y in row.items():
                s = out.get(j, 0) - x * y
                if s:
                    out[j] = s
                else:
                    out.pop(j, None)
        return {self._idx(c): x for c, x in out.items()}

    def coords(self, v: Mapping[int, Fraction]) -> dict:
        """Coordinates of the class of v in the surviving basis (sparse)."""
        return {self._pos[c]: x for c, x in self.normal_form(v).items()}

    def lift(self, coords: Mapping[int, Fraction]) -> dict:
        return {self.basis_coords[i]: _frac(x) for i, x in coords.items() if x}

    def is_zero(self, v: Mapping[int, Fraction]) -> bool:
        return not self.normal_form(v)
