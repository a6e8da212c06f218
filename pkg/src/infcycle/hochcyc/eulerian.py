"""Eulerian idempotents in Q[S_n] and their action on bar modules.

A permutation is a tuple σ with σ[i] the output position of input i; the
product στ means "apply τ, then σ".  The action on A ⊗ A^{⊗n} permutes the
last n factors and carries no sign: signs live in the group-algebra
coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

from ..exactla import RatMatrix

MAX_N = 6

GroupElt = dict  # permutation tuple -> Fraction


def compose(s: tuple, t: tuple) -> tuple:
    return tuple(s[t[i]] for i in range(len(t)))


def sign(p: tuple) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inv % 2 else 1


def ga_mul(x: GroupElt, y: GroupElt) -> GroupElt:
    out: dict = {}
    for s, a in x.items():
        for t, b in y.items():
            st = compose(s, t)
            v = out.get(st, 0) + a * b
            if v:
                out[st] = v
            else:
                out.pop(st, None)
    return out


def ga_add(x: GroupElt, y: GroupElt, c=1) -> GroupElt:
    out = dict(x)
    for s, b in y.items():
        v = out.get(s, 0) + c * b
        if v:
            out[s] = v
        else:
            out.pop(s, None)
    return out


def ga_identity(n: int) -> GroupElt:
    return {tuple(range(n)): Fraction(1)}


def shuffles(p: int, n: int) -> list[tuple]:
    """(p, n-p)-shuffles: inputs 0..p-1 and p..n-1 each keep their relative order."""
    out = []
    for pos in combinations(range(n), p):
        rest = [i for i in range(n) if i not in pos]
        out.append(tuple(pos) + tuple(rest))
    return out


def shuffle_element(n: int) -> GroupElt:
    """s_n = Σ_{p=1}^{n-1} Σ sgn(σ) σ over (p, n-p)-shuffles."""
    out: dict = {}
    for p in range(1, n):
        for s in shuffles(p, n):
            out[s] = out.get(s, 0) + Fraction(sign(s))
    return {k: v for k, v in out.items() if v}


def eigenvalue(i: int) -> int:
    return 2 ** i - 2


@lru_cache(maxsize=None)
def _idempotents(n: int) -> tuple:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_N:
        raise ValueError(f"Eulerian idempotents are limited to n <= {MAX_N}")
    if n == 1:
        return (ga_identity(1),)
    s = shuffle_element(n)
    ident = ga_identity(n)
    shifted = {j: ga_add(s, ident, -eigenvalue(j)) for j in range(1, n + 1)}
    out = []
    for i in range(1, n + 1):
        e = dict(ident)
        denom = Fraction(1)
        for j in range(1, n + 1):
            if j == i:
                continue
            e = ga_mul(e, shifted[j])
            denom *= eigenvalue(i) - eigenvalue(j)
        out.append({k: v / denom for k, v in e.items()})
    return tuple(out)


def eulerian_idempotents(n: int) -> list[GroupElt]:
    """[e_n^(1), ..., e_n^(n)] in Q[S_n]."""
    return [dict(e) for e in _idempotents(n)]


def antisymmetrizer(n: int) -> GroupElt:
    f = Fraction(1)
    for k in range(2, n + 1):
        f *= k
    return {p: Fraction(sign(p)) / f for p in permutations(range(n))}


def check_idempotents(n: int) -> dict[str, bool]:
    es = eulerian_idempotents(n)
    ortho = all(
        ga_mul(es[i], es[j]) == (es[i] if i == j else {}) for i in range(n) for j in range(n)
    )
    total: dict = {}
    for e in es:
        total = ga_add(total, e)
    s = shuffle_element(n) if n > 1 else {}
    prod = ga_identity(n)
    if n > 1:
        for j in range(1, n + 1):
            prod = ga_mul(prod, ga_add(s, ga_identity(n), -eigenvalue(j)))
        minimal = not prod
    else:
        minimal = True
    return {
        "orthogonal": ortho,
        "partition_of_unity": total == ga_identity(n),
        "shuffle_minimal_polynomial": minimal,
        "top_is_antisymmetrizer": es[-1] == antisymmetrizer(n),
    }


def action_matrix(x: GroupElt, basis: list[tuple], index: dict) -> RatMatrix:
    """Matrix of x acting on tensors (a0, a1..an) by permuting a1..an."""
    cols = []
    for t in basis:
        col: dict = {}
        rest = t[1:]
        n = len(rest)
        for s, c in x.items():
            out = [None] * n
            for i in range(n):
                out[s[i]] = rest[i]
            k = index[(t[0],) + tuple(out)]
            v = col.get(k, 0) + c
            if v:
                col[k] = v
            else:
                col.pop(k, None)
        cols.append(col)
    return RatMatrix.from_columns(len(basis), cols)
