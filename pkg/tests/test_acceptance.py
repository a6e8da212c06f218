"""Acceptance criteria; each test prints one [PASS]/[FAIL] line.

Run standalone with ``python3 tests/test_acceptance.py``.
"""

import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from infcycle.complexes import KoszulData, koszul, koszul_homology, verify_normal_forms, verify_witness
from infcycle.cycles import (
    Deformation,
    RegularityError,
    SubvarietyGerm,
    basis_change,
    cousin_boundary,
    koszul_top_sign,
    local_fundamental_class,
    naturality_check,
    newton_class,
    newton_via_fundamental_class,
)
from infcycle.hochcyc import bar, hodge, relative, sbi_split_check
from infcycle.kaehler import PolyForm, bloch_group, exact_forms, omega, wedge_all
from infcycle.polyalg import PolyContext, algebra, catalog, tensor_pair, truncated
from infcycle.polyalg.artin import AlgebraMap, rational_field
from infcycle.polyalg.poly import Poly
from infcycle.polyalg.regular import is_regular_sequence

FIXTURES = Path(__file__).parent / "fixtures"
P3 = PolyContext(("x", "y", "z"), [])
EPS = truncated("eps", 2)
DELTA = truncated("delta", 3)


def _random_poly(rng: random.Random, nvars: int, degree: int, terms: int, homogeneous: bool = False) -> Poly:
    out = {}
    for _ in range(terms):
        d = degree if homogeneous else rng.randint(0, degree)
        cuts = sorted(rng.randint(0, d) for _ in range(nvars - 1))
        exp = tuple(b - a for a, b in zip([0] + cuts, cuts + [d]))
        out[exp] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    return Poly(nvars, out)


def _lift(p: Poly, n: int) -> Poly:
    return p.embed(list(range(p.nvars)), n)


def test_criterion_1_bloch_equals_relative_cyclic_homology(acceptance_line):
    pairs = [
        ("Q", rational_field(), EPS),
        ("Q[x]/x^2", truncated("x", 2), EPS),
        ("Q[x]/x^3", truncated("x", 3), EPS),
        ("Q[x]/x^2", truncated("x", 2), DELTA),
    ]
    ok, details, slowest = True, [], 0.0
    for label, R, A in pairs:
        t0 = time.perf_counter()
        pair = tensor_pair(R, A)
        forms = bloch_group(pair).dim
        cyc = relative(pair, 1, "HC").dim
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        good = forms == cyc and elapsed < 30
        if A is EPS:
            good = good and forms == omega(R, 1).dim
        ok = ok and good
        details.append(f"{label}⊗{A.variables[0]}: {forms}={cyc}")
    acceptance_line(1, "Bloch group = relative HC_1", ok, "; ".join(details) + f", slowest pair {slowest:.1f}s")
    assert ok


def test_criterion_2_hodge_decomposition(acceptance_line):
    t0 = time.perf_counter()
    ok = True
    failures = []
    for name, A in catalog().items():
        for n in range(4):
            for flavor in ("HH", "HC"):
                d = hodge(A, n, flavor)
                good = sum(d.pieces.values()) == d.total
                top = omega(A, n).dim
                if flavor == "HC":
                    top -= exact_forms(A, n).dim
                good = good and d.pieces[n] == top
                if not good:
                    failures.append(f"{name} {flavor}_{n}")
                ok = ok and good
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 300
    acceptance_line(2, "Hodge pieces sum to HH_n; top pieces are forms", ok, f"{elapsed:.1f}s" + (f" failing {failures}" if failures else ""))
    assert ok


def test_criterion_3_mixed_complex_identities(acceptance_line):
    t0 = time.perf_counter()
    ok = True
    count = 0
    for A in catalog().values():
        if A.dim > 4:
            continue
        for normalized in (True, False):
            ok = ok and all(bar(A, 4, normalized).check_identities().values())
            count += 1
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60
    acceptance_line(3, "b² = B² = bB + Bb = 0 through depth 4", ok, f"{count} complexes, {elapsed:.1f}s")
    assert ok


def test_criterion_4_sbi_splitting(acceptance_line):
    t0 = time.perf_counter()
    pairs = [
        (rational_field(), EPS),
        (truncated("x", 2), EPS),
        (truncated("x", 3), EPS),
        (truncated("x", 2), DELTA),
        (rational_field(), algebra(["a", "b"], ["a^2", "a*b", "b^2"])),
    ]
    ok = all(sbi_split_check(tensor_pair(R, A), l).exact for R, A in pairs for l in (1, 2))
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 120
    acceptance_line(4, "SBI splits into short exact sequences", ok, f"{len(pairs)} graded pairs, l=1,2, {elapsed:.1f}s")
    assert ok


def _sequences_for_regularity():
    rng = random.Random(5)
    names = ("x", "y", "z")
    regular = []
    while len(regular) < 10:
        nv = rng.randint(1, 3)
        p = rng.randint(1, nv)
        seq = []
        for i in range(p):
            f = _random_poly(rng, nv, rng.randint(1, 2), 3, homogeneous=True)
            seq.append(f + Poly.var(nv, i, f.total_degree()))  # keeps the leading powers generic
        regular.append((PolyContext(names[:nv], []), seq))
    irregular = []
    for i in range(10):
        nv = 2 + i % 2
        ctx = PolyContext(names[:nv], [])
        a = _random_poly(rng, nv, 1, 2, homogeneous=True) + Poly.var(nv, 0)
        b = _random_poly(rng, nv, 2, 2, homogeneous=True) + Poly.var(nv, 1, 2)
        kind = i % 3
        if kind == 0:
            l = _random_poly(rng, nv, 1, 2, homogeneous=True) + Poly.var(nv, nv - 1)
            seq = [l * a, l * b]
        elif kind == 1:
            seq = [a, a]
        else:
            seq = [a, a * b]
        if nv == 3 and kind != 1:
            seq = [Poly.var(nv, 2)] + seq if kind == 2 else seq
        irregular.append((ctx, seq))
    return regular, irregular


def test_criterion_5_regularity_matches_koszul_homology(acceptance_line):
    t0 = time.perf_counter()
    regular, irregular = _sequences_for_regularity()
    ok = True
    counts = {"regular": 0, "irregular": 0}
    for label, cases in (("regular", regular), ("irregular", irregular)):
        for ctx, seq in cases:
            verdict = is_regular_sequence(ctx, seq).regular
            bound = sum(f.total_degree() for f in seq) + 1
            k = KoszulData(ctx, seq)
            vanishing = all(koszul_homology(k, i, bound).vanishes for i in range(1, len(seq) + 1))
            ok = ok and verdict == vanishing
            counts["regular" if vanishing else "irregular"] += 1
            ok = ok and (vanishing == (label == "regular"))
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60
    acceptance_line(5, "regularity verdict = Koszul H_{>=1} vanishing", ok, f"{counts}, {elapsed:.1f}s")
    assert ok


def test_criterion_6_local_fundamental_class(acceptance_line):
    t0 = time.perf_counter()
    rng = random.Random(6)
    ok = True
    n = 0
    for p in (1, 2, 3):
        for _ in range(4):
            seq = [_random_poly(rng, 3, 3, 3) for _ in range(p)]
            fc = local_fundamental_class(koszul(KoszulData(P3, seq)))
            want = wedge_all([PolyForm.d_of(f) for f in seq], 3).scale(koszul_top_sign(p))
            ok = ok and (fc.top - want).is_zero()
            n += 1
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 10
    acceptance_line(6, "(1/p!)dM_1∘…∘dM_p = ±df_1∧…∧df_p, sign (-1)^(p(p-1)/2)", ok, f"{n} sequences, p=1,2,3, {elapsed:.1f}s")
    assert ok


def _random_deformation(rng: random.Random, germ: SubvarietyGerm, A) -> Deformation:
    n = germ.context.nvars + A.ctx.nvars
    nb = germ.context.nvars
    m_basis = [Poly.var(n, nb + j) for j in range(A.ctx.nvars)]
    if A is DELTA:
        m_basis.append(m_basis[0] * m_basis[0])
    deformed = []
    for f in germ.sequence:
        g = _lift(f, n)
        for m in m_basis:
            g = g + m * _lift(_random_poly(rng, nb, 2, 2), n)
        deformed.append(g)
    return Deformation(germ, A, deformed)


def test_criterion_7_basis_independence(acceptance_line):
    t0 = time.perf_counter()
    rng = random.Random(7)
    germs = [SubvarietyGerm(P3, ["x", "y+z^2"]), SubvarietyGerm(P3, ["x-y*z", "y", "z^2"])]
    ok = True
    done = 0
    while done < 10:
        germ = germs[done % 2]
        p = germ.codim
        M = [[rng.randint(-3, 3) for _ in range(p)] for _ in range(p)]
        if _det(M) == 0:
            continue
        d = _random_deformation(rng, germ, EPS if done % 3 else DELTA)
        c = newton_class(d)
        d2 = basis_change(d, M)
        back = newton_class(d2).rebase(germ.sequence, M)
        ok = ok and back.difference(c).is_zero()
        ok = ok and newton_via_fundamental_class(d).difference(c).is_zero()
        done += 1
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60
    acceptance_line(7, "Newton class unchanged by constant basis changes", ok, f"{done} matrices, {elapsed:.1f}s")
    assert ok


def _det(M) -> Fraction:
    if len(M) == 1:
        return Fraction(M[0][0])
    return sum((-1) ** j * M[0][j] * _det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))


def test_criterion_8_graded_obstructions_vanish(acceptance_line):
    t0 = time.perf_counter()
    rng = random.Random(8)
    germs = [["x"], ["x+y^2"], ["x*y+z^2"], ["x", "y"], ["x", "y+z^2"], ["x^2-y", "z"]]
    extensions = ["z", "x+z", "y+z", "x+y+z"]
    ok = True
    total = boundaries = 0
    for seq in germs:
        germ = SubvarietyGerm(P3, seq)
        for A in (EPS, DELTA):
            for _ in range(5):
                c = newton_class(_random_deformation(rng, germ, A))
                tested = 0
                for g in extensions:
                    try:
                        b = cousin_boundary(c, g)
                    except RegularityError:
                        continue
                    tested += 1
                    ok = ok and b.vanishes and verify_witness(b.gamma.koszul_data, b.gamma.numerator, b.test)
                ok = ok and tested >= 2
                total += 1
                boundaries += tested
    elapsed = time.perf_counter() - t0
    ok = ok and total >= 50 and elapsed < 600
    acceptance_line(8, "Cousin boundaries of graded deformations vanish", ok, f"{total} deformations, {boundaries} certified boundaries, {elapsed:.1f}s")
    assert ok


def test_criterion_9_denominator_obstruction(acceptance_line):
    t0 = time.perf_counter()
    d = Deformation(SubvarietyGerm(P3, ["x", "y"]), EPS, ["x + eps/z", "y"], denominator="z")
    b = cousin_boundary(newton_class(d), "z")
    ok = not b.vanishes and verify_normal_forms(b.gamma.koszul_data, b.gamma.numerator, b.test)
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 10
    names = b.gamma.koszul_data.context.variables
    nf = ", ".join(f"{b.gamma.forms.key_name(k)}: {v.format(names)}" for k, v in sorted(b.test.normal_forms.items(), key=str))
    acceptance_line(9, "denominator deformation has a nonzero boundary at (x, y, z)", ok, f"normal forms {nf}")
    assert ok


def test_criterion_10_naturality(acceptance_line):
    t0 = time.perf_counter()
    germ = SubvarietyGerm(P3, ["x", "y"])
    E2 = algebra(["e1", "e2"], ["e1^2", "e1*e2", "e2^2"])
    W = algebra(["eps"], ["eps^2"], weights=[2])
    cases = [
        (AlgebraMap(DELTA, EPS, ["eps"]), DELTA, ["x+delta*z", "y+delta^2*x"]),
        (AlgebraMap(EPS, EPS, ["eps"]), EPS, ["x+eps*z", "y+eps*y^2"]),
        (AlgebraMap(DELTA, rational_field(), ["0"]), DELTA, ["x+delta*y", "y+delta^2"]),
        (AlgebraMap(EPS, E2, ["e1"]), EPS, ["x+eps*z^2", "y-eps*x"]),
        (AlgebraMap(E2, EPS, ["eps", "0"]), E2, ["x+e1*z+e2", "y+e2*y"]),
        (AlgebraMap(W, DELTA, ["delta^2"]), W, ["x+eps*z", "y+eps"]),
    ]
    ok = True
    for phi, C, seq in cases:
        rep = naturality_check(phi, Deformation(germ, C, seq), ["z", "x+z"])
        ok = ok and rep.commutes and rep.boundaries_agree
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60
    acceptance_line(10, "Newton classes commute with algebra maps", ok, f"{len(cases)} morphisms, {elapsed:.1f}s")
    assert ok


def test_criterion_11_determinism(acceptance_line, tmp_path):
    fixtures = sorted(FIXTURES.glob("*.problem"))
    same = True
    for f in fixtures:
        outs = []
        for i in range(2):
            out = tmp_path / f"{f.stem}.{i}.json"
            subprocess.run([sys.executable, "-m", "infcycle", "run", str(f), "--json", str(out)], check=False, capture_output=True)
            outs.append(out.read_bytes())
        same = same and outs[0] == outs[1]
    acceptance_line(11, "repeated runs give byte-identical JSON", same, f"{len(fixtures)} fixtures")
    assert same


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
