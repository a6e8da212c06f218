"""Built-in invariant suites behind ``infcycle selftest``."""

from __future__ import annotations

import sys
import time
from typing import Callable

from .complexes import KoszulData, koszul
from .cycles import (
    Deformation,
    SubvarietyGerm,
    is_milnor_cycle,
    koszul_top_sign,
    local_fundamental_class,
    naturality_check,
    newton_class,
)
from .hochcyc.bar import bar
from .hochcyc.eulerian import check_idempotents
from .hochcyc.homology import goodwillie_k, hodge, sbi_split_check
from .kaehler import PolyForm, wedge_all
from .polyalg.artin import AlgebraMap, catalog, rational_field, tensor_pair, truncated
from .polyalg.groebner import PolyContext
from .polyalg.regular import is_regular_sequence


class SuiteFailure(AssertionError):
    pass


def _require(cond: bool, prop: str) -> None:
    if not cond:
        raise SuiteFailure(prop)


def suite_algebras(full: bool) -> None:
    for name, A in catalog().items():
        try:
            A.check_axioms()
        except AssertionError as exc:
            raise SuiteFailure(f"{name}: {exc}") from None
        if A.is_local:
            _require(A.nilpotency_index() <= A.dim, f"{name}: m^dim = 0")


def suite_mixed_complex(full: bool) -> None:
    depth = 4 if full else 3
    for name, A in catalog().items():
        if A.dim > 4:
            continue
        for normalized in (True, False):
            checks = bar(A, depth, normalized).check_identities()
            for k, ok in checks.items():
                _require(ok, f"{name}: {k}")


def suite_eulerian(full: bool) -> None:
    for n in range(1, (5 if full else 4) + 1):
        for k, ok in check_idempotents(n).items():
            _require(ok, f"Eulerian idempotents n={n}: {k}")


def suite_hodge(full: bool) -> None:
    top = 3 if full else 2
    for name, A in catalog().items():
        for n in range(top + 1):
            for flavor in ("HH", "HC"):
                d = hodge(A, n, flavor, strict=False)
                for k, ok in d.checks.items():
                    _require(ok, f"{name} {flavor}_{n}: {k}")


def _pairs():
    eps, delta = truncated("eps", 2), truncated("delta", 3)
    x2, x3 = truncated("x", 2), truncated("x", 3)
    return [(rational_field(), eps), (x2, eps), (x3, eps), (x2, delta)]


def suite_bloch(full: bool) -> None:
    for R, A in _pairs():
        try:
            goodwillie_k(tensor_pair(R, A), 2)
        except RuntimeError as exc:
            raise SuiteFailure(str(exc)) from None


def suite_sbi(full: bool) -> None:
    for R, A in _pairs():
        for l in ((1, 2) if full else (1,)):
            r = sbi_split_check(tensor_pair(R, A), l)
            _require(r.exact, f"SBI splitting l={l} for {R!r} ⊗ {A!r}")


def suite_regularity(full: bool) -> None:
    P = PolyContext(("x", "y"), [])
    for seq, want in ((["x", "y"], True), (["x", "x"], False), (["x*y", "x+y"], True), (["x*y", "x^2"], False)):
        _require(is_regular_sequence(P, seq).regular == want, f"regularity of {seq}")


def suite_fundamental_class(full: bool) -> None:
    P = PolyContext(("x", "y", "z"), [])
    cases = [["x"], ["x", "y"], ["x", "y", "z"], ["x^2+y"], ["x*y", "y+z"], ["x+y*z", "y^2", "z-x"]]
    for seq in cases:
        K = koszul(KoszulData(P, seq))
        fc = local_fundamental_class(K)
        fs = [P.parse(f) for f in seq]
        want = wedge_all([PolyForm.d_of(f) for f in fs], P.nvars).scale(koszul_top_sign(len(fs)))
        _require((fc.top - want).is_zero(), f"local fundamental class of Koszul{tuple(seq)}")


def suite_cycles(full: bool) -> None:
    P = PolyContext(("x", "y", "z"), [])
    G = SubvarietyGerm(P, ["x", "y"])
    A = truncated("eps", 2)
    _require(not newton_class(Deformation(G, A, ["x+eps", "y"])).is_zero(), "Newton class of (x+eps, y) is nonzero")
    _require(newton_class(Deformation(G, A, ["x+eps*y^2", "y"])).is_zero(), "Newton class of (x+eps*y^2, y) is zero")
    _require(newton_class(Deformation(G, A, ["x", "y"])).is_zero(), "trivial deformation has zero class")
    rep = is_milnor_cycle(Deformation(G, A, ["x+eps*z", "y+eps*x"]), ["y+z"])
    _require(rep.is_cycle, "graded polynomial deformation is a cycle")
    rep = is_milnor_cycle(Deformation(G, A, ["x+eps/z", "y"], denominator="z"))
    _require(not rep.is_cycle, "denominator deformation is obstructed")
    C = truncated("delta", 3)
    phi = AlgebraMap(C, A, ["eps"])
    _require(bool(naturality_check(phi, Deformation(G, C, ["x+delta", "y"]), ["z"])), "naturality along delta -> eps")


SUITES: list[tuple[str, Callable[[bool], None]]] = [
    ("algebra-axioms", suite_algebras),
    ("regularity", suite_regularity),
    ("fundamental-class", suite_fundamental_class),
    ("mixed-complex", suite_mixed_complex),
    ("eulerian", suite_eulerian),
    ("hodge", suite_hodge),
    ("bloch-goodwillie", suite_bloch),
    ("sbi", suite_sbi),
    ("cycles", suite_cycles),
]


def run_selftest(full: bool = False, out=None) -> int:
    out = out or sys.stdout
    failed = []
    total = time.perf_counter()
    for name, fn in SUITES:
        t0 = time.perf_counter()
        try:
            fn(full)
            status = "pass"
        except SuiteFailure as exc:
            status = f"FAIL: {exc}"
            failed.append(name)
        out.write(f"{name:<20} {status}  ({time.perf_counter() - t0:.2f}s)\n")
    level = "full" if full else "quick"
    verdict = "pass" if not failed else "FAIL (" + ", ".join(failed) + ")"
    out.write(f"selftest {level}: {verdict}  ({time.perf_counter() - total:.2f}s)\n")
    return 0 if not failed else 1
