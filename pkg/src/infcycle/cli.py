"""Batch front end: problem files in, tables and versioned JSON reports out.

Problem file grammar (one statement per line, ``#`` starts a comment)::

    [ring P]            variables = x, y, z     order = degrevlex    relations = ...
    [algebra A]         variables = eps         relations = eps^2    weights = 1   graded = yes
    [pair S]            R = Rx                  A = A                (R = Q for the field)
    [sequence F]        ring = P                elements = x, y      exponents = 1, 1
    [deformation D]     base = F                algebra = A          deformed = x + eps, y
                        denominator = z
    [morphism phi]      source = C              target = A           images = eps
    [commands]
    bloch-k2 S
    obstruction D extensions="z, y + z"

Every key sits on its own ``key = value`` line.  Names must be defined before
they are referenced.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import shlex
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import __version__
from .complexes import KoszulData, koszul, koszul_homology, verify_normal_forms, verify_witness
from .cycles import (
    Deformation,
    ExtClass,
    RegularityError,
    SubvarietyGerm,
    alpha,
    dual_numbers_tangent,
    is_milnor_cycle,
    koszul_top_sign,
    local_fundamental_class,
    naturality_check,
    newton_class,
)
from .hochcyc.bar import BudgetError
from .hochcyc.homology import TruncationError, goodwillie_k, hc, hh, hodge, relative, sbi_split_check
from .kaehler import PolyForm, bloch_group, omega, wedge_all
from .polyalg.artin import AlgebraMap, ArtinAlgebra, RelativePair, rational_field, tensor_pair
from .polyalg.groebner import PolyContext
from .polyalg.parse import PolyParseError, parse_rational
from .polyalg.poly import Poly
from .polyalg.regular import is_regular_sequence

SCHEMA = 1
EXIT_OK, EXIT_NOT_CYCLE, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3, 4


class InputError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column

    def to_json(self) -> dict:
        return {"kind": "input", "message": self.message, "line": self.line, "column": self.column}


# -- parsing -----------------------------------------------------------------------------

@dataclass
class Entry:
    value: str
    line: int
    column: int  # 1-based column of the first value character


@dataclass
class Block:
    kind: str
    name: str
    line: int
    entries: dict = field(default_factory=dict)

    def get(self, key: str, required: bool = True) -> Entry | None:
        e = self.entries.get(key)
        if e is None and required:
            raise InputError(f"[{self.kind} {self.name}] is missing '{key}'", self.line, 1)
        return e


@dataclass
class Command:
    name: str
    args: list
    options: dict
    line: int
    text: str


@dataclass
class ProblemFile:
    blocks: list
    commands: list


BLOCK_KINDS = ("ring", "algebra", "pair", "sequence", "deformation", "morphism")
_HEADER = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+([A-Za-z_][A-Za-z0-9_]*))?\s*\]$")
_KEYVAL = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_problem(text: str) -> ProblemFile:
    blocks: list[Block] = []
    commands: list[Command] = []
    current: Block | None = None
    in_commands = False
    seen_names: set = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        if body.startswith("["):
            m = _HEADER.match(body)
            if not m:
                raise InputError("malformed block header", lineno, indent + 1)
            kind, name = m.group(1).lower(), m.group(2)
            if kind == "commands":
                if name:
                    raise InputError("[commands] takes no name", lineno, indent + 1)
                in_commands, current = True, None
                continue
            if kind not in BLOCK_KINDS:
                raise InputError(f"unknown block kind '{kind}'", lineno, indent + 2)
            if not name:
                raise InputError(f"[{kind}] needs a name", lineno, indent + 1)
            if name in seen_names or name == "Q":
                raise InputError(f"name '{name}' is already defined", lineno, indent + 1)
            seen_names.add(name)
            current = Block(kind, name, lineno)
            blocks.append(current)
            in_commands = False
            continue
        if in_commands:
            try:
                parts = shlex.split(body)
            except ValueError as exc:
                raise InputError(f"cannot split command: {exc}", lineno, indent + 1) from None
            args, opts = [], {}
            for p in parts[1:]:
                if "=" in p:
                    k, v = p.split("=", 1)
                    opts[k] = v
                else:
                    args.append(p)
            commands.append(Command(parts[0], args, opts, lineno, body))
            continue
        if current is None:
            raise InputError("statement outside of any block", lineno, indent + 1)
        m = _KEYVAL.match(body)
        if not m:
            raise InputError("expected 'key = value'", lineno, indent + 1)
        key = m.group(1)
        if key in current.entries:
            raise InputError(f"duplicate key '{key}'", lineno, indent + 1)
        current.entries[key] = Entry(m.group(2).strip(), lineno, indent + 1 + m.start(2))
    return ProblemFile(blocks, commands)


def _split_items(entry: Entry) -> list[tuple[str, int]]:
    """Comma-separated items with their 1-based columns."""
    out, depth, start = [], 0, 0
    text = entry.value
    for i, ch in enumerate(text + ","):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            item = text[start:i]
            lead = len(item) - len(item.lstrip())
            if item.strip():
                out.append((item.strip(), entry.column + start + lead))
            start = i + 1
    return out


def _parse_items(entry: Entry, names, rational: bool = False):
    out = []
    for item, col in _split_items(entry):
        try:
            r = parse_rational(item, names)
        except PolyParseError as exc:
            raise InputError(exc.message, entry.line, col + exc.column) from None
        if not rational:
            if not r.den.is_constant():
                raise InputError("denominators are only allowed in deformed entries", entry.line, col)
            out.append(r.num * (Fraction(1) / r.den.constant_term()))
        else:
            out.append(r)
    return out


# -- building objects -------------------------------------------------------------------------

@dataclass
class Sequence_:
    ring: PolyContext
    elements: list
    exponents: list
    germ: SubvarietyGerm | None = None


class Workspace:
    def __init__(self, problem: ProblemFile, degree_bound: int = 8):
        self.objects: dict = {"Q": rational_field()}
        self.kinds: dict = {"Q": "algebra"}
        self.degree_bound = degree_bound
        for b in problem.blocks:
            try:
                obj = getattr(self, "_build_" + b.kind)(b)
            except InputError:
                raise
            except (ValueError, TypeError) as exc:
                raise InputError(f"[{b.kind} {b.name}]: {exc}", b.line, 1) from None
            self.objects[b.name] = obj
            self.kinds[b.name] = b.kind

    def ref(self, name: str, kinds: tuple, line: int, column: int | None = None):
        if name not in self.objects:
            raise InputError(f"undefined reference '{name}'", line, column)
        if self.kinds[name] not in kinds:
            kind = self.kinds[name]
            article = "an" if kind[0] in "aeiou" else "a"
            raise InputError(f"'{name}' is {article} {kind}, expected {' or '.join(kinds)}", line, column)
        return self.objects[name]

    def _ref_entry(self, b: Block, key: str, kinds: tuple):
        e = b.get(key)
        return self.ref(e.value, kinds, e.line, e.column)

    @staticmethod
    def _names(b: Block) -> tuple:
        e = b.get("variables")
        names = tuple(v for v, _ in _split_items(e))
        for v, col in _split_items(e):
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                raise InputError(f"bad variable name '{v}'", e.line, col)
        if len(set(names)) != len(names):
            raise InputError("repeated variable name", e.line, e.column)
        return names

    @staticmethod
    def _ints(e: Entry | None) -> list[int] | None:
        if e is None:
            return None
        out = []
        for item, col in _split_items(e):
            if not item.isdigit() or int(item) < 1:
                raise InputError("expected a positive integer", e.line, col)
            out.append(int(item))
        return out

    def _build_ring(self, b: Block) -> PolyContext:
        names = self._names(b)
        order = b.get("order", False)
        o = order.value if order else "degrevlex"
        if o not in ("degrevlex", "lex"):
            raise InputError("order must be degrevlex or lex", order.line, order.column)
        rels = b.get("relations", False)
        relations = _parse_items(rels, names) if rels else []
        w = self._ints(b.get("weights", False))
        if w is not None and len(w) != len(names):
            raise InputError("one weight per variable", b.entries["weights"].line, b.entries["weights"].column)
        return PolyContext(names, relations, o, w)

    def _build_algebra(self, b: Block) -> ArtinAlgebra:
        names = self._names(b)
        rels = b.get("relations", False)
        relations = _parse_items(rels, names) if rels else []
        w = self._ints(b.get("weights", False))
        if w is not None and len(w) != len(names):
            raise InputError("one weight per variable", b.entries["weights"].line, b.entries["weights"].column)
        alg = ArtinAlgebra(PolyContext(names, relations, "degrevlex", w))
        g = b.get("graded", False)
        if g is not None:
            flag = g.value.lower()
            if flag not in ("yes", "no", "true", "false"):
                raise InputError("graded must be yes or no", g.line, g.column)
            if flag in ("yes", "true") and alg.grading is None:
                raise InputError("relations are not homogeneous for positive weights", g.line, g.column)
            if flag in ("no", "false"):
                alg.grading = None
        return alg

    def _build_pair(self, b: Block) -> RelativePair:
        R = self._ref_entry(b, "R", ("algebra",))
        A = self._ref_entry(b, "A", ("algebra",))
        return tensor_pair(R, A)

    def _build_sequence(self, b: Block) -> Sequence_:
        ring = self._ref_entry(b, "ring", ("ring",))
        els = _parse_items(b.get("elements"), ring.variables)
        exps = self._ints(b.get("exponents", False)) or [1] * len(els)
        if len(exps) != len(els):
            e = b.entries["exponents"]
            raise InputError("one exponent per element", e.line, e.column)
        return Sequence_(ring, els, exps)

    def germ(self, seq: Sequence_) -> SubvarietyGerm:
        if seq.germ is None:
            rep = is_regular_sequence(seq.ring, seq.elements, degree_bound=self.degree_bound)
            seq.germ = SubvarietyGerm(seq.ring, seq.elements, rep)
        return seq.germ

    def _build_deformation(self, b: Block) -> Deformation:
        seq = self._ref_entry(b, "base", ("sequence",))
        A = self._ref_entry(b, "algebra", ("algebra",))
        germ = self.germ(seq)
        names = germ.context.variables + A.variables
        deformed = _parse_items(b.get("deformed"), names, rational=True)
        den = b.get("denominator", False)
        g = _parse_items(den, germ.context.variables)[0] if den else None
        return Deformation(germ, A, deformed, g)

    def _build_morphism(self, b: Block) -> AlgebraMap:
        src = self._ref_entry(b, "source", ("algebra",))
        tgt = self._ref_entry(b, "target", ("algebra",))
        images = _parse_items(b.get("images"), tgt.variables)
        return AlgebraMap(src, tgt, images)


# -- payload helpers ----------------------------------------------------------------------------

def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_matrix(ctx: PolyContext, M) -> list:
    return [[ctx.fmt(p) for p in row] for row in M]


def _ext_payload(cls: ExtClass) -> dict:
    k = cls.koszul_data
    ctx = k.context
    test = cls.test_zero()
    order = {key: i for i, key in enumerate(cls.forms.keys)}
    comps = sorted(cls.numerator, key=lambda key: order[key])
    out = {
        "sequence": [ctx.fmt(f) for f in k.sequence],
        "exponents": list(k.exponents),
        "numerator": cls.fmt(),
        "components": {cls.forms.key_name(key): ctx.fmt(cls.numerator[key]) for key in comps},
        "denominator": ctx.fmt(cls.denominator) if cls.denominator is not None else None,
        "denominator_power": cls.denominator_power,
        "zero": test.zero,
        "certificate": _certificate(cls.forms, k, cls.numerator, test),
    }
    return out


def _certificate(forms, k: KoszulData, numerator: dict, test) -> dict:
    ctx = k.context
    gens = [ctx.fmt(g) for g in test.generators]
    if test.zero:
        return {
            "kind": "cofactors",
            "generators": gens,
            "cofactors": {
                forms.key_name(key): [ctx.fmt(c) for c in cof]
                for key, cof in sorted(test.witness.items(), key=lambda kv: forms.keys.index(kv[0]))
            },
            "verified": verify_witness(k, numerator, test),
        }
    return {
        "kind": "normal_forms",
        "generators": gens,
        "normal_forms": {
            forms.key_name(key): ctx.fmt(nf)
            for key, nf in sorted(test.normal_forms.items(), key=lambda kv: forms.keys.index(kv[0]))
        },
        "verified": verify_normal_forms(k, numerator, test),
    }


def _regularity_payload(rep) -> dict:
    return {
        "regular": rep.regular,
        "exact": rep.exact,
        "method": rep.method,
        "certified_degree": rep.certified_degree,
        "failing_index": rep.failing_index,
    }


# -- commands -------------------------------------------------------------------------------------

class Runner:
    def __init__(self, ws: Workspace, degree_bound: int, bar_depth: int):
        self.ws = ws
        self.degree_bound = degree_bound
        self.bar_depth = bar_depth
        self.not_cycle = False
        self.table: dict[str, Callable] = {
            "kaehler": self.kaehler,
            "bloch-k2": self.bloch_k2,
            "hh": self.hh,
            "hc": self.hc,
            "hodge": self.hodge,
            "relative": self.relative,
            "goodwillie-k": self.goodwillie_k,
            "sbi-check": self.sbi_check,
            "koszul": self.koszul,
            "fundamental-class": self.fundamental_class,
            "newton-class": self.newton_class,
            "obstruction": self.obstruction,
            "naturality": self.naturality,
            "tangent": self.tangent,
        }

    # argument helpers
    def _arity(self, c: Command, n: int):
        if len(c.args) != n:
            raise InputError(f"'{c.name}' takes {n} positional argument(s), got {len(c.args)}", c.line)

    def _int(self, c: Command, text: str, what: str) -> int:
        if not re.fullmatch(r"\d+", text):
            raise InputError(f"{what} must be a nonnegative integer, got '{text}'", c.line)
        return int(text)

    def _opts(self, c: Command, allowed: tuple):
        for k in c.options:
            if k not in allowed:
                raise InputError(f"unknown option '{k}' for '{c.name}'", c.line)

    def _ref(self, c: Command, i: int, kinds: tuple):
        return self.ws.ref(c.args[i], kinds, c.line)

    def _polys(self, c: Command, text: str, names) -> list[Poly]:
        return _parse_items(Entry(text, c.line, 1), names)

    def _need_depth(self, n: int, flavor: str):
        need = n + 1 if flavor == "HC" else n
        if need > self.bar_depth:
            raise TruncationError(f"{flavor}_{n} needs --bar-depth >= {need} (got {self.bar_depth})", need)

    def _flavor(self, c: Command, default: str) -> str:
        f = c.options.get("flavor", default).upper()
        if f not in ("HH", "HC"):
            raise InputError("flavor must be HH or HC", c.line)
        return f

    # commands
    def kaehler(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ())
        obj = self._ref(c, 0, ("algebra", "ring"))
        p = self._int(c, c.args[1], "form degree")
        M = omega(obj, p)
        if M.is_finite:
            return {"finite": True, "dim": M.dim, "basis": list(M.names)}
        if M.is_free:
            return {"finite": False, "free": True, "rank": M.rank, "generators": M.generators,
                    "generator_degrees": M.generator_degrees}
        return {"finite": False, "free": False, "generators": M.generators,
                "relations": [r.fmt(M.context.variables) for r in M.relations_presentation]}

    def bloch_k2(self, c: Command) -> dict:
        self._arity(c, 1)
        self._opts(c, ())
        pair = self._ref(c, 0, ("pair",))
        g = bloch_group(pair)
        return {"label": g.label, "dim": g.dim, "basis": g.names, "relative_forms_dim": g.relative.dim}

    def hh(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ())
        A = self._ref(c, 0, ("algebra",))
        n = self._int(c, c.args[1], "degree")
        self._need_depth(n, "HH")
        r = hh(A, n, with_basis=True)
        return {"dim": r.dim, "basis": r.basis_names, "bar_depth": r.bar_depth}

    def hc(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ())
        A = self._ref(c, 0, ("algebra",))
        n = self._int(c, c.args[1], "degree")
        self._need_depth(n, "HC")
        r = hc(A, n)
        return {"dim": r.dim, "bar_depth": r.bar_depth}

    def hodge(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ("flavor",))
        A = self._ref(c, 0, ("algebra",))
        n = self._int(c, c.args[1], "degree")
        flavor = self._flavor(c, "HH")
        self._need_depth(n, flavor)
        d = hodge(A, n, flavor)
        return {"flavor": flavor, "total": d.total, "pieces": {str(i): v for i, v in sorted(d.pieces.items())},
                "checks": dict(sorted(d.checks.items()))}

    def relative(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ("flavor", "weight"))
        pair = self._ref(c, 0, ("pair",))
        n = self._int(c, c.args[1], "degree")
        flavor = self._flavor(c, "HC")
        w = self._int(c, c.options["weight"], "weight") if "weight" in c.options else None
        self._need_depth(n, flavor)
        r = relative(pair, n, flavor, weight=w)
        return {"flavor": flavor, "weight": w, "dim": r.dim, "bar_depth": r.bar_depth}

    def goodwillie_k(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ())
        pair = self._ref(c, 0, ("pair",))
        n = self._int(c, c.args[1], "degree")
        self._need_depth(max(n - 1, 0), "HC")
        r = goodwillie_k(pair, n)
        return {"label": r.label, "dim": r.dim, "bloch_dim": r.bloch_dim}

    def sbi_check(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ())
        pair = self._ref(c, 0, ("pair",))
        l = self._int(c, c.args[1], "weight")
        self._need_depth(l, "HC")
        r = sbi_split_check(pair, l)
        return {"weight": r.weight, "dims": dict(sorted(r.dims.items())), "B_injective": r.B_injective,
                "I_surjective": r.I_surjective, "image_in_kernel": r.image_in_kernel,
                "additive": r.additive, "exact": r.exact}

    def koszul(self, c: Command) -> dict:
        self._arity(c, 1)
        self._opts(c, ())
        seq = self._ref(c, 0, ("sequence",))
        k = KoszulData(seq.ring, seq.elements, seq.exponents)
        K = koszul(k)
        rep = is_regular_sequence(seq.ring, k.powered(), degree_bound=self.degree_bound)
        hom = {}
        for i in range(1, k.length + 1):
            h = koszul_homology(k, i, self.degree_bound)
            hom[str(i)] = {"mode": h.mode, "bound": h.bound, "dims": {str(d): v for d, v in sorted(h.dims.items())}}
        return {
            "ranks": [K.ranks[i] for i in range(k.length + 1)],
            "differentials": {str(i): _poly_matrix(seq.ring, K.diffs[i]) for i in sorted(K.diffs)},
            "d_squared_zero": K.check_d2(),
            "regularity": _regularity_payload(rep),
            "homology": hom,
        }

    def fundamental_class(self, c: Command) -> dict:
        self._arity(c, 1)
        self._opts(c, ())
        obj = self._ref(c, 0, ("sequence", "deformation"))
        if isinstance(obj, Deformation):
            K = alpha(obj)
            fs = obj.localized()[1]
        else:
            K = koszul(KoszulData(obj.ring, obj.elements, obj.exponents))
            fs = KoszulData(obj.ring, obj.elements, obj.exponents).powered()
        ctx = K.context
        fc = local_fundamental_class(K)
        n = ctx.nvars
        expected = wedge_all([PolyForm.d_of(f) for f in fs], n).scale(koszul_top_sign(fc.p)).reduce(ctx)
        return {
            "p": fc.p,
            "components": {
                str(j): [[f.fmt(ctx.variables) for f in row] for row in M] for j, M in sorted(fc.components.items())
            },
            "top": fc.top.fmt(ctx.variables),
            "sign": koszul_top_sign(fc.p),
            "identity_holds": (fc.top - expected).reduce(ctx).is_zero(),
        }

    def _denoms(self, c: Command) -> str:
        d = c.options.get("denominators", "base")
        if d not in ("base", "deformed"):
            raise InputError("denominators must be base or deformed", c.line)
        return d

    def newton_class(self, c: Command) -> dict:
        self._arity(c, 1)
        self._opts(c, ("denominators",))
        d = self._ref(c, 0, ("deformation",))
        return _ext_payload(newton_class(d, self._denoms(c)))

    def obstruction(self, c: Command) -> dict:
        self._arity(c, 1)
        self._opts(c, ("extensions", "defaults", "denominators"))
        d = self._ref(c, 0, ("deformation",))
        ctx = d.base.context
        ext = self._polys(c, c.options["extensions"], ctx.variables) if "extensions" in c.options else []
        defaults = c.options.get("defaults", "yes").lower() in ("yes", "true")
        rep = is_milnor_cycle(d, ext, defaults, self._denoms(c))
        if not rep.is_cycle:
            self.not_cycle = True
        return {
            "verdict": rep.verdict,
            "newton_class": _ext_payload(rep.newton),
            "boundaries": [
                {
                    "extension": ctx.fmt(b.element),
                    "vanishes": b.vanishes,
                    "sequence": [ctx.fmt(f) for f in b.gamma.koszul_data.sequence],
                    "exponents": list(b.gamma.koszul_data.exponents),
                    "numerator": b.gamma.fmt(),
                    "certificate": _certificate(b.gamma.forms, b.gamma.koszul_data, b.gamma.numerator, b.test),
                }
                for b in rep.boundaries
            ],
        }

    def naturality(self, c: Command) -> dict:
        self._arity(c, 2)
        self._opts(c, ("extensions", "denominators"))
        phi = self._ref(c, 0, ("morphism",))
        d = self._ref(c, 1, ("deformation",))
        ctx = d.base.context
        ext = self._polys(c, c.options["extensions"], ctx.variables) if "extensions" in c.options else []
        r = naturality_check(phi, d, ext, self._denoms(c))
        return {
            "commutes": r.commutes,
            "boundaries_agree": r.boundaries_agree,
            "difference": _ext_payload(r.difference),
        }

    def tangent(self, c: Command) -> dict:
        self._arity(c, 1)
        self._opts(c, ("normal", "denominators"))
        seq = self._ref(c, 0, ("sequence",))
        if "normal" not in c.options:
            raise InputError("'tangent' needs normal=g1,...,gp", c.line)
        germ = self.ws.germ(seq)
        gs = self._polys(c, c.options["normal"], germ.context.variables)
        return _ext_payload(dual_numbers_tangent(germ, gs, self._denoms(c)))

    def run(self, c: Command) -> dict:
        fn = self.table.get(c.name)
        if fn is None:
            raise InputError(f"unknown command '{c.name}'", c.line, 1)
        return fn(c)


# -- entry points -----------------------------------------------------------------------------------

def run_problem(text: str, degree_bound: int = 8, bar_depth: int = 4, timing: bool = False) -> tuple[dict, int]:
    """Execute a problem file; returns (report, exit status)."""
    report: dict = {"schema": SCHEMA, "version": __version__,
                    "bounds": {"degree_bound": degree_bound, "bar_depth": bar_depth}, "results": []}
    try:
        problem = parse_problem(text)
        ws = Workspace(problem, degree_bound)
    except InputError as exc:
        report.update(status="error", error=exc.to_json())
        return report, EXIT_INPUT
    runner = Runner(ws, degree_bound, bar_depth)
    for c in problem.commands:
        t0 = time.perf_counter()
        try:
            res = runner.run(c)
        except InputError as exc:
            report.update(status="error", error=exc.to_json())
            return report, EXIT_INPUT
        except (BudgetError, TruncationError) as exc:
            kind = "budget" if isinstance(exc, BudgetError) else "truncation"
            req = getattr(exc, "required", None) if kind == "budget" else exc.required_n_max
            report.update(status="error", error={"kind": kind, "message": str(exc), "line": c.line, "required": req})
            return report, EXIT_BUDGET
        except (RegularityError, ValueError, TypeError, PolyParseError) as exc:
            report.update(status="error", error={"kind": "input", "message": str(exc), "line": c.line, "column": None})
            return report, EXIT_INPUT
        except (AssertionError, RuntimeError) as exc:
            report.update(status="error", error={"kind": "internal", "message": str(exc), "line": c.line})
            return report, EXIT_INTERNAL
        entry = {"command": c.text, "line": c.line, "result": res}
        if timing:
            entry["seconds"] = round(time.perf_counter() - t0, 4)
        report["results"].append(entry)
    report["status"] = "ok"
    return report, (EXIT_NOT_CYCLE if runner.not_cycle else EXIT_OK)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _scalar_rows(res: dict, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    for k, v in res.items():
        key = prefix + k
        if isinstance(v, dict) and v and all(not isinstance(x, (dict, list)) for x in v.values()):
            rows.append((key, ", ".join(f"{a}: {b}" for a, b in v.items())))
        elif isinstance(v, dict):
            rows.extend(_scalar_rows(v, key + "."))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, item in enumerate(v):
                rows.extend(_scalar_rows(item, f"{key}[{i}]."))
        elif isinstance(v, list):
            rows.append((key, "[" + ", ".join(str(x) for x in v) + "]"))
        else:
            rows.append((key, "-" if v is None else str(v)))
    return rows


def render_table(report: dict) -> str:
    out = []
    for r in report["results"]:
        out.append(f"== {r['command']}  (line {r['line']})")
        rows = _scalar_rows(r["result"])
        width = max((len(k) for k, _ in rows), default=0)
        out.extend(f"  {k.ljust(width)}  {v}" for k, v in rows)
    if report.get("status") == "error":
        e = report["error"]
        where = f" (line {e['line']})" if e.get("line") else ""
        out.append(f"error [{e['kind']}]{where}: {e['message']}")
    return "\n".join(out) + ("\n" if out else "")


def cmd_run(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        err = {"schema": SCHEMA, "status": "error", "results": [],
               "error": {"kind": "input", "message": f"cannot read {args.file}: {exc.strerror}", "line": None, "column": None}}
        sys.stderr.write(dumps(err))
        return EXIT_INPUT
    report, status = run_problem(text, args.degree_bound, args.bar_depth, args.timing)
    if status == EXIT_NOT_CYCLE and not args.strict:
        status = EXIT_OK
    if args.json == "-":
        sys.stdout.write(dumps(report))
    else:
        sys.stdout.write(render_table(report))
        if args.json:
            Path(args.json).write_text(dumps(report), encoding="utf-8")
    if report.get("status") == "error" and args.json != "-":
        sys.stderr.write(dumps({"schema": SCHEMA, "status": "error", "error": report["error"]}))
    return status


def cmd_selftest(args) -> int:
    if args.inject_fault:
        os.environ["INFCYCLE_FAULT"] = args.inject_fault
    from .selftest import run_selftest

    return run_selftest(full=args.full)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infcycle", description="Exact deformation-of-cycles toolkit.")
    ap.add_argument("--version", action="version", version=f"infcycle {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="execute a problem file")
    r.add_argument("file")
    r.add_argument("--json", metavar="OUT", help="write the JSON report to OUT ('-' for stdout)")
    r.add_argument("--degree-bound", type=int, default=8, help="internal-degree bound for Koszul certification")
    r.add_argument("--bar-depth", type=int, default=4, help="maximal bar-complex depth")
    r.add_argument("--strict", action="store_true", help="exit 1 when an obstruction verdict is 'not a cycle'")
    r.add_argument("--timing", action="store_true", help="record per-command wall time (breaks byte-identity)")
    r.set_defaults(func=cmd_run)
    s = sub.add_parser("selftest", help="run the built-in invariant suites")
    s.add_argument("--full", action="store_true")
    s.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "degree_bound", 1) < 1 or getattr(args, "bar_depth", 1) < 1:
        sys.stderr.write("bounds must be positive\n")
        return EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
