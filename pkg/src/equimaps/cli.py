"""Command-line front end: ``equimaps basis|check|classify|tangent|section``.

Representation expressions are prefix constructor calls, e.g.
``endo_conj(realify(defining))`` or ``hom(defining, defining)``.  Infix
``+`` (or ``⊕``) is a direct sum and ``*`` (or ``⊗``) a tensor product;
``*`` binds tighter than ``+``.

Output is UTF-8 JSON with a fixed key order, floats printed with 17
significant digits and complex numbers as ``[re, im]``.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from . import lie_core as lc
from .algebra import classify_commutant, invariant_vector_fields
from .exceptions import NumericalError, SpecError
from .invariants import DEFAULT_RANK_TOL, full_fixed_space
from .kernels import (
    EquivariantBasis,
    RadialProfileSet,
    as_matrix,
    build_basis,
    check_equivariance,
    check_kernel_constraint,
    hom_rep_with_det_twist,
    rd_kernel,
)
from .sections import get_space

__all__ = ["main", "parse_rep", "dumps"]

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# Rep-expression parser.

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(-)|(.))")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.replace("⊕", "+").replace("⊗", "*")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos:
            break
        pos = m.end()
        num, name, minus, other = m.groups()
        if num is not None:
            tokens.append(("int", int(num)))
        elif name is not None:
            tokens.append(("name", name))
        elif minus is not None:
            tokens.append(("op", "-"))
        elif other is not None and not other.isspace():
            if other not in "(),+*":
                raise SpecError(f"unexpected character {other!r} in rep expression")
            tokens.append(("op", other))
    return tokens


class _Parser:
    def __init__(self, text, group):
        self.tokens = _tokenize(text)
        self.i = 0
        self.group = group
        self.text = text

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise SpecError(f"rep expression {self.text!r}: expected {want} at token {self.i}")
        self.i += 1
        return tok[1]

    def parse(self):
        out = self.sum_expr()
        if self.peek()[0] is not None:
            raise SpecError(f"rep expression {self.text!r}: trailing input")
        return out

    def sum_expr(self):
        terms = [self.prod_expr()]
        while self.peek() == ("op", "+"):
            self.take()
            terms.append(self.prod_expr())
        return terms[0] if len(terms) == 1 else lc.direct_sum(*terms)

    def prod_expr(self):
        out = self.atom()
        while self.peek() == ("op", "*"):
            self.take()
            out = lc.tensor_rep(out, self.atom())
        return out

    def integer(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        return sign * self.take("int")

    def atom(self):
        if self.peek() == ("op", "("):
            self.take()
            out = self.sum_expr()
            self.take("op", ")")
            return out
        name = self.take("name")
        args = []
        if self.peek() == ("op", "("):
            self.take()
            if self.peek() != ("op", ")"):
                args.append(self.argument(name, 0))
                while self.peek() == ("op", ","):
                    self.take()
                    args.append(self.argument(name, len(args)))
            self.take("op", ")")
        return self.build(name, args)

    def argument(self, name, index):
        integer_slots = {"su2_poly": (0,), "linear": (0,), "det_twist": (1,)}
        if index in integer_slots.get(name, ()):
            return self.integer()
        return self.sum_expr()

    def build(self, name, args):
        g = self.group
        arity = {
            "trivial": (0, 0), "defining": (0, 0), "linear": (0, 1), "dual": (1, 1),
            "tensor": (2, 2), "dsum": (1, 99), "endo_conj": (1, 1), "det_twist": (2, 2),
            "su2_poly": (1, 1), "realify": (1, 1), "hom": (2, 2),
        }
        if name not in arity:
            raise SpecError(f"unknown constructor {name!r}; known: {sorted(arity)}")
        lo, hi = arity[name]
        if not lo <= len(args) <= hi:
            raise SpecError(f"{name} takes {lo}..{hi} arguments, got {len(args)}")
        try:
            if name == "trivial":
                return lc.trivial_rep(g)
            if name == "defining":
                return lc.defining_rep(g)
            if name == "linear":
                size = args[0] if args else g.ambient_size - 1
                return lc.linear_part_rep(g, size)
            if name == "dual":
                return lc.dual_rep(args[0])
            if name == "tensor":
                return lc.tensor_rep(*args)
            if name == "dsum":
                return lc.direct_sum(*args)
            if name == "endo_conj":
                return lc.endo_conjugation_rep(args[0])
            if name == "det_twist":
                return lc.det_twist(args[0], args[1])
            if name == "su2_poly":
                return lc.su2_polynomial_rep(args[0], g)
            if name == "realify":
                return lc.realify(args[0])
            return hom_rep_with_det_twist(args[0], args[1])
        except SpecError:
            raise
        except ValueError as exc:
            raise SpecError(f"{name}: {exc}") from exc


def parse_rep(text: str, group: lc.LieGroupSpec) -> lc.Representation:
    """Build a representation of ``group`` from an expression string."""
    if not text or not text.strip():
        raise SpecError("empty rep expression")
    return _Parser(text, group).parse()


# ---------------------------------------------------------------------------
# Deterministic JSON.


def _encode(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag])
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps("inf" if x > 0 else "-inf" if x < 0 else "nan")
        if x == 0.0:
            x = 0.0  # no negative zeros
        return "%.17g" % x
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj) + "\n"


# ---------------------------------------------------------------------------
# Commands.


def _points(args, space):
    if args.points is not None:
        text = args.points
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"--points is not valid JSON: {exc}") from exc
        if not isinstance(raw, list):
            raise SpecError("--points must be a JSON list of points")
        pts = []
        for c in raw:
            try:
                p = space.from_coords(c)
            except (TypeError, ValueError, IndexError) as exc:
                raise SpecError(f"bad point {c!r}: {exc}") from exc
            space.normalize_point(p)
            pts.append(p)
        return pts
    if args.sample:
        return list(space.sample_points(np.random.default_rng(args.seed), args.sample))
    return []


def _setup(args):
    if not args.geometry:
        raise SpecError("--geometry is required")
    try:
        space = get_space(args.geometry)
    except KeyError as exc:
        raise SpecError(str(exc.args[0])) from exc
    if not args.rep:
        raise SpecError("--rep is required")
    rep = parse_rep(args.rep, space.group)
    return space, rep


def _executor(args):
    return ThreadPoolExecutor(max_workers=4) if args.parallel else None


def cmd_basis(args) -> tuple:
    space, rep = _setup(args)
    basis = build_basis(space, rep, args.tol)
    pts = _points(args, space)

    def one(p):
        x = space.normalize_point(p)
        flat = basis.evaluate_all(x, flat=True)
        return {
            "point": space.to_coords(x),
            "kernels": [as_matrix(rep, v) for v in flat],
        }

    ex = _executor(args)
    try:
        evaluations = list((ex.map if ex else map)(one, pts))
    finally:
        if ex:
            ex.shutdown()
    doc = {
        "geometry": args.geometry,
        "rep": args.rep,
        "m": basis.m,
        "m_prime": basis.invariant_count_full_group,
        "matrix_shape": list(rep.matrix_shape) if rep.matrix_shape else None,
        "invariant_vectors": [as_matrix(rep, v) for v in basis.invariant_vectors],
        "evaluations": evaluations,
    }
    return doc, EXIT_OK


def _perturbed(basis: EquivariantBasis, eps: float, seed: int) -> EquivariantBasis:
    rng = np.random.default_rng(seed)
    noise = rng.normal(size=basis.invariant_vectors.shape)
    noise /= np.linalg.norm(noise, axis=1, keepdims=True)
    return EquivariantBasis(
        basis.space,
        basis.rep,
        basis.invariant_vectors + eps * noise,
        basis.invariant_count_full_group,
        basis.residual,
    )


def cmd_check(args) -> tuple:
    space, rep = _setup(args)
    basis = build_basis(space, rep, args.tol)
    if args.perturb:
        basis = _perturbed(basis, args.perturb, args.seed)
    ex = _executor(args)
    try:
        residual = check_equivariance(
            basis,
            point_samples=args.sample or 100,
            group_samples=args.group_samples,
            seed=args.seed,
            executor=ex,
        )
    finally:
        if ex:
            ex.shutdown()
    doc = {
        "geometry": args.geometry,
        "rep": args.rep,
        "m": basis.m,
        "point_samples": args.sample or 100,
        "group_samples": args.group_samples,
        "seed": args.seed,
        "perturb": args.perturb,
        "residual": residual,
    }
    worst = residual
    if rep.provenance == "hom" and space.key.startswith("sphere") and basis.m:
        k = basis.invariant_count_full_group
        profiles = [
            (lambda r: math.exp(-r * r)) if i < k else (lambda r: r * math.exp(-r * r))
            for i in range(basis.m)
        ]
        kern = rd_kernel(basis, RadialProfileSet(profiles, k))
        rin, rout = rep.components
        kc = check_kernel_constraint(kern, rin, rout, space.group, seed=args.seed)
        doc["kernel_constraint_residual"] = kc
        worst = max(worst, kc)
    doc["threshold"] = args.threshold
    doc["passed"] = bool(worst <= args.threshold)
    return doc, EXIT_OK if doc["passed"] else EXIT_CHECK


def cmd_classify(args) -> tuple:
    space, rep = _setup(args)
    if rep.matrix_shape is None or rep.matrix_shape[0] != rep.matrix_shape[1]:
        raise SpecError("classify needs an algebra-valued rep such as endo_conj(...)")
    if rep.field != lc.REAL:
        raise SpecError("classify works over the real numbers; wrap complex reps in realify")
    fixed = full_fixed_space(rep, space.stabilizer_generators, space.stabilizer_components, args.tol)
    mats = [as_matrix(rep, v) for v in fixed.echelon]
    report = classify_commutant(mats, seed=args.seed)
    blocks = []
    for b in report.blocks:
        blocks.append(
            {
                "type": b.division_type,
                "multiplicity": b.multiplicity,
                "dimension": b.dimension,
                "signature": b.signature,
                "certificate": {k: b.witnesses[k] for k in sorted(b.witnesses)},
            }
        )
    doc = {
        "geometry": args.geometry,
        "rep": args.rep,
        "dim": report.dimension,
        "blocks": blocks,
        "summary": [[b.division_type, b.multiplicity] for b in report.blocks],
        "residual": report.residual,
    }
    return doc, EXIT_OK


_ALG_RE = re.compile(r"^\s*([a-z]+)\s*\(\s*([0-9]+)\s*(?:,\s*([0-9RC]+)\s*)?\)\s*$")


def _named_group(name: str) -> lc.LieGroupSpec:
    m = _ALG_RE.match(name)
    if not m:
        raise SpecError(f"unknown Lie algebra {name!r}")
    kind, n, extra = m.group(1), int(m.group(2)), m.group(3)
    if kind == "so" and extra is None:
        return lc.so_group(n)
    if kind == "so" and (n, extra) == (1, "1"):
        return lc.so11_group()
    if kind == "su" and n == 2:
        return lc.su2_group()
    if kind == "sl" and (n, extra) == (2, "R"):
        return lc.sl2r_group()
    if kind == "sl" and (n, extra) == (2, "C"):
        return lc.sl2c_group()
    if kind == "se" and extra is None:
        return lc.se_group(n)
    raise SpecError(f"unknown Lie algebra {name!r}")


def _subalgebra(group: lc.LieGroupSpec, gname: str, sub: str) -> list:
    sub = sub.strip()
    if sub in ("0", "trivial", ""):
        return []
    if sub == gname.strip():
        return list(group.algebra_generators)
    m = _ALG_RE.match(sub)
    if m and m.group(1) == "so" and m.group(3) is None:
        k = int(m.group(2))
        n = group.ambient_size
        if gname.startswith("se"):
            n -= 1
            if k == n:
                return lc.so_algebra(k, 0, n + 1)
        if gname.startswith("so(") and "," not in gname and k <= n:
            return lc.so_algebra(k, n - k, n)
        if gname.replace(" ", "") == "sl(2,R)" and k == 2:
            return [np.array([[0.0, -1.0], [1.0, 0.0]])]
        if gname.replace(" ", "") == "sl(2,C)" and k == 2:
            return [np.array([[0.0, -1.0], [1.0, 0.0]])]
    if sub.replace(" ", "") == "su(2)" and gname.replace(" ", "") == "sl(2,C)":
        return list(lc.su2_group().algebra_generators)
    raise SpecError(f"do not know how {sub!r} sits inside {gname!r}")


def cmd_tangent(args) -> tuple:
    if args.geometry:
        try:
            space = get_space(args.geometry)
        except KeyError as exc:
            raise SpecError(str(exc.args[0])) from exc
        g, h = list(space.group.algebra_generators), list(space.stabilizer_generators)
        label = {"geometry": args.geometry}
    else:
        if len(args.names) != 2:
            raise SpecError("tangent needs GROUP SUBGROUP or --geometry")
        group = _named_group(args.names[0])
        g = list(group.algebra_generators)
        h = _subalgebra(group, args.names[0], args.names[1])
        label = {"group": args.names[0], "subgroup": args.names[1]}
    try:
        fields = invariant_vector_fields(g, h, tol=args.tol)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    doc = dict(label)
    doc["dim_g"] = len(g)
    doc["dim_h"] = len(h)
    doc["dim"] = len(fields)
    doc["basis"] = fields
    return doc, EXIT_OK


def cmd_section(args) -> tuple:
    if not args.geometry:
        raise SpecError("--geometry is required")
    try:
        space = get_space(args.geometry)
    except KeyError as exc:
        raise SpecError(str(exc.args[0])) from exc
    pts = _points(args, space)
    evaluations = []
    for p in pts:
        x = space.normalize_point(p)
        evaluations.append({"point": space.to_coords(x), "section": space.section(x)})
    return {"geometry": args.geometry, "evaluations": evaluations}, EXIT_OK


COMMANDS = {
    "basis": cmd_basis,
    "check": cmd_check,
    "classify": cmd_classify,
    "tangent": cmd_tangent,
    "section": cmd_section,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equimaps", description="Equivariant maps on homogeneous spaces."
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("names", nargs="*", help="GROUP SUBGROUP for the tangent command")
    parser.add_argument("--geometry")
    parser.add_argument("--rep")
    parser.add_argument("--points", help="JSON list of points, or @file")
    parser.add_argument("--sample", type=int, default=0, metavar="N")
    parser.add_argument("--seed", type=int, default=0, metavar="S")
    parser.add_argument("--group-samples", type=int, default=100)
    parser.add_argument("--tol", type=float, default=DEFAULT_RANK_TOL)
    parser.add_argument("--threshold", type=float, default=1e-8)
    parser.add_argument("--perturb", type=float, default=0.0)
    parser.add_argument("--parallel", action="store_true")
    parser.add_argument("--output")
    return parser


def _fail(exc, code) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(dumps(err))
    return code


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.sample < 0:
        return _fail(SpecError("--sample must be nonnegative"), EXIT_INPUT)
    try:
        doc, code = COMMANDS[args.command](args)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERIC)
    except (SpecError, ValueError, OSError) as exc:
        return _fail(exc, EXIT_INPUT)
    text = dumps(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
