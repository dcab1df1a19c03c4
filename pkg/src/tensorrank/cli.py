"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 I/O error,
4 budget exhausted (best-so-far results are still printed, marked partial).
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from . import constructions as C
from . import decompositions as D
from .bounds import formulas
from .bounds.flattening import all_splits, best_flattening
from .bounds.layer_reduction import certificate_problem, lower_bound_layer_reduction
from .bounds.oracle import brute_force_rank
from .bounds.report import rank_report
from .errors import BudgetExceeded, TensorRankError
from .fields import GF, Field, PrimeField, QQ, find_irreducible, parse_field
from .tensor import Tensor
from .textio import (
    format_certificate,
    format_decomposition,
    format_tensor,
    parse_decomposition,
    parse_tensor,
    read_any,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3, 4

FAMILIES = ("combinatorial-t", "combinatorial-tprime", "algebraic", "group", "highorder", "sum-indicator")
DECOMPOSITIONS = ("interpolation", "cyclic", "character", "abelian", "trivial")


class Output:
    """Human-readable lines, or ``key=value`` lines under ``--porcelain``."""

    def __init__(self, porcelain: bool, stream=None):
        self.porcelain = porcelain
        self.stream = stream or sys.stdout

    def emit(self, key: str, value, text: str | None = None):
        if self.porcelain:
            print(f"{key}={value}", file=self.stream)
        else:
            print(text if text is not None else f"{key} {value}", file=self.stream)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _field(args, default: Field = QQ) -> Field:
    return parse_field(args.field) if getattr(args, "field", None) else default


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise TensorRankError("missing required flag(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def build_family(args) -> tuple[Tensor, list[tuple[str, str, int]]]:
    """Tensor for a family plus its predictions ``(kind, formula, value)``."""
    fam = args.family
    preds: list[tuple[str, str, int]] = []
    if fam in ("combinatorial-t", "combinatorial-tprime"):
        _need(args, "n")
        variant = "T" if fam == "combinatorial-t" else "Tprime"
        T = C.build_combinatorial(C.CombinatorialSpec(args.n, variant, _field(args)))
        name = "combinatorial_t" if variant == "T" else "combinatorial_tprime"
        preds.append(("rank", name, formulas.FORMULAS[name](args.n)))
    elif fam == "algebraic":
        _need(args, "p", "degree")
        modulus = C.parse_modulus(args.p, args.modulus) if args.modulus else find_irreducible(args.p, args.degree)
        if modulus.degree != args.degree:
            raise TensorRankError(f"modulus has degree {modulus.degree}, expected {args.degree}")
        layers = args.layers if args.layers is not None else args.degree
        T = C.build_algebraic(C.AlgebraicSpec(args.p, modulus, layers))
        if layers == args.degree:
            preds.append(("lower", "elimination", formulas.elimination(args.p, args.degree)))
    elif fam == "group":
        _need(args, "factors", "d")
        spec = C.AbelianGroupSpec(tuple(args.factors), args.d)
        T = C.build_group_tensor(spec, _field(args))
        preds.append(("upper", "abelian_upper", formulas.abelian_upper(spec.orders, spec.d)))
        preds.append(("lower", "flattening", spec.group_order if spec.d > 1 else 1))
    elif fam == "highorder":
        _need(args, "n", "d")
        spec = C.HighOrderSpec(args.n, args.d, _field(args))
        T = C.build_highorder_base(spec) if args.base else C.build_highorder(spec)
        preds.append(("lower", "highorder", formulas.highorder(args.n, args.d)))
    elif fam == "sum-indicator":
        _need(args, "n", "d")
        m = args.m if args.m is not None else min(args.n, args.d * (args.n - 1))
        T = C.build_sum_indicator(args.n, args.d, m, _field(args))
        if m == args.n:
            preds.append(("lower", "tightness_lower", formulas.tightness_lower(args.n, args.d)))
        preds.append(("upper", "interpolate_upper", formulas.interpolate_upper(args.n, args.d)))
    else:
        raise TensorRankError(f"unknown family {fam!r}")
    return T, preds


def _group_decompositions(spec: C.AbelianGroupSpec, F: Field) -> list[tuple[str, D.Decomposition]]:
    out = []
    for name, make in (
        ("character", lambda: D.character_decomposition(spec, F)),
        ("abelian", lambda: D.abelian_decomposition(spec, F)),
    ):
        try:
            out.append((name, make()))
        except TensorRankError:
            continue
    if isinstance(F, PrimeField) and F.order % spec.group_order and not any(n == "character" for n, _ in out):
        # characters over the smallest extension holding the roots, moved back down
        lcm = 1
        for n in spec.orders:
            lcm = lcm * n // math.gcd(lcm, n)
        k = 1
        while (F.order**k - 1) % lcm:
            k += 1
        if F.order**k <= 1 << 16:
            K = GF(F.order, k)
            out.append(("character+transfer", D.field_transfer(D.character_decomposition(spec, K), F)))
    return out


def recognize(T: Tensor) -> list[tuple[str, str, int]]:
    """Closed-form predictions for tensors that match a known family."""
    out: list[tuple[str, str, int]] = []
    F = T.field
    if T.order == 3:
        n, m, k = T.shape
        if n == m and k == C.floor_lg(n) + 1 and T == C.build_combinatorial(C.CombinatorialSpec(n, "T", F)):
            out.append(("rank", "combinatorial_t", formulas.combinatorial_t(n)))
        if n == m == k and n >= 2 and T == C.build_combinatorial(C.CombinatorialSpec(n, "Tprime", F)):
            out.append(("rank", "combinatorial_tprime", formulas.combinatorial_tprime(n)))
    if len(set(T.shape)) == 1 and T.order >= 2:
        n = T.shape[0]
        if T == C.build_group_tensor(C.AbelianGroupSpec((n,), T.order), F):
            out.append(("upper", "interpolate_upper", formulas.interpolate_upper(n, T.order)))
            out.append(("lower", "flattening", n))
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args, out: Output) -> int:
    T, preds = build_family(args)
    text = format_tensor(T, dense=args.dense)
    summary = out if args.out not in (None, "-") else Output(out.porcelain, sys.stderr)
    _write(args.out, text)
    summary.emit("shape", ",".join(map(str, T.shape)), "shape " + " ".join(map(str, T.shape)))
    summary.emit("nnz", T.nnz, f"nonzeros {T.nnz}")
    for kind, name, value in preds:
        summary.emit(f"predicted_{kind}", value, f"predicted {kind} {value} via {name}")
    return EXIT_OK


def cmd_bound(args, out: Output) -> int:
    T = parse_tensor(_read(args.tensor))
    status = EXIT_OK
    if args.method == "flatten":
        value, split = best_flattening(T, all_splits(T.order))
        out.emit("lower", value, f"lower {value} via flatten")
        out.emit("lower_via", "flatten", f"split {','.join(map(str, split))}")
    elif args.method == "layer-reduction":
        value, cert = lower_bound_layer_reduction(T, strategy=args.strategy, depth_budget=args.depth)
        out.emit("lower", value, f"lower {value} via layer-reduction")
        if cert.partial:
            out.emit("partial", 1, "partial")
            status = EXIT_BUDGET
        if args.emit_cert:
            _write(args.emit_cert, format_certificate(cert))
    else:
        preds = recognize(T)
        if not preds:
            out.emit("formula", "none", "no closed form applies")
        for kind, name, value in preds:
            if kind in ("rank", "lower"):
                out.emit("lower", value, f"lower {value} via {name}")
            if kind in ("rank", "upper"):
                out.emit("upper", value, f"upper {value} via {name}")
    out.emit("upper", T.nnz, f"upper {T.nnz} via trivial")
    return status


def _build_decomposition(args) -> D.Decomposition:
    kind = args.kind
    if kind == "trivial":
        _need(args, "tensor")
        return D.trivial_decomposition(parse_tensor(_read(args.tensor)))
    F = _field(args)
    if kind == "interpolation":
        _need(args, "n", "d", "coeffs")
        coeffs = [F.parse(c) for c in args.coeffs.split(",")]
        return D.interpolation_decomposition(args.n, args.d, coeffs, F)
    if kind == "cyclic":
        _need(args, "n", "d")
        return D.cyclic_group_decomposition(args.n, args.d, F)
    _need(args, "factors", "d")
    spec = C.AbelianGroupSpec(tuple(args.factors), args.d)
    if kind == "character":
        return D.character_decomposition(spec, F)
    return D.abelian_decomposition(spec, F)


def cmd_decompose(args, out: Output) -> int:
    dec = _build_decomposition(args)
    _write(args.out, format_decomposition(dec))
    summary = out if args.out not in (None, "-") else Output(out.porcelain, sys.stderr)
    summary.emit("terms", dec.rank, f"terms {dec.rank}")
    return EXIT_OK


def cmd_verify(args, out: Output) -> int:
    T = parse_tensor(_read(args.tensor))
    obj = read_any(_read(args.witness))
    if isinstance(obj, D.Decomposition):
        if obj.field != T.field or obj.shape != T.shape:
            out.emit("verified", 0, f"FAIL: decomposition is over {obj.field} with shape {obj.shape}")
            return EXIT_VERIFY
        cell = D.first_mismatch(T, obj)
        if cell is not None:
            got = obj.to_tensor()[cell]
            out.emit(
                "verified",
                0,
                f"FAIL: cell {cell} expected {T.field.format(T[cell])} got {T.field.format(got)}",
            )
            if out.porcelain:
                out.emit("cell", ",".join(map(str, cell)))
            return EXIT_VERIFY
        out.emit("verified", 1, f"OK: {obj.rank} terms sum to the tensor")
        if out.porcelain:
            out.emit("terms", obj.rank)
        return EXIT_OK
    if isinstance(obj, Tensor):
        raise TensorRankError("witness must be a decomposition or a certificate")
    problem = certificate_problem(T, obj)
    if problem is not None:
        out.emit("verified", 0, f"FAIL: {problem}")
        if out.porcelain:
            out.emit("reason", problem.replace(" ", "_"))
        return EXIT_VERIFY
    out.emit("verified", 1, f"OK: certificate proves rank >= {obj.claim}")
    if out.porcelain:
        out.emit("claim", obj.claim)
    return EXIT_OK


def cmd_oracle(args, out: Output) -> int:
    T = parse_tensor(_read(args.tensor))
    r = brute_force_rank(T, max_rank=args.max_rank)
    if r is None:
        out.emit("rank", f">{args.max_rank}", f"rank >{args.max_rank}")
    else:
        out.emit("rank", r, f"rank {r}")
    return EXIT_OK


def cmd_transfer(args, out: Output) -> int:
    dec = parse_decomposition(_read(args.decomposition))
    target = parse_field(args.to)
    res = D.field_transfer(dec, target)
    _write(args.out, format_decomposition(res))
    summary = out if args.out not in (None, "-") else Output(out.porcelain, sys.stderr)
    summary.emit("terms", res.rank, f"terms {res.rank}")
    return EXIT_OK


def cmd_report(args, out: Output) -> int:
    if args.tensor:
        T = parse_tensor(_read(args.tensor))
        preds = recognize(T)
        decs = []
        if any(name == "interpolate_upper" for _, name, _ in preds):
            spec = C.AbelianGroupSpec((T.shape[0],), T.order)
            decs = _group_decompositions(spec, T.field)
    else:
        if not args.family:
            raise TensorRankError("report needs a family or --tensor")
        T, preds = build_family(args)
        decs = []
        if args.family == "group":
            decs = _group_decompositions(C.AbelianGroupSpec(tuple(args.factors), args.d), T.field)
    rep = rank_report(T, decs, strategy=args.strategy)
    out.emit("lower", rep.lower, f"lower {rep.lower} via {rep.lower_via}")
    out.emit("upper", rep.upper, f"upper {rep.upper} via {rep.upper_via}")
    if out.porcelain:
        out.emit("lower_via", rep.lower_via)
        out.emit("upper_via", rep.upper_via)
    if rep.exact is not None:
        out.emit("exact", rep.exact, f"exact {rep.exact}")
    for kind, name, value in preds:
        out.emit(f"predicted_{kind}", value, f"predicted {kind} {value} via {name}")
    for note in rep.notes:
        out.emit("note", note.replace(" ", "_"), f"note {note}")
    if rep.partial:
        out.emit("partial", 1, "partial")
        return EXIT_BUDGET
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _family_flags(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int, help="target sum for sum-indicator")
    p.add_argument("--field", help="field literal, e.g. Q, GF(7), GF(2^2)")
    p.add_argument("--p", type=int, help="prime for the algebraic family")
    p.add_argument("--degree", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--modulus", help="explicit modulus, e.g. 1+x+x^2")
    p.add_argument("--factors", type=int, nargs="+", help="cyclic factor orders")
    p.add_argument("--base", action="store_true", help="highorder: emit the order-3 tensor before reshaping")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorrank", description=__doc__.splitlines()[0])
    parser.add_argument("--porcelain", action="store_true", help="print key=value lines")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a tensor family")
    g.add_argument("family", choices=FAMILIES)
    _family_flags(g)
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--dense", action="store_true", help="list zero cells too")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bound", help="lower-bound the rank of a tensor file")
    b.add_argument("tensor")
    b.add_argument("--method", choices=("flatten", "layer-reduction", "formulas"), default="layer-reduction")
    b.add_argument("--strategy", choices=("greedy", "exhaustive"), default="greedy")
    b.add_argument("--depth", type=int, default=2)
    b.add_argument("--emit-cert", help="write the certificate to this path")
    b.set_defaults(func=cmd_bound)

    de = sub.add_parser("decompose", help="build an explicit decomposition")
    de.add_argument("kind", choices=DECOMPOSITIONS)
    de.add_argument("--n", type=int)
    de.add_argument("--d", type=int)
    de.add_argument("--field")
    de.add_argument("--factors", type=int, nargs="+")
    de.add_argument("--coeffs", help="comma-separated coefficients for interpolation")
    de.add_argument("--tensor", help="tensor file for the trivial decomposition")
    de.add_argument("--out")
    de.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="check a decomposition or certificate against a tensor")
    v.add_argument("tensor")
    v.add_argument("witness")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exact rank by exhaustive search (finite fields)")
    o.add_argument("tensor")
    o.add_argument("--max-rank", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    t = sub.add_parser("transfer", help="move a decomposition to the prime subfield")
    t.add_argument("decomposition")
    t.add_argument("--to", required=True)
    t.add_argument("--out")
    t.set_defaults(func=cmd_transfer)

    r = sub.add_parser("report", help="reconciled lower/upper bounds")
    r.add_argument("family", nargs="?", choices=FAMILIES)
    _family_flags(r)
    r.add_argument("--tensor")
    r.add_argument("--strategy", choices=("greedy", "exhaustive"), default="greedy")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    out = Output(args.porcelain)
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        out.emit("partial", 1, "partial")
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TensorRankError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
