"""``fastconv`` command-line interface.

Exit codes: 0 ok, 1 usage or input error, 2 validation failure, 3 generation
failure. Errors print one line to stderr: ``error kind=<kind> message="..."``.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import accuracy, adapters, algebra, cost, generators
from .bilinear import (
    CORRELATION,
    CYCLIC,
    LINEAR,
    BilinearAlgorithm,
    ConvVariant,
    apply,
    apply_nd,
    default_tolerance,
    interchange,
    validate,
)
from .fastexec import direct_conv

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_GENERATION = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind, self.code = kind, code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message, EXIT_USAGE)


# ---------------------------------------------------------------------------
# tensor files


def _parse_value(tok: str):
    if re.fullmatch(r"[+-]?\d+(/\d+)?", tok):
        return Fraction(tok)
    return float(tok)


def read_tensor(path: str) -> np.ndarray:
    """Read a dims header line followed by whitespace-separated row-major values.

    All-rational files (integers or ``p/q``) load exactly; anything with a
    decimal point or exponent loads as float64. ``#`` starts a comment.
    """
    try:
        with open(path) as fh:
            lines = [ln.split("#", 1)[0].strip() for ln in fh]
    except OSError as exc:
        raise CliError("io", f"{path}: {exc.strerror}", EXIT_USAGE) from None
    lines = [ln for ln in lines if ln]
    if not lines:
        raise CliError("io", f"{path}: empty file", EXIT_USAGE)
    try:
        dims = tuple(int(t) for t in lines[0].split())
        vals = [_parse_value(t) for ln in lines[1:] for t in ln.split()]
    except ValueError as exc:
        raise CliError("io", f"{path}: {exc}", EXIT_USAGE) from None
    if not dims or any(d < 1 for d in dims) or int(np.prod(dims)) != len(vals):
        raise CliError("io", f"{path}: header {dims} does not match {len(vals)} values", EXIT_USAGE)
    if all(isinstance(v, Fraction) for v in vals):
        arr = np.empty(len(vals), dtype=object)
        arr[:] = vals
    else:
        arr = np.array([float(v) for v in vals])
    return arr.reshape(dims)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    v = float(v)
    if v.is_integer() and abs(v) < 2 ** 53:
        return str(int(v))
    return repr(v)


def format_values(arr: np.ndarray) -> str:
    """Values only: one line for a vector, one line per last-axis row otherwise."""
    arr = np.asarray(arr)
    if arr.ndim <= 1:
        return " ".join(_fmt(v) for v in np.ravel(arr))
    rows = arr.reshape(-1, arr.shape[-1])
    return "\n".join(" ".join(_fmt(v) for v in row) for row in rows)


def write_tensor(path: str, arr: np.ndarray):
    arr = np.asarray(arr)
    with open(path, "w") as fh:
        fh.write(" ".join(str(d) for d in arr.shape) + "\n")
        fh.write(format_values(arr) + "\n")


# ---------------------------------------------------------------------------
# commands


def _parse_nodes(text: str):
    toks = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return [algebra.parse_node(t) for t in toks]
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError("usage", f"bad node list: {exc}", EXIT_USAGE) from None


def _parse_divisors(text: str):
    try:
        return [algebra.parse_poly(t) for t in re.split(r"[;,]", text) if t.strip()]
    except ValueError as exc:
        raise CliError("usage", f"bad divisor list: {exc}", EXIT_USAGE) from None


def _build_one(args, r: int, n: int, nodes=None, divisors=None) -> BilinearAlgorithm:
    m = args.method
    if m == "toom":
        if nodes is None and args.node_scheme != generators.INTEGER:
            nodes = generators.default_nodes(n + r - 1, args.node_scheme)
        return generators.toom_cook(r, n, nodes)
    if m == "winograd":
        return generators.winograd(r, n, divisors)
    if m == "dft":
        if args.variant == CYCLIC:
            if r != n:
                raise generators.GenerationError("cyclic DFT needs r == n")
            return generators.dft_cyclic_alg(n)
        return generators.dft_linear_alg(r, n)
    if m == "dct":
        if r != n:
            raise generators.GenerationError("DCT algorithm needs r == n")
        return generators.dct_linear_alg(n)
    if m in ("karatsuba", "sparse3"):
        return generators.fixed_algs(m)
    if m == "direct":
        return generators.fixed_algs("direct", r, n)
    raise CliError("usage", f"unknown method {m}", EXIT_USAGE)


def cmd_gen(args) -> int:
    nodes = _parse_nodes(args.nodes) if args.nodes else None
    divisors = _parse_divisors(args.divisors) if args.divisors else None
    if args.variant == CYCLIC and args.method != "dft":
        raise CliError("usage", "cyclic algorithms are only generated by --method dft", EXIT_USAGE)
    try:
        if args.nest:
            try:
                parts = [int(p) for p in re.split(r"[x*]", args.nest.lower())]
            except ValueError:
                raise CliError("usage", f"bad --nest {args.nest!r}; expected e.g. 2x3", EXIT_USAGE) from None
            if nodes or divisors:
                raise CliError("usage", "--nest uses default nodes/divisors per part", EXIT_USAGE)
            algs = [_build_one(args, k, k) for k in parts]
            join = adapters.agarwal_cooley_nest if args.variant == CYCLIC else adapters.overlap_add_nest
            alg = algs[-1]
            for a in reversed(algs[:-1]):
                alg = join(a, alg)
        else:
            if args.method not in ("karatsuba", "sparse3") and (args.r is None or args.n is None):
                raise CliError("usage", f"--r and --n are required for --method {args.method}", EXIT_USAGE)
            alg = _build_one(args, args.r, args.n, nodes, divisors)
        if args.variant == CORRELATION:
            alg = interchange(alg)
    except (generators.GenerationError, algebra.NotCoprimeError, algebra.SingularMatrixError, ValueError) as exc:
        if isinstance(exc, CliError):
            raise
        raise CliError("generation", str(exc), EXIT_GENERATION) from None
    res = validate(alg)
    if float(res) > default_tolerance(alg):
        raise CliError("validation", f"generated algorithm residual {float(res):.3e}", EXIT_VALIDATION)
    text = json.dumps(alg.to_json(), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(f"rank {alg.rank} residual {_fmt(res) if alg.exact else f'{float(res):.3e}'}", file=sys.stderr)
    return EXIT_OK


def _load_alg(path) -> BilinearAlgorithm:
    try:
        with open(path) as fh:
            return BilinearAlgorithm.from_json(json.load(fh))
    except OSError as exc:
        raise CliError("io", f"{path}: {exc.strerror}", EXIT_USAGE) from None
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError("io", f"{path}: not an algorithm file ({exc})", EXIT_USAGE) from None


def cmd_validate(args) -> int:
    alg = _load_alg(args.alg)
    res = validate(alg)
    tol = args.tol if args.tol is not None else default_tolerance(alg)
    print(_fmt(res) if alg.exact else f"{float(res):.6e}")
    if float(res) > tol:
        raise CliError("validation", f"residual {float(res):.3e} exceeds {tol:.1e}", EXIT_VALIDATION)
    return EXIT_OK


def cmd_conv(args) -> int:
    alg = _load_alg(args.alg)
    F, G = read_tensor(args.f), read_tensor(args.g)
    d = args.dims or F.ndim
    try:
        if d == 1:
            y = apply(alg, F.astype(float), G.astype(float))
        else:
            y = apply_nd(alg, F.astype(float), G.astype(float))
    except ValueError as exc:
        raise CliError("usage", str(exc), EXIT_USAGE) from None
    if args.out:
        write_tensor(args.out, y)
    else:
        print(format_values(y))
    return EXIT_OK


def cmd_oracle(args) -> int:
    f, g = read_tensor(args.f), read_tensor(args.g)
    if f.ndim != 1 or g.ndim != 1:
        raise CliError("usage", "oracle takes vectors", EXIT_USAGE)
    r = f.size
    if args.variant == LINEAR:
        v = ConvVariant.linear(r, g.size)
    elif args.variant == CYCLIC:
        v = ConvVariant.cyclic(g.size)
    else:
        v = ConvVariant.correlation(r, g.size - r + 1) if g.size >= r else None
    try:
        if v is None:
            raise ValueError("correlation needs len(g) >= len(f)")
        y = direct_conv(f, g, v)
    except ValueError as exc:
        raise CliError("usage", str(exc), EXIT_USAGE) from None
    print(format_values(y))
    return EXIT_OK


def cmd_cost(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    tables = [t for t in re.split(r"[,\s]+", args.tables) if t]
    for t in tables:
        try:
            rows = cost.table_report(t)
        except ValueError as exc:
            raise CliError("usage", str(exc), EXIT_USAGE) from None
        path = os.path.join(args.out, f"table{t}.csv")
        with open(path, "w") as fh:
            fh.write(cost.table_csv(rows))
        ok = sum(r.match for r in rows)
        print(f"table{t}: {ok}/{len(rows)} rows match -> {path}")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        cfg = accuracy.ExperimentConfig.load(args.config)
    except OSError as exc:
        raise CliError("io", f"{args.config}: {exc.strerror}", EXIT_USAGE) from None
    except (ValueError, TypeError) as exc:
        raise CliError("usage", f"{args.config}: {exc}", EXIT_USAGE) from None
    if args.workers:
        cfg.workers = args.workers
    try:
        recs = accuracy.run_experiment(cfg)
    except accuracy.InapplicableError as exc:
        raise CliError("generation", str(exc), EXIT_GENERATION) from None
    with open(args.out, "w") as fh:
        fh.write(accuracy.records_csv(recs))
    if args.aggregate:
        with open(args.aggregate, "w") as fh:
            fh.write(accuracy.aggregate_csv(accuracy.aggregate(recs)))
    print(f"{len(recs)} records -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fastconv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an algorithm as JSON")
    g.add_argument("--method", required=True,
                   choices=["toom", "winograd", "dft", "dct", "karatsuba", "sparse3", "direct"])
    g.add_argument("--r", type=int)
    g.add_argument("--n", type=int)
    grp = g.add_mutually_exclusive_group()
    grp.add_argument("--nodes", help='comma-separated rationals and "inf", e.g. "0,1,-1,inf"')
    grp.add_argument("--divisors", help='divisor polynomials separated by ";" e.g. "x^2+1;x;x+1"')
    g.add_argument("--node-scheme", choices=[generators.INTEGER, generators.CHEBYSHEV], default=generators.INTEGER)
    g.add_argument("--nest", help="compose square algorithms, e.g. 2x3 or 2x2x2 (overlap-add, or "
                                  "Agarwal-Cooley for --variant cyclic)")
    g.add_argument("--variant", choices=[LINEAR, CYCLIC, CORRELATION], default=LINEAR)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("conv", help="apply an algorithm to input files")
    c.add_argument("--alg", required=True)
    c.add_argument("--f", required=True)
    c.add_argument("--g", required=True)
    c.add_argument("--dims", type=int, help="tensor order (default: from the input header)")
    c.add_argument("--out")
    c.set_defaults(func=cmd_conv)

    v = sub.add_parser("validate", help="print the CP residual of an algorithm")
    v.add_argument("--alg", required=True)
    v.add_argument("--tol", type=float)
    v.set_defaults(func=cmd_validate)

    k = sub.add_parser("cost", help="write cost tables as CSV")
    k.add_argument("--tables", default="2,3,4", help="comma-separated subset of 2,3,4")
    k.add_argument("--out", required=True)
    k.set_defaults(func=cmd_cost)

    b = sub.add_parser("bench-accuracy", help="run the random-input accuracy experiment")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--aggregate")
    b.add_argument("--workers", type=int)
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="direct summation")
    o.add_argument("--variant", choices=[LINEAR, CYCLIC, CORRELATION], default=LINEAR)
    o.add_argument("--f", required=True)
    o.add_argument("--g", required=True)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        msg = str(exc).replace('"', "'").replace("\n", " ")
        print(f'error kind={exc.kind} message="{msg}"', file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
