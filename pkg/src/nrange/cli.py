"""Command-line entry point: ``nrange compute|curve|boundary|member``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, NoReturn

from .boundary import boundary_poly
from .config import SolverConfig, _configure_logging, load_config
from .curve import sample_curve, write_curve_csv
from .errors import KIndexError, NRangeError, ParameterError, ParseError
from .kippenhahn import kippenhahn_poly
from .matrix_io import REPORT_SCHEMA, boundary_payload, build_report, parse_matrix, write_report
from .membership import membership_test
from .pencil import EXACT, FLOAT, ComplexMatrix
from .solver import solve_range
from .support import halfplane_polygon, support_boundary_points
from .svg import RangeLayer, render_svg
from .utils import _normalize_k_values, to_rational

logger = logging.getLogger("nrange.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_AMBIGUOUS = 3
EXIT_FAILURE = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _add_matrix(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--matrix", required=True, help="matrix JSON file")
    parser.add_argument("--mode", choices=(EXACT, FLOAT), help="re-read entries as exact or as doubles")


def _add_numerics(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, help="eigenvalue comparison tolerance")
    parser.add_argument("--samples", type=int, help="supporting halfplanes / curve samples")
    parser.add_argument("--precision", type=float, help="root isolation width")
    parser.add_argument("--threads", type=int, help="worker cap, 0 = all cores")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nrange", description="Rank-k numerical ranges via the Kippenhahn curve")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    compute = subparsers.add_parser("compute", help="dimension and witnesses of Lambda_k(A)")
    _add_matrix(compute)
    _add_numerics(compute)
    compute.add_argument("--k", type=int, action="append", help="rank index, repeatable (default: all)")
    compute.add_argument("--out", help="report JSON path (default: stdout)")
    compute.add_argument("--svg", help="write a picture of the ranges")

    curve = subparsers.add_parser("curve", help="sample the real curve V(f_A)")
    _add_matrix(curve)
    curve.add_argument("--chart", default="t=1", choices=("t=1", "x=1", "y=1"))
    curve.add_argument("--samples", type=int, default=720)
    curve.add_argument("--csv", help="CSV path (default: stdout)")

    boundary = subparsers.add_parser("boundary", help="the boundary polynomial g_A")
    _add_matrix(boundary)
    boundary.add_argument("--threads", type=int)
    boundary.add_argument("--out", help="JSON path (default: stdout)")

    member = subparsers.add_parser("member", help="is a + i*b in Lambda_k(A)?")
    _add_matrix(member)
    _add_numerics(member)
    member.add_argument("--k", type=int, required=True)
    member.add_argument("--point", nargs=2, required=True, metavar=("A", "B"), help="rationals like 1/3 or decimals")
    return parser


def _load_matrix(args: argparse.Namespace) -> ComplexMatrix:
    matrix = parse_matrix(args.matrix)
    if args.mode == FLOAT and matrix.mode != FLOAT:
        rows = matrix.to_numpy().tolist()
        matrix = ComplexMatrix.from_rows(rows, mode=FLOAT)
    elif args.mode == EXACT and matrix.mode != EXACT:
        matrix = ComplexMatrix(matrix.real, matrix.imag, EXACT)
    return matrix


def _config(args: argparse.Namespace) -> SolverConfig:
    return load_config(
        tol=getattr(args, "tol", None),
        samples=getattr(args, "samples", None),
        precision=getattr(args, "precision", None),
        threads=getattr(args, "threads", None),
    )


def _emit(text: str, destination: str | None) -> None:
    if destination:
        with open(destination, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _compute(args: argparse.Namespace) -> int:
    matrix = _load_matrix(args)
    config = _config(args)
    data = kippenhahn_poly(matrix)
    ks = _normalize_k_values(args.k, matrix.n)
    logger.info("compute started n=%d k=%s", matrix.n, ks)
    results = [solve_range(data, k, config) for k in ks]
    report = build_report(matrix, data, results, config)
    if args.out:
        write_report(report, args.out)
    else:
        write_report(report, sys.stdout)
    if args.svg:
        layers = [RangeLayer(result, halfplane_polygon(data, result.k, config.samples)) for result in results]
        curve = [support_boundary_points(data, j, config.samples) for j in range(1, matrix.n + 1)]
        curve = [branch + branch[:1] for branch in curve]
        render_svg(layers, args.svg, curve=curve, n=matrix.n)
    ambiguous = sum(len(result.ambiguous) for result in results)
    logger.info("compute completed dims=%s ambiguous=%d", [result.dim for result in results], ambiguous)
    return EXIT_AMBIGUOUS if ambiguous else EXIT_OK


def _curve(args: argparse.Namespace) -> int:
    matrix = _load_matrix(args)
    branches = sample_curve(kippenhahn_poly(matrix), args.chart, args.samples)
    write_curve_csv(branches, args.csv or sys.stdout)
    logger.info("curve completed chart=%s branches=%d", args.chart, len(branches))
    return EXIT_OK


def _boundary(args: argparse.Namespace) -> int:
    matrix = _load_matrix(args)
    config = load_config(threads=args.threads)
    boundary = boundary_poly(kippenhahn_poly(matrix), workers=config.workers)
    payload = {"schema": REPORT_SCHEMA, "g": boundary_payload(boundary)}
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK


def _parse_coordinate(text: str) -> Any:
    try:
        return to_rational(text)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"cannot read coordinate {text!r}") from exc


def _member(args: argparse.Namespace) -> int:
    matrix = _load_matrix(args)
    config = _config(args)
    a, b = (_parse_coordinate(value) for value in args.point)
    verdict = membership_test(
        kippenhahn_poly(matrix), args.k, a, b, config.tol, precision=config.precision, divtol=config.divtol
    )
    payload = {
        "member": verdict.member,
        "status": verdict.status,
        "margin": verdict.margin,
        "ambiguous": verdict.ambiguous,
        "test_points": [point.s for point in verdict.witnesses],
    }
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", None)
    return EXIT_AMBIGUOUS if verdict.ambiguous else EXIT_OK


COMMANDS = {"compute": _compute, "curve": _curve, "boundary": _boundary, "member": _member}


def run_cli(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        logger.error("%s failed to read input: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (KIndexError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NRangeError, ValueError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    raise SystemExit(run_cli())


__all__ = ["run_cli", "main", "EXIT_OK", "EXIT_USAGE", "EXIT_PARSE", "EXIT_AMBIGUOUS", "EXIT_FAILURE"]
