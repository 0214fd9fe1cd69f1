"""JSON matrix files and computation reports.

Matrix file::

    {"n": 2, "mode": "exact", "entries": [[[num_re, den_re, num_im, den_im], ...], ...]}

Exact entries are integers or integer strings; a zero denominator reads as 1.
Float entries are ``[re, im]`` doubles. Reports follow the ``nrange.report/1``
schema and are written with sorted keys so identical runs give identical bytes.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import IO, Any

import sympy

from . import __version__
from .boundary import BoundaryPoly, DualPoint
from .config import SolverConfig
from .errors import ParseError
from .kippenhahn import KippenhahnData
from .pencil import EXACT, FLOAT, ComplexMatrix
from .solver import RangeResult
from .utils import format_rational, witness_payload

logger = logging.getLogger("nrange.matrix_io")

REPORT_SCHEMA = "nrange.report/1"


def _read_text(source: str | Path | IO[str]) -> tuple[str, str]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            return path.read_text(encoding="utf-8"), str(path)
        except OSError as exc:
            raise ParseError(f"cannot read matrix file: {exc}", context=str(path)) from exc
    return source.read(), getattr(source, "name", "<stream>")


def _parse_integer(value: Any, context: str) -> int:
    if isinstance(value, bool):
        raise ParseError("expected an integer, got a boolean", context=context)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError as exc:
            raise ParseError(f"expected an integer string, got {value!r}", context=context) from exc
    raise ParseError(f"expected an integer, got {value!r}", context=context)


def _parse_exact_entry(value: Any, context: str) -> sympy.Expr:
    if not isinstance(value, list) or len(value) != 4:
        raise ParseError("exact entries are [num_re, den_re, num_im, den_im]", context=context)
    num_re, den_re, num_im, den_im = (_parse_integer(part, context) for part in value)
    return sympy.Rational(num_re, den_re or 1) + sympy.I * sympy.Rational(num_im, den_im or 1)


def _parse_float_entry(value: Any, context: str) -> complex:
    if not isinstance(value, list) or len(value) != 2:
        raise ParseError("float entries are [re, im]", context=context)
    parts = []
    for part in value:
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise ParseError(f"expected a number, got {part!r}", context=context)
        parts.append(float(part))
    return complex(parts[0], parts[1])


def matrix_from_payload(payload: Any, *, origin: str = "<payload>") -> ComplexMatrix:
    """Build a ComplexMatrix from an already decoded matrix document."""
    if not isinstance(payload, dict):
        raise ParseError("matrix document must be a JSON object", context=origin)
    mode = payload.get("mode", EXACT)
    if mode not in (EXACT, FLOAT):
        raise ParseError(f"mode must be 'exact' or 'float', got {mode!r}", context=f"{origin}: mode")
    n = _parse_integer(payload.get("n"), f"{origin}: n")
    if n < 1:
        raise ParseError("n must be positive", context=f"{origin}: n")
    entries = payload.get("entries")
    if not isinstance(entries, list):
        raise ParseError("entries must be a list of rows", context=f"{origin}: entries")
    if len(entries) != n:
        raise ParseError(f"expected {n} rows, found {len(entries)}", context=f"{origin}: entries")
    parse_entry = _parse_exact_entry if mode == EXACT else _parse_float_entry
    rows = []
    for i, row in enumerate(entries, start=1):
        if not isinstance(row, list) or len(row) != n:
            size = len(row) if isinstance(row, list) else "no"
            raise ParseError(f"row {i} has {size} entries, expected {n}", context=f"{origin}: entries[{i}]")
        rows.append([parse_entry(value, f"{origin}: entries[{i}][{j}]") for j, value in enumerate(row, start=1)])
    return ComplexMatrix.from_rows(rows, mode=mode)


def parse_matrix(source: str | Path | IO[str]) -> ComplexMatrix:
    text, origin = _read_text(source)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", context=f"{origin}: line {exc.lineno}") from exc
    matrix = matrix_from_payload(payload, origin=origin)
    logger.debug("parse_matrix %s n=%d mode=%s", origin, matrix.n, matrix.mode)
    return matrix


def serialize_matrix(matrix: ComplexMatrix) -> dict[str, Any]:
    def entry(real: sympy.Rational, imag: sympy.Rational) -> list[Any]:
        if matrix.mode == FLOAT:
            return [float(real), float(imag)]
        return [str(real.p), str(real.q), str(imag.p), str(imag.q)]

    return {
        "n": matrix.n,
        "mode": matrix.mode,
        "entries": [
            [entry(real, imag) for real, imag in zip(real_row, imag_row)]
            for real_row, imag_row in zip(matrix.real, matrix.imag)
        ],
    }


def _dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_matrix(matrix: ComplexMatrix, destination: str | Path | IO[str]) -> None:
    _write_text(_dumps(serialize_matrix(matrix)), destination)


def matrix_digest(matrix: ComplexMatrix) -> str:
    canonical = json.dumps(serialize_matrix(matrix), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def poly_terms(poly: sympy.Poly) -> list[dict[str, Any]]:
    """Nonzero terms as exponent lists with exact coefficients, in the Poly's term order."""
    return [
        {"exponents": list(monom), "coefficient": format_rational(coefficient)}
        for monom, coefficient in poly.terms()
        if coefficient != 0
    ]


def _point_payload(point: DualPoint) -> dict[str, Any]:
    payload = witness_payload(point.query(), exact=point.exact, radius=point.radius)
    payload["source"] = point.source
    return payload


def boundary_payload(boundary: BoundaryPoly) -> dict[str, Any]:
    return {
        "degree": boundary.degree,
        "terms": poly_terms(boundary.g),
        "expression": str(boundary.g.as_expr()),
        "extraneous_removed": boundary.extraneous_removed,
        "components": [
            {
                "kind": component.kind,
                "degree": component.degree,
                "expression": str(component.poly.as_expr()),
            }
            for component in boundary.components
        ],
    }


def result_payload(result: RangeResult) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "k": result.k,
        "dim": result.dim,
        "diagnostics": list(result.diagnostics),
        "ambiguous": list(result.ambiguous),
    }
    if result.point is not None:
        payload["point"] = _point_payload(result.point)
    if result.endpoints is not None:
        payload["endpoints"] = [_point_payload(point) for point in result.endpoints]
    if result.boundary is not None:
        payload["g"] = boundary_payload(result.boundary)
        payload["representatives"] = [_point_payload(point) for point in result.representatives]
    return payload


def build_report(
    matrix: ComplexMatrix,
    data: KippenhahnData,
    results: Sequence[RangeResult],
    config: SolverConfig,
) -> dict[str, Any]:
    return {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "input": {
            "sha256": matrix_digest(matrix),
            "n": matrix.n,
            "mode": matrix.mode,
            "k": [result.k for result in results],
        },
        "config": config.echo(),
        "kippenhahn": {
            "degree": data.f.degree,
            "terms": poly_terms(data.f.poly),
            "reduced_degree": data.fred.degree,
        },
        "results": [result_payload(result) for result in results],
    }


def _write_text(text: str, destination: str | Path | IO[str]) -> None:
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)


def write_report(report: dict[str, Any], destination: str | Path | IO[str]) -> None:
    _write_text(_dumps(report), destination)


def report_text(report: dict[str, Any]) -> str:
    buffer = io.StringIO()
    write_report(report, buffer)
    return buffer.getvalue()


__all__ = [
    "REPORT_SCHEMA",
    "matrix_from_payload",
    "parse_matrix",
    "serialize_matrix",
    "write_matrix",
    "matrix_digest",
    "poly_terms",
    "boundary_payload",
    "result_payload",
    "build_report",
    "write_report",
    "report_text",
]
