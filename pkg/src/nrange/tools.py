"""MCP tool implementations."""

from __future__ import annotations

from typing import Any

from .app import mcp
from .boundary import boundary_poly
from .config import _configure_logging, load_config, logger
from .errors import DimensionError, InconsistencyError, KIndexError, NRangeError, ParameterError, ParseError
from .kippenhahn import kippenhahn_poly
from .matrix_io import boundary_payload, matrix_from_payload, poly_terms, result_payload
from .membership import membership_test
from .solver import solve_range
from .utils import _normalize_k_values, to_rational

INVALID_INPUT = (ParseError, ParameterError, KIndexError, DimensionError)


def _error_payload(operation: str, exc: Exception) -> dict[str, Any]:
    if isinstance(exc, INVALID_INPUT):
        logger.warning("%s rejected input: %s", operation, exc)
        return {"error": "invalid_request", "message": str(exc)}
    if isinstance(exc, InconsistencyError):
        logger.error("%s hit an inconsistency: %s", operation, exc)
        return {"error": "inconsistency", "message": str(exc)}
    logger.error("%s failed: %s", operation, exc)
    return {"error": "computation_error", "message": str(exc)}


def _coordinate(value: Any, name: str) -> Any:
    if isinstance(value, float):
        return value
    try:
        return to_rational(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be a number or a rational string like '1/3'.") from exc


@mcp.tool()
def healthcheck() -> str:
    """Return service status for basic connectivity checks.

    Use this to verify the MCP server is reachable end-to-end.
    Returns the string "ok" on success.
    """
    return "ok"


@mcp.tool()
def kippenhahn_polynomial(matrix: dict[str, Any]) -> dict[str, Any]:
    """Compute f_A(t, x, y) = det(t*I + x*Re(A) + y*Im(A)) exactly.

    Parameters:
        matrix: Matrix document {"n", "mode", "entries"}; exact entries are
            [num_re, den_re, num_im, den_im], float entries are [re, im].

    Returns:
        A dict with keys: n, degree, terms (exponent triples with exact
        coefficients), expression, reduced_degree, reduced_terms.
    """
    _configure_logging()
    logger.info("kippenhahn_polynomial started")
    try:
        data = kippenhahn_poly(matrix_from_payload(matrix, origin="matrix"))
    except (NRangeError, ValueError) as exc:
        return _error_payload("kippenhahn_polynomial", exc)
    logger.info("kippenhahn_polynomial completed n=%d reduced_degree=%d", data.n, data.fred.degree)
    return {
        "n": data.n,
        "degree": data.f.degree,
        "terms": poly_terms(data.f.poly),
        "expression": str(data.f.as_expr()),
        "reduced_degree": data.fred.degree,
        "reduced_terms": poly_terms(data.fred.poly),
    }


@mcp.tool()
def membership(
    matrix: dict[str, Any],
    k: int,
    a: str | float | int,
    b: str | float | int,
    tol: float | None = None,
) -> dict[str, Any]:
    """Decide whether the point a + i*b lies in the rank-k numerical range.

    Parameters:
        matrix: Matrix document, as for kippenhahn_polynomial.
        k: Rank index, 1 <= k <= n.
        a: Real part; integers and strings such as "1/3" are exact, floats are not.
        b: Imaginary part, same conventions as a.
        tol: Eigenvalue comparison tolerance (defaults to NRANGE_TOL or 1e-9).

    Returns:
        A dict with keys: member, status (member, non-member or boundary),
        margin, ambiguous, linear_power and test_points.
    """
    _configure_logging()
    logger.info("membership started k=%s", k)
    try:
        config = load_config(tol=tol)
        verdict = membership_test(
            kippenhahn_poly(matrix_from_payload(matrix, origin="matrix")),
            int(k),
            _coordinate(a, "a"),
            _coordinate(b, "b"),
            config.tol,
            precision=config.precision,
            divtol=config.divtol,
        )
    except (NRangeError, ValueError) as exc:
        return _error_payload("membership", exc)
    logger.info("membership completed status=%s margin=%.3e", verdict.status, verdict.margin)
    return {
        "member": verdict.member,
        "status": verdict.status,
        "margin": verdict.margin,
        "ambiguous": verdict.ambiguous,
        "linear_power": verdict.linear_power,
        "test_points": [point.s for point in verdict.witnesses],
    }


@mcp.tool()
def numerical_range(
    matrix: dict[str, Any],
    k: int | list[int] | None = None,
    tol: float | None = None,
    samples: int | None = None,
) -> dict[str, Any]:
    """Compute the dimension of Lambda_k(A) and witnesses for it.

    Parameters:
        matrix: Matrix document, as for kippenhahn_polynomial.
        k: One rank index or a list of them; defaults to every k in 1..n.
        tol: Eigenvalue comparison tolerance.
        samples: Number of supporting halfplanes in the outer approximation.

    Returns:
        A dict with key results: one entry per k with dim, point, endpoints or
        g and representatives, diagnostics and ambiguous margins.
    """
    _configure_logging()
    logger.info("numerical_range started")
    try:
        config = load_config(tol=tol, samples=samples)
        data = kippenhahn_poly(matrix_from_payload(matrix, origin="matrix"))
        ks = _normalize_k_values(k, data.n)
        results = [solve_range(data, value, config) for value in ks]
    except (NRangeError, ValueError) as exc:
        return _error_payload("numerical_range", exc)
    logger.info("numerical_range completed dims=%s", [result.dim for result in results])
    return {"n": data.n, "results": [result_payload(result) for result in results]}


@mcp.tool()
def boundary_polynomial(matrix: dict[str, Any]) -> dict[str, Any]:
    """Compute g_A, the polynomial whose zero set contains the boundary of every Lambda_k(A).

    Parameters:
        matrix: Matrix document, as for kippenhahn_polynomial.

    Returns:
        A dict with keys: degree, terms, expression, extraneous_removed and
        components (each tagged "dual" or "singular-line").
    """
    _configure_logging()
    logger.info("boundary_polynomial started")
    try:
        data = kippenhahn_poly(matrix_from_payload(matrix, origin="matrix"))
        boundary = boundary_poly(data, workers=load_config().workers)
    except (NRangeError, ValueError) as exc:
        return _error_payload("boundary_polynomial", exc)
    logger.info("boundary_polynomial completed degree=%d", boundary.degree)
    return boundary_payload(boundary)


__all__ = [
    "healthcheck",
    "kippenhahn_polynomial",
    "membership",
    "numerical_range",
    "boundary_polynomial",
]
