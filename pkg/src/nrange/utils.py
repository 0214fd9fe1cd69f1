"""Small shared helpers: worker pool, number formatting, payload normalization."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, TypeVar

import sympy

from .errors import ParameterError

T = TypeVar("T")
R = TypeVar("R")

DECIMAL_DIGITS = 17


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    """Apply func to every item, preserving input order in the result."""
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(func, items))


def to_rational(value: Any) -> sympy.Rational:
    """Exact rational for ints, Fractions, sympy numbers, numeric strings and floats.

    Floats convert to their exact binary value.
    """
    if isinstance(value, sympy.Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return sympy.Integer(value)
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        numerator, denominator = value.as_integer_ratio()
        return sympy.Rational(numerator, denominator)
    if isinstance(value, str):
        return sympy.Rational(value.strip())
    if isinstance(value, sympy.Float):
        return sympy.Rational(value)
    raise TypeError(f"cannot convert {value!r} to a rational")


def is_exact_number(value: Any) -> bool:
    return isinstance(value, (int, Fraction, sympy.Rational)) and not isinstance(value, bool)


def format_decimal(value: Any, digits: int = DECIMAL_DIGITS) -> str:
    return f"{float(value):.{digits}g}"


def format_rational(value: sympy.Rational) -> str:
    value = sympy.Rational(value)
    if value.q == 1:
        return str(value.p)
    return f"{value.p}/{value.q}"


def witness_payload(point: Sequence[Any], *, exact: bool, radius: float = 0.0) -> dict[str, Any]:
    """JSON-ready form of a point (a, b): decimal strings, error bound, exact form when known."""
    payload: dict[str, Any] = {
        "decimal": [format_decimal(coordinate) for coordinate in point],
        "error_bound": 0.0 if exact else float(radius),
    }
    if exact:
        payload["exact"] = [format_rational(to_rational(coordinate)) for coordinate in point]
    return payload


def _normalize_k_values(values: int | Iterable[int] | None, n: int) -> list[int]:
    if values is None:
        return list(range(1, n + 1))
    if isinstance(values, int):
        values = [values]
    normalized: list[int] = []
    for value in values:
        try:
            k = int(value)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"k must be an integer, got {value!r}.") from exc
        if k not in normalized:
            normalized.append(k)
    if not normalized:
        raise ParameterError("at least one k is required.")
    return normalized


__all__ = [
    "DECIMAL_DIGITS",
    "parallel_map",
    "to_rational",
    "is_exact_number",
    "format_decimal",
    "format_rational",
    "witness_payload",
    "_normalize_k_values",
]
