"""Complex matrices, Hermitian parts and eigenvalues along the pencil x*Re(A) + y*Im(A)."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np
import sympy

from .errors import DimensionError, DomainError, KIndexError, ParameterError
from .utils import parallel_map, to_rational

EXACT = "exact"
FLOAT = "float"
MIN_OK_SAMPLES = 4
HERMITIAN_FLOAT_TOL = 1e-12
SPECTRAL_RADIUS_SAMPLES = 64


def _split_entry(value: Any) -> tuple[sympy.Rational, sympy.Rational]:
    if isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise DomainError(f"complex entry pairs need two parts, got {value!r}")
        return to_rational(value[0]), to_rational(value[1])
    if isinstance(value, complex):
        return to_rational(value.real), to_rational(value.imag)
    if isinstance(value, (int, float, str, Fraction, sympy.Rational, sympy.Float)):
        return to_rational(value), sympy.Integer(0)
    if isinstance(value, sympy.Expr):
        real_part, imag_part = sympy.expand(value).as_real_imag()
        try:
            return to_rational(real_part), to_rational(imag_part)
        except TypeError as exc:
            raise DomainError(f"entry {value} is not a Gaussian rational") from exc
    raise DomainError(f"unsupported matrix entry {value!r}")


@dataclass(frozen=True)
class ComplexMatrix:
    """Square complex matrix with Gaussian-rational entries.

    Float input is kept as the exact binary value of every double; ``mode``
    only records how the entries arrived so that files round-trip.
    """

    real: tuple[tuple[sympy.Rational, ...], ...]
    imag: tuple[tuple[sympy.Rational, ...], ...]
    mode: str = EXACT

    def __post_init__(self) -> None:
        n = len(self.real)
        if n == 0:
            raise DimensionError("matrix must have at least one row")
        if len(self.imag) != n:
            raise DimensionError("real and imaginary parts differ in shape")
        for index, (real_row, imag_row) in enumerate(zip(self.real, self.imag), start=1):
            if len(real_row) != n or len(imag_row) != n:
                raise DimensionError(f"row {index} has {len(real_row)} entries, expected {n}")
        if self.mode not in (EXACT, FLOAT):
            raise DomainError(f"unknown matrix mode {self.mode!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]], *, mode: str | None = None) -> "ComplexMatrix":
        real_rows: list[tuple[sympy.Rational, ...]] = []
        imag_rows: list[tuple[sympy.Rational, ...]] = []
        saw_float = False
        for row in rows:
            real_row: list[sympy.Rational] = []
            imag_row: list[sympy.Rational] = []
            for value in row:
                saw_float = saw_float or isinstance(value, (float, complex))
                real_part, imag_part = _split_entry(value)
                real_row.append(real_part)
                imag_row.append(imag_part)
            real_rows.append(tuple(real_row))
            imag_rows.append(tuple(imag_row))
        resolved_mode = mode or (FLOAT if saw_float else EXACT)
        return cls(tuple(real_rows), tuple(imag_rows), resolved_mode)

    @classmethod
    def from_sympy(cls, matrix: sympy.MatrixBase, *, mode: str = EXACT) -> "ComplexMatrix":
        return cls.from_rows(matrix.tolist(), mode=mode)

    @classmethod
    def diagonal(cls, values: Sequence[Any], *, mode: str | None = None) -> "ComplexMatrix":
        n = len(values)
        rows = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_rows(rows, mode=mode)

    @property
    def n(self) -> int:
        return len(self.real)

    def entry(self, i: int, j: int) -> sympy.Expr:
        return self.real[i][j] + sympy.I * self.imag[i][j]

    def to_sympy(self) -> sympy.ImmutableMatrix:
        return sympy.ImmutableMatrix(self.n, self.n, lambda i, j: self.entry(i, j))

    def to_numpy(self) -> np.ndarray:
        real = np.array([[float(value) for value in row] for row in self.real], dtype=float)
        imag = np.array([[float(value) for value in row] for row in self.imag], dtype=float)
        return real + 1j * imag


@dataclass(frozen=True)
class HermitianPair:
    """Re(A) and Im(A) as exact Hermitian matrices."""

    re: sympy.ImmutableMatrix
    im: sympy.ImmutableMatrix

    def __post_init__(self) -> None:
        if self.re.shape != self.im.shape or self.re.rows != self.re.cols:
            raise DimensionError("Hermitian parts must be square and of equal shape")
        for name, matrix in (("re", self.re), ("im", self.im)):
            if (matrix - matrix.H).expand().is_zero_matrix is False:
                raise DomainError(f"{name} is not Hermitian")

    @property
    def n(self) -> int:
        return self.re.rows

    @cached_property
    def re_array(self) -> np.ndarray:
        return _hermitian_array(self.re)

    @cached_property
    def im_array(self) -> np.ndarray:
        return _hermitian_array(self.im)

    def combination(self, x: float, y: float) -> np.ndarray:
        matrix = x * self.re_array + y * self.im_array
        return (matrix + matrix.conj().T) / 2

    def exact_combination(self, p0: Any, p1: Any, p2: Any) -> sympy.Matrix:
        """p0*I + p1*Re(A) + p2*Im(A) with exact entries."""
        return (p0 * sympy.eye(self.n) + p1 * self.re + p2 * self.im).expand()


@dataclass(frozen=True)
class SupportSample:
    theta: float
    point: tuple[float, float, float]


def _hermitian_array(matrix: sympy.MatrixBase) -> np.ndarray:
    array = np.array([[complex(value) for value in row] for row in matrix.tolist()], dtype=complex)
    hermitian = (array + array.conj().T) / 2
    if np.max(np.abs(array - hermitian), initial=0.0) > HERMITIAN_FLOAT_TOL * (1 + np.max(np.abs(array))):
        raise DomainError("matrix is not Hermitian within float tolerance")
    return hermitian


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise KIndexError(f"k must satisfy 1 <= k <= {n}, got {k}")


def hermitian_parts(matrix: ComplexMatrix) -> HermitianPair:
    """Split A into Re(A) = (A + A*)/2 and Im(A) = (A - A*)/(2i)."""
    exact = matrix.to_sympy()
    adjoint = exact.H
    re = ((exact + adjoint) / 2).expand()
    im = ((exact - adjoint) / (2 * sympy.I)).expand()
    return HermitianPair(sympy.ImmutableMatrix(re), sympy.ImmutableMatrix(im))


def eigenvalues(pair: HermitianPair, x: float, y: float) -> np.ndarray:
    """Eigenvalues of x*Re(A) + y*Im(A), largest first."""
    return np.linalg.eigvalsh(pair.combination(float(x), float(y)))[::-1]


def lambda_k(pair: HermitianPair, k: int, x: float, y: float) -> float:
    _check_k(k, pair.n)
    return float(eigenvalues(pair, x, y)[k - 1])


def sample_Ok(pair: HermitianPair, k: int, m: int, *, workers: int = 1) -> list[SupportSample]:
    """Sample the curve O_k(A) at m equally spaced angles."""
    _check_k(k, pair.n)
    if m < MIN_OK_SAMPLES:
        raise ParameterError(f"sample count must be at least {MIN_OK_SAMPLES}, got {m}")

    def sample(index: int) -> SupportSample:
        theta = 2 * math.pi * index / m
        cos_theta, sin_theta = math.cos(theta), math.sin(theta)
        value = lambda_k(pair, k, cos_theta, sin_theta)
        return SupportSample(theta, (value, -cos_theta, -sin_theta))

    return parallel_map(sample, list(range(m)), workers)


def antipodal_gap(pair: HermitianPair, k: int, theta: float) -> float:
    """lambda_k(theta) + lambda_k(theta + pi)."""
    cos_theta, sin_theta = math.cos(theta), math.sin(theta)
    return lambda_k(pair, k, cos_theta, sin_theta) + lambda_k(pair, k, -cos_theta, -sin_theta)


def spectral_radius(pair: HermitianPair, samples: int = SPECTRAL_RADIUS_SAMPLES) -> float:
    radius = 0.0
    for index in range(samples):
        theta = 2 * math.pi * index / samples
        values = eigenvalues(pair, math.cos(theta), math.sin(theta))
        radius = max(radius, float(np.max(np.abs(values))))
    return radius


__all__ = [
    "EXACT",
    "FLOAT",
    "ComplexMatrix",
    "HermitianPair",
    "SupportSample",
    "hermitian_parts",
    "eigenvalues",
    "lambda_k",
    "sample_Ok",
    "antipodal_gap",
    "spectral_radius",
]
