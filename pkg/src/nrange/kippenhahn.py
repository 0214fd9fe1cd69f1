"""The Kippenhahn polynomial f_A = det(t*I + x*Re(A) + y*Im(A)) and its geometry."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyfuncs import interpolate

from .errors import DomainError
from .pencil import ComplexMatrix, HermitianPair, hermitian_parts
from .polynomials import (
    GENS,
    SOLVE_PRECISION,
    HomPoly3,
    T,
    X,
    Y,
    _snap_into,
    isolate_real_roots,
    real_common_zeros,
    squarefree,
)
from .utils import parallel_map, to_rational

logger = logging.getLogger("nrange.kippenhahn")

CORANK_TOL = 1e-9


@dataclass(frozen=True)
class KippenhahnData:
    f: HomPoly3
    fred: HomPoly3
    pair: HermitianPair
    n: int
    matrix: ComplexMatrix | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ProjPointR:
    """Real projective point scaled so its first nonzero coordinate is 1.

    Inexact points carry rational approximations and the coordinate error bound
    ``radius``.
    """

    coords: tuple[sympy.Rational, sympy.Rational, sympy.Rational]
    exact: bool = True
    radius: float = 0.0
    multiplicity: int | None = field(default=None, compare=False)

    @classmethod
    def of(cls, p0: Any, p1: Any, p2: Any, *, exact: bool = True, radius: float = 0.0) -> "ProjPointR":
        values = [to_rational(value) for value in (p0, p1, p2)]
        pivot = next((value for value in values if value != 0), None)
        if pivot is None:
            raise DomainError("projective point with all coordinates zero")
        scaled = tuple(value / pivot for value in values)
        return cls(scaled, exact, radius / abs(float(pivot)) if radius else 0.0)

    def floats(self) -> tuple[float, float, float]:
        return tuple(float(value) for value in self.coords)

    def with_multiplicity(self, multiplicity: int) -> "ProjPointR":
        return ProjPointR(self.coords, self.exact, self.radius, multiplicity)

    def __str__(self) -> str:
        return "[" + ":".join(str(value) if self.exact else f"{float(value):.12g}" for value in self.coords) + "]"


@dataclass(frozen=True)
class AffineMap:
    """L(a, b) = (u01 + u11*a + u21*b, u02 + u12*a + u22*b)."""

    u01: Any
    u02: Any
    u11: Any
    u12: Any
    u21: Any
    u22: Any

    def __post_init__(self) -> None:
        if self.determinant == 0:
            raise DomainError("affine map is not invertible")

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(0, 0, 1, 0, 0, 1)

    @classmethod
    def through_point(cls, p: ProjPointR) -> "AffineMap":
        """A map with [u02:u12:u22] = p, so [0:0:1] on the image curve corresponds to p."""
        p0, p1, p2 = p.coords
        if p1 == 0 and p2 == 0:
            raise DomainError("point must differ from [1:0:0]")
        return cls(0, p0, p2, p1, -p1, p2)

    @property
    def determinant(self) -> Any:
        return self.u11 * self.u22 - self.u21 * self.u12

    def apply(self, a: Any, b: Any) -> tuple[Any, Any]:
        return (
            self.u01 + self.u11 * a + self.u21 * b,
            self.u02 + self.u12 * a + self.u22 * b,
        )

    def values(self) -> tuple[Any, ...]:
        """Components as floats when any is a float, else as exact rationals."""
        raw = (self.u01, self.u02, self.u11, self.u12, self.u21, self.u22)
        if any(isinstance(value, float) for value in raw):
            return tuple(float(value) for value in raw)
        return tuple(to_rational(value) for value in raw)

    def inverse(self) -> "AffineMap":
        u01, u02, u11, u12, u21, u22 = self.values()
        det = u11 * u22 - u21 * u12
        v11, v21, v12, v22 = u22 / det, -u21 / det, -u12 / det, u11 / det
        return AffineMap(
            -(v11 * u01 + v21 * u02),
            -(v12 * u01 + v22 * u02),
            v11,
            v12,
            v21,
            v22,
        )


def _charpoly_coefficients(matrix: sympy.MatrixBase) -> list[sympy.Rational]:
    domain_matrix = DomainMatrix.from_Matrix(matrix)
    domain = domain_matrix.domain
    coefficients = []
    for value in domain_matrix.charpoly():
        real_part, imag_part = sympy.expand(domain.to_sympy(value)).as_real_imag()
        if imag_part != 0:
            raise DomainError("characteristic polynomial of a Hermitian matrix is not real")
        coefficients.append(sympy.Rational(real_part))
    return coefficients


def kippenhahn_poly(matrix: ComplexMatrix) -> KippenhahnData:
    """Exact f_A by interpolation in y of the characteristic polynomials of Re(A) + s*Im(A).

    det(t*I + M) is the characteristic polynomial of -M, so each grid point
    s = 0..n gives f(t, 1, s) exactly; the coefficient of t^i is a polynomial
    of degree at most n - i in s and is homogenized with x.
    """
    pair = hermitian_parts(matrix)
    n = pair.n
    samples = [_charpoly_coefficients(-(pair.re + s * pair.im)) for s in range(n + 1)]
    terms: dict[tuple[int, int, int], sympy.Rational] = {}
    for power in range(n + 1):
        index = n - power
        data = [(s, samples[s][index]) for s in range(n + 1)]
        column = sympy.Poly(interpolate(data, Y), Y, domain=QQ)
        for (y_power,), coefficient in column.terms():
            if coefficient != 0:
                terms[(power, n - power - y_power, y_power)] = coefficient
    f = HomPoly3(sympy.Poly.from_dict(terms, *GENS, domain=QQ))
    fred = squarefree(f)
    logger.debug("kippenhahn_poly n=%d reduced degree=%d", n, fred.degree)
    return KippenhahnData(f, fred, pair, n, matrix)


def multiplicity_at(data: KippenhahnData, p: ProjPointR) -> int:
    """Corank of p0*I + p1*Re(A) + p2*Im(A), the multiplicity of f_A at p."""
    p0, p1, p2 = p.coords
    if p1 == 0 and p2 == 0:
        raise DomainError("multiplicity needs (p1, p2) != (0, 0)")
    if p.exact:
        matrix = data.pair.exact_combination(p0, p1, p2)
        return data.n - DomainMatrix.from_Matrix(matrix).to_field().rank()
    values = np.linalg.eigvalsh(float(p0) * np.eye(data.n) + data.pair.combination(float(p1), float(p2)))
    scale = max(float(np.max(np.abs(values))), 1.0)
    return int(np.count_nonzero(np.abs(values) <= CORANK_TOL * scale))


def apply_affine(matrix: ComplexMatrix, transform: AffineMap) -> ComplexMatrix:
    """L*A = (u01 + i*u02)*I + (u11 + i*u12)*Re(A) + (u21 + i*u22)*Im(A)."""
    pair = hermitian_parts(matrix)
    u = [to_rational(value) for value in transform.values()]
    image = (
        (u[0] + sympy.I * u[1]) * sympy.eye(matrix.n)
        + (u[2] + sympy.I * u[3]) * pair.re
        + (u[4] + sympy.I * u[5]) * pair.im
    ).expand()
    return ComplexMatrix.from_sympy(image, mode=matrix.mode)


def transform_poly(f: HomPoly3, transform: AffineMap) -> HomPoly3:
    """f(t + u01*x + u02*y, u11*x + u12*y, u21*x + u22*y)."""
    u01, u02, u11, u12, u21, u22 = (to_rational(value) for value in transform.values())
    substituted = f.as_expr().subs(
        {T: T + u01 * X + u02 * Y, X: u11 * X + u12 * Y, Y: u21 * X + u22 * Y},
        simultaneous=True,
    )
    return HomPoly3.from_expr(sympy.expand(substituted))


def power_of_linear_form(data: KippenhahnData) -> tuple[sympy.Rational, sympy.Rational] | None:
    """(a, b) when f_A = (t + a*x + b*y)^n, otherwise None."""
    if data.fred.degree != 1:
        return None
    poly = data.fred.poly
    lead = poly.coeff_monomial(T)
    return (poly.coeff_monomial(X) / lead, poly.coeff_monomial(Y) / lead)


def _affine_chart_points(fred: HomPoly3) -> list[ProjPointR]:
    chart = fred.dehomogenize("t")
    system = [chart, chart.diff(X), chart.diff(Y)]
    return [
        ProjPointR.of(1, point.u, point.v, exact=point.exact, radius=point.radius)
        for point in real_common_zeros(system)
    ]


def _line_at_infinity_points(fred: HomPoly3) -> list[ProjPointR]:
    polys = [fred, fred.diff(T), fred.diff(X), fred.diff(Y)]
    restricted = [
        sympy.Poly(poly.as_expr().subs({T: 0, X: 1}), Y, domain=QQ) for poly in polys
    ]
    restricted = [poly for poly in restricted if not poly.is_zero]
    if not restricted:
        raise DomainError("line t = 0 is a multiple component")
    common = restricted[0]
    for poly in restricted[1:]:
        common = common.gcd(poly)
    if common.degree() <= 0:
        return []
    points: list[ProjPointR] = []
    isolation = isolate_real_roots(common, SOLVE_PRECISION)
    for (lower, upper), midpoint in zip(isolation.intervals, isolation.midpoints()):
        snapped = _snap_into(lower, upper)
        if snapped is not None and common(snapped) == 0:
            points.append(ProjPointR.of(0, 1, snapped))
        else:
            points.append(ProjPointR.of(0, 1, midpoint, exact=False, radius=float(upper - lower) / 2))
    return points


def _pole_point(fred: HomPoly3) -> list[ProjPointR]:
    polys = [fred, fred.diff(T), fred.diff(X), fred.diff(Y)]
    if all(poly(0, 0, 1) == 0 for poly in polys):
        return [ProjPointR.of(0, 0, 1)]
    return []


def real_singular_points(data: KippenhahnData, *, workers: int = 1) -> list[ProjPointR]:
    """Real singular points of V(fred) with their multiplicities on f_A.

    Charts: t = 1, then [0:1:y], then the single point [0:0:1].
    """
    fred = data.fred
    if fred.degree < 1:
        raise DomainError("singular points of a constant polynomial")
    if fred.degree == 1:
        return []
    charts = [_affine_chart_points, _line_at_infinity_points, _pole_point]
    found = parallel_map(lambda chart: chart(fred), charts, workers)
    points = [point for chart_points in found for point in chart_points]
    points.sort(key=lambda point: point.floats())
    result = [point.with_multiplicity(multiplicity_at(data, point)) for point in points]
    logger.debug("real_singular_points found %d point(s)", len(result))
    return result


__all__ = [
    "KippenhahnData",
    "ProjPointR",
    "AffineMap",
    "kippenhahn_poly",
    "multiplicity_at",
    "apply_affine",
    "transform_poly",
    "power_of_linear_form",
    "real_singular_points",
]
