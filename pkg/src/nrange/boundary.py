"""The boundary polynomial g_A and the special lines used by the range solver.

A line t + a*x + b*y is identified with the point (a, b). Restricting an
irreducible factor q of f_A^red to that line in the chart y = 1 gives
R[q](X) = q(-a*X - b, X, 1); its discriminant in X cuts out the dual curve of q
(simple factors) and the pencils of lines through singular points of q
(repeated factors). Resultants of two restrictions cut out the pencils through
the intersection points of the two components.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import sympy
from sympy import QQ

from .config import DEFAULT_MAX_DUAL_DEGREE, DEFAULT_PRECISION
from .errors import DomainError, KIndexError
from .kippenhahn import (
    AffineMap,
    KippenhahnData,
    ProjPointR,
    power_of_linear_form,
    real_singular_points,
    transform_poly,
)
from .pencil import eigenvalues
from .polynomials import (
    A_SYM,
    B_SYM,
    GENS,
    HomPoly3,
    T,
    X,
    Y,
    coefficient_norm,
    discriminant,
    float_eval,
    isolate_real_roots,
    linear_factors,
    lowest_degree_part,
    normalize_bivariate,
    real_common_zeros,
    resultant,
    squarefree,
    vanishing_order,
)
from .utils import parallel_map

logger = logging.getLogger("nrange.boundary")

DUAL = "dual"
SINGULAR_LINE = "singular-line"
C_SYM = sympy.Symbol("c")
R_SYM, S_SYM = sympy.symbols("r s")

ANTIPODAL_TOL = 1e-7
SPAN_RANK_TOL = 1e-9
ON_CURVE_TOL = 1e-12
LOWEST_PART_TOL = 1e-15
NEAR_REAL_TOL = 1e-7
SMOOTH_GRADIENT_TOL = 1e-6
DEDUPE_TOL = 1e-9
TRITANGENT_DEGREE = 6


@dataclass(frozen=True)
class BoundaryComponent:
    poly: sympy.Poly
    kind: str
    source: str
    primal_degree: int = 0

    @property
    def degree(self) -> int:
        return self.poly.total_degree()


@dataclass(frozen=True)
class BoundaryPoly:
    """Squarefree g_A in (a, b) with its factors tagged by origin."""

    g: sympy.Poly
    components: tuple[BoundaryComponent, ...]
    extraneous_removed: bool = False

    @property
    def degree(self) -> int:
        return self.g.total_degree()

    @property
    def dual_part(self) -> sympy.Poly:
        product = sympy.Poly(1, A_SYM, B_SYM, domain=QQ)
        for component in self.components:
            if component.kind == DUAL:
                product *= component.poly
        return normalize_bivariate(product)

    def factors(self) -> list[sympy.Poly]:
        return [component.poly for component in self.components]

    def relative_residual(self, a: float, b: float) -> float:
        return relative_residual(self.g, a, b)


@dataclass(frozen=True)
class DualPoint:
    """The line t + a*x + b*y as the point (a, b); ``radius`` bounds the error when inexact."""

    a: Any
    b: Any
    exact: bool = True
    radius: float = 0.0
    source: str = field(default="", compare=False)

    def floats(self) -> tuple[float, float]:
        return (float(self.a), float(self.b))

    def query(self) -> tuple[Any, Any]:
        """Coordinates to feed the membership test: exact rationals or floats."""
        if self.exact:
            return (self.a, self.b)
        return self.floats()


@dataclass(frozen=True)
class TangentSet:
    points: tuple[DualPoint, ...]
    origin: ProjPointR
    certified: bool = True


@dataclass(frozen=True)
class AntipodalSpan:
    points: tuple[ProjPointR, ...]
    dim: int
    vperp: DualPoint | None = None


def relative_residual(g: sympy.Poly, a: float, b: float) -> float:
    """|g(a, b)| divided by the sum of the absolute values of its terms."""
    total = 0.0
    magnitude = 0.0
    for (i, j), coefficient in g.terms():
        term = float(coefficient) * a**i * b**j
        total += term
        magnitude += abs(term)
    return abs(total) / magnitude if magnitude else 0.0


def _restriction(q: sympy.Poly) -> sympy.Poly:
    expr = q.as_expr().subs({T: -A_SYM * X - B_SYM, Y: 1}, simultaneous=True)
    return sympy.Poly(sympy.expand(expr), X, A_SYM, B_SYM, domain=QQ)


@functools.lru_cache(maxsize=64)
def _restriction_discriminant(q: sympy.Poly) -> tuple[tuple[sympy.Poly, int], ...]:
    disc = discriminant(_restriction(q), X)
    _, factors = disc.factor_list()
    return tuple((normalize_bivariate(factor), multiplicity) for factor, multiplicity in factors if factor.total_degree() > 0)


@functools.lru_cache(maxsize=256)
def _restriction_resultant(q1: sympy.Poly, q2: sympy.Poly) -> tuple[sympy.Poly, ...]:
    res = resultant(_restriction(q1), _restriction(q2), X)
    if res.is_zero:
        raise DomainError("components share a factor")
    _, factors = res.factor_list()
    return tuple(normalize_bivariate(factor) for factor, _ in factors if factor.total_degree() > 0)


def _primal_factors(fred: HomPoly3) -> list[sympy.Poly]:
    _, factors = fred.poly.factor_list()
    return sorted((factor.monic() for factor, _ in factors), key=lambda factor: (factor.total_degree(), str(factor.as_expr())))


def boundary_poly(data: KippenhahnData, *, workers: int = 1) -> BoundaryPoly:
    """g_A: dual curves of the non-linear factors of f_A^red and one line per singular point."""
    if power_of_linear_form(data) is not None:
        raise DomainError("f_A is a power of a linear form; the range is a single point")
    primal = _primal_factors(data.fred)

    def discriminant_components(q: sympy.Poly) -> list[BoundaryComponent]:
        if q.total_degree() < 2:
            return []
        return [
            BoundaryComponent(factor, DUAL if multiplicity == 1 else SINGULAR_LINE, f"disc:{q.as_expr()}", q.total_degree())
            for factor, multiplicity in _restriction_discriminant(q)
        ]

    def resultant_components(pair: tuple[sympy.Poly, sympy.Poly]) -> list[BoundaryComponent]:
        left, right = pair
        return [
            BoundaryComponent(factor, SINGULAR_LINE, f"res:{left.as_expr()}|{right.as_expr()}")
            for factor in _restriction_resultant(left, right)
        ]

    found = parallel_map(discriminant_components, primal, workers)
    found += parallel_map(resultant_components, list(itertools.combinations(primal, 2)), workers)

    components: dict[sympy.Poly, BoundaryComponent] = {}
    for component in itertools.chain.from_iterable(found):
        components.setdefault(component.poly, component)
    ordered = tuple(sorted(components.values(), key=lambda item: (item.kind != DUAL, item.degree, str(item.poly.as_expr()))))
    product = sympy.Poly(1, A_SYM, B_SYM, domain=QQ)
    for component in ordered:
        product *= component.poly
    g = normalize_bivariate(product)
    logger.debug(
        "boundary_poly degree=%d components=%d duals=%d",
        g.total_degree(),
        len(ordered),
        sum(1 for component in ordered if component.kind == DUAL),
    )
    return BoundaryPoly(g, ordered)


def _require_on_curve(fred: HomPoly3, p: ProjPointR) -> None:
    if p.exact:
        if fred(*p.coords) != 0:
            raise DomainError(f"point {p} is not on the curve")
        return
    value = fred.evaluate_float(*p.floats())
    spread = 1 + sum(abs(coordinate) for coordinate in p.floats())
    if abs(value) > ON_CURVE_TOL * (1 + coefficient_norm(fred.poly)) * spread**fred.degree:
        raise DomainError(f"point {p} is not on the curve")


def _thresholded_lowest_part(poly: sympy.Poly) -> sympy.Poly:
    scale = coefficient_norm(poly)
    by_degree: dict[int, dict[tuple[int, ...], Any]] = {}
    for monom, coefficient in poly.terms():
        by_degree.setdefault(sum(monom), {})[monom] = coefficient
    for degree in sorted(by_degree):
        terms = by_degree[degree]
        if max(abs(float(value)) for value in terms.values()) > LOWEST_PART_TOL * scale:
            return sympy.Poly.from_dict(terms, *poly.gens, domain=poly.get_domain())
    raise DomainError("polynomial vanishes within tolerance")


def _in_c(poly: sympy.Poly) -> sympy.Poly:
    return sympy.Poly(poly.as_expr().subs({T: -C_SYM, X: 1}, simultaneous=True), C_SYM, domain=QQ)


def _certified_parameters(
    fred: HomPoly3,
    p: ProjPointR,
    moved: HomPoly3,
    transform: AffineMap,
    polys: list[sympy.Poly],
    precision: Any,
) -> list[tuple[Any, bool, float]]:
    """Real roots c of the candidate polynomials whose lines t + c*x pass the p-tangency test.

    Rational roots are tested one line at a time; an irreducible factor of
    higher degree is tested once for all of its roots.
    """
    product = sympy.Poly(1, C_SYM, domain=QQ)
    for poly in polys:
        product *= poly
    multiplicity = _multiplicity(fred, p)
    inverse = transform.inverse()
    _, factors = product.sqf_part().factor_list()
    values: list[tuple[Any, bool, float]] = []
    for factor, _ in factors:
        if factor.degree() < 1:
            continue
        if factor.degree() == 1:
            lead, constant = factor.all_coeffs()
            c = -sympy.Rational(constant) / sympy.Rational(lead)
            if is_p_tangent(fred, p, *inverse.apply(c, 0)):
                values.append((c, True, 0.0))
            else:
                logger.debug("singularity_tangents dropped t + (%s)*x at %s", c, p)
            continue
        if not _factor_is_p_tangent(moved, factor, multiplicity):
            logger.debug("singularity_tangents dropped the roots of %s at %s", factor.as_expr(), p)
            continue
        isolation = isolate_real_roots(factor, precision)
        for (lower, upper), midpoint in zip(isolation.intervals, isolation.midpoints()):
            values.append((midpoint, False, float(upper - lower) / 2))
    return sorted(values, key=lambda item: item[0])


def _approximate_parameters(polys: list[sympy.Poly]) -> list[tuple[Any, bool, float]]:
    values: list[float] = []
    for poly in polys:
        if poly.degree() < 1:
            continue
        for root in poly.nroots(n=30):
            real_part, imag_part = (float(part) for part in root.as_real_imag())
            if abs(imag_part) <= NEAR_REAL_TOL * (1 + abs(real_part)):
                values.append(real_part)
    values.sort()
    distinct: list[float] = []
    for value in values:
        if not distinct or abs(value - distinct[-1]) > DEDUPE_TOL * (1 + abs(value)):
            distinct.append(value)
    return [(value, False, NEAR_REAL_TOL) for value in distinct]


def singularity_tangents(
    data: KippenhahnData, p: ProjPointR, *, precision: Any = DEFAULT_PRECISION
) -> TangentSet:
    """Lines t + a*x + b*y that are p-tangent to V(f_A).

    Moves p to [0:0:1]; there the candidates t + c*x are the roots of the
    lowest-degree part of fred(t, x, 1) at (-c, 1), together with the roots of
    Disc_y(fred)(-c, 1). For exact p every returned line has passed the
    restriction test of ``is_p_tangent``; lines through a float p are
    returned uncertified.
    """
    _require_on_curve(data.fred, p)
    transform = AffineMap.through_point(p)
    moved = transform_poly(data.fred, transform)
    if p.exact:
        moved = squarefree(moved)
    chart = moved.dehomogenize("y")
    low = lowest_degree_part(chart) if p.exact else _thresholded_lowest_part(chart)
    polys = [_in_c(low)]
    if moved.poly.degree(Y) >= 2:
        disc = _in_c(discriminant(moved.poly, Y))
        if not disc.is_zero:
            polys.append(disc)
    polys = [poly for poly in polys if not poly.is_zero]

    if p.exact:
        parameters = _certified_parameters(data.fred, p, moved, transform, polys, precision)
    else:
        parameters = _approximate_parameters(polys)
    inverse = transform.inverse()
    scale = sum(abs(float(value)) for value in (inverse.u11, inverse.u12)) or 1.0
    points = []
    for c, exact, radius in parameters:
        a, b = inverse.apply(c, 0)
        if exact and p.exact:
            points.append(DualPoint(sympy.Rational(a), sympy.Rational(b), True, 0.0, "p-tangent"))
        else:
            points.append(DualPoint(float(a), float(b), False, max(radius * scale, p.radius), "p-tangent"))
    logger.debug("singularity_tangents p=%s found %d line(s)", p, len(points))
    return TangentSet(tuple(points), p, certified=p.exact)


def _columns_in_r(terms: dict[tuple[int, int], sympy.Expr], degree: int) -> list[sympy.Expr]:
    """Coefficients of r^0, ..., r^degree of a form in (r, s) given as {(r power, s power): coefficient}."""
    columns: list[sympy.Expr] = [sympy.Integer(0)] * (degree + 1)
    for (r_power, s_power), coefficient in terms.items():
        columns[r_power] += coefficient * S_SYM**s_power
    return columns


def _tangent_from_columns(columns: list[sympy.Expr], multiplicity: int) -> tuple[bool, sympy.Expr]:
    """(True, 0) on an extra zero at p, else (False, the restriction with r^order divided out at r = 1)."""
    order = vanishing_order(columns)
    if order == len(columns) or order > multiplicity:
        return True, sympy.Integer(0)
    return False, sympy.Add(*columns[order:])


def is_p_tangent(fred: HomPoly3, p: ProjPointR, a: Any, b: Any) -> bool:
    """Restriction test: fred on the line has an extra zero at p or a square factor elsewhere.

    The line through p is parametrized as r*q + s*p with q = p x (1, a, b).
    """
    if not p.exact:
        raise DomainError("p-tangency is tested for exact points only")
    line = (sympy.Integer(1), sympy.Rational(a), sympy.Rational(b))
    p0, p1, p2 = p.coords
    if p0 + line[1] * p1 + line[2] * p2 != 0:
        return False
    q = (p1 * line[2] - p2 * line[1], p2 * line[0] - p0 * line[2], p0 * line[1] - p1 * line[0])
    restricted_expr = fred.as_expr().subs(
        {gen: R_SYM * q_i + S_SYM * p_i for gen, q_i, p_i in zip(GENS, q, p.coords)}, simultaneous=True
    )
    restricted = sympy.Poly(sympy.expand(restricted_expr), R_SYM, S_SYM, domain=QQ)
    columns = _columns_in_r(dict(restricted.terms()), fred.degree)
    tangent, remaining_expr = _tangent_from_columns(columns, _multiplicity(fred, p))
    if tangent:
        return True
    remaining = sympy.Poly(remaining_expr, S_SYM, domain=QQ)
    if remaining.degree() < 2:
        return False
    return remaining.gcd(remaining.diff(S_SYM)).degree() > 0


def _factor_is_p_tangent(moved: HomPoly3, factor: sympy.Poly, multiplicity: int) -> bool:
    """``is_p_tangent`` at p = [0:0:1] for the lines t + c*x, c any root of the irreducible ``factor``.

    The restriction is computed over QQ[c] and reduced modulo ``factor``, so the
    verdict holds for all roots at once.
    """
    restricted_expr = moved.as_expr().subs({T: -C_SYM * R_SYM, X: R_SYM, Y: S_SYM}, simultaneous=True)
    restricted = sympy.Poly(sympy.expand(restricted_expr), R_SYM, S_SYM, C_SYM, domain=QQ)
    grouped: dict[tuple[int, int], dict[tuple[int], Any]] = {}
    for (r_power, s_power, c_power), coefficient in restricted.terms():
        grouped.setdefault((r_power, s_power), {})[(c_power,)] = coefficient
    reduced: dict[tuple[int, int], sympy.Expr] = {}
    for key, terms in grouped.items():
        value = sympy.Poly.from_dict(terms, C_SYM, domain=QQ).rem(factor)
        if not value.is_zero:
            reduced[key] = value.as_expr()
    tangent, remaining_expr = _tangent_from_columns(_columns_in_r(reduced, moved.degree), multiplicity)
    if tangent:
        return True
    remaining = sympy.Poly(remaining_expr, S_SYM, C_SYM, domain=QQ)
    if remaining.degree(S_SYM) < 2:
        return False
    return discriminant(remaining, S_SYM).rem(factor).is_zero


def _multiplicity(fred: HomPoly3, p: ProjPointR) -> int:
    moved = transform_poly(fred, AffineMap.through_point(p))
    return min(sum(monom) for monom in moved.dehomogenize("y").monoms())


def antipodal_span(data: KippenhahnData, k: int, *, workers: int = 1) -> AntipodalSpan:
    """Real singular points p with -p0 = lambda_k(p1, p2) = lambda_{n-k+1}(p1, p2), and their span."""
    n = data.n
    if not 1 <= k or not 2 * k < n + 1:
        raise KIndexError(f"antipodal span needs 1 <= k < (n+1)/2, got k={k}, n={n}")
    selected: list[ProjPointR] = []
    for point in real_singular_points(data, workers=workers):
        p0, p1, p2 = point.floats()
        values = eigenvalues(data.pair, p1, p2)
        upper, lower = float(values[k - 1]), float(values[n - k])
        band = ANTIPODAL_TOL * (1 + abs(upper))
        if abs(upper - lower) <= band and abs(-p0 - upper) <= band:
            selected.append(point)
    if not selected:
        return AntipodalSpan((), -1)

    rows = np.array([point.floats() for point in selected], dtype=float)
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    singular_values = np.linalg.svd(rows, compute_uv=False)
    rank = int(np.count_nonzero(singular_values > SPAN_RANK_TOL * singular_values[0]))
    dim = rank - 1
    vperp = _perpendicular_point(selected, rows) if dim == 1 else None
    logger.debug("antipodal_span k=%d points=%d dim=%d", k, len(selected), dim)
    return AntipodalSpan(tuple(selected), dim, vperp)


def _perpendicular_point(points: list[ProjPointR], rows: np.ndarray) -> DualPoint | None:
    if all(point.exact for point in points):
        p, q = points[0].coords, points[1].coords
        normal = (p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0])
        if normal[0] == 0:
            return None
        return DualPoint(normal[1] / normal[0], normal[2] / normal[0], True, 0.0, "span")
    _, _, vh = np.linalg.svd(rows)
    normal = vh[-1]
    if abs(normal[0]) <= SPAN_RANK_TOL * float(np.max(np.abs(normal))):
        return None
    radius = max(point.radius for point in points)
    return DualPoint(float(normal[1] / normal[0]), float(normal[2] / normal[0]), False, radius, "span")


def _common_points(polys: list[sympy.Poly], source: str) -> list[DualPoint]:
    return [
        DualPoint(point.u, point.v, True, 0.0, source)
        if point.exact
        else DualPoint(float(point.u), float(point.v), False, point.radius, source)
        for point in real_common_zeros(polys)
    ]


def _dedupe(points: list[DualPoint]) -> list[DualPoint]:
    ordered = sorted(points, key=lambda point: (not point.exact, point.floats()))
    kept: list[DualPoint] = []
    for point in ordered:
        a, b = point.floats()
        if any(math.hypot(a - other.floats()[0], b - other.floats()[1]) <= DEDUPE_TOL * (1 + abs(a) + abs(b)) for other in kept):
            continue
        kept.append(point)
    return sorted(kept, key=lambda point: point.floats())


def tritangent_search(
    data: KippenhahnData,
    boundary: BoundaryPoly | None = None,
    *,
    max_dual_degree: int = DEFAULT_MAX_DUAL_DEGREE,
    workers: int = 1,
) -> tuple[list[DualPoint], list[str]]:
    """Tritangent and linear-factor candidates plus notes on skipped searches."""
    candidates = [
        DualPoint(*form.point, form.exact, form.radius, "linear-factor")
        if form.exact
        else DualPoint(*(float(value) for value in form.point), False, form.radius, "linear-factor")
        for form, _ in linear_factors(data.f)
        if form.point is not None
    ]
    skipped: list[str] = []
    if data.fred.degree < TRITANGENT_DEGREE:
        return _dedupe(candidates), skipped

    boundary = boundary or boundary_poly(data, workers=workers)
    components = list(boundary.components)
    jobs: list[tuple[list[sympy.Poly], str]] = [
        ([left.poly, right.poly], "intersection") for left, right in itertools.combinations(components, 2)
    ]
    for component in components:
        if component.degree < 2:
            continue
        if component.kind == DUAL and component.primal_degree < TRITANGENT_DEGREE:
            continue
        if component.kind == DUAL and component.degree > max_dual_degree:
            note = f"skipped singular points of a degree {component.degree} dual component"
            logger.warning("tritangent_search %s (max_dual_degree=%d)", note, max_dual_degree)
            skipped.append(note)
            continue
        poly = component.poly
        jobs.append(([poly, poly.diff(A_SYM), poly.diff(B_SYM)], "component-singularity"))

    found = parallel_map(lambda job: _common_points(*job), jobs, workers)
    candidates.extend(itertools.chain.from_iterable(found))
    return _dedupe(candidates), skipped


def tritangent_candidates(data: KippenhahnData, boundary: BoundaryPoly | None = None, **options: Any) -> list[DualPoint]:
    """A finite superset of the lines that are tritangent to V(f_A) or divide f_A."""
    candidates, _ = tritangent_search(data, boundary, **options)
    return candidates


def duality_residuals(data: KippenhahnData, g: sympy.Poly | BoundaryPoly, m: int = 64) -> list[float]:
    """Relative residuals of g at the tangent lines of sampled smooth points of V(f_A).

    Sampled points are (lambda_j(theta), -cos(theta), -sin(theta)) for every j.
    """
    poly = g.g if isinstance(g, BoundaryPoly) else g
    gradient = [data.fred.diff(gen).poly for gen in GENS]
    residuals: list[float] = []
    for index in range(m):
        theta = 2 * math.pi * (index + 0.5) / m
        x, y = -math.cos(theta), -math.sin(theta)
        for value in eigenvalues(data.pair, -x, -y):
            point = (float(value), x, y)
            dt, dx, dy = (float_eval(component, point) for component in gradient)
            norm = math.sqrt(dt * dt + dx * dx + dy * dy)
            if norm <= SMOOTH_GRADIENT_TOL or abs(dt) <= SMOOTH_GRADIENT_TOL * norm:
                continue
            residuals.append(relative_residual(poly, dx / dt, dy / dt))
    return residuals


__all__ = [
    "DUAL",
    "SINGULAR_LINE",
    "BoundaryComponent",
    "BoundaryPoly",
    "DualPoint",
    "TangentSet",
    "AntipodalSpan",
    "relative_residual",
    "boundary_poly",
    "singularity_tangents",
    "is_p_tangent",
    "antipodal_span",
    "tritangent_search",
    "tritangent_candidates",
    "duality_residuals",
]
