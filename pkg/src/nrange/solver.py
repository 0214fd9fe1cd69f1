"""Dimension and witnesses of the rank-k numerical range."""

from __future__ import annotations

import functools
import itertools
import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import sympy
from sympy import QQ

from .boundary import (
    BoundaryPoly,
    DualPoint,
    antipodal_span,
    boundary_poly,
    singularity_tangents,
    tritangent_search,
)
from .config import DEFAULT_PRECISION, SolverConfig, load_config
from .errors import DomainError, InconsistencyError, KIndexError
from .kippenhahn import KippenhahnData, kippenhahn_poly, power_of_linear_form
from .membership import MembershipVerdict, membership_test
from .pencil import ComplexMatrix, _check_k, spectral_radius
from .polynomials import A_SYM, B_SYM, discriminant, isolate_real_roots, linear_factors, resultant
from .support import SupportPolygon, classify_polygon, halfplane_polygon
from .utils import parallel_map, to_rational

logger = logging.getLogger("nrange.solver")

OUTER_SLACK = 1e-9
COLLAPSE_TOL = 1e-3
REFINE_FACTOR = 4
WINDOW_MARGIN = 1e-6
DISTINCT_TOL = 1e-7
COLLINEAR_TOL = 1e-6


@dataclass(frozen=True)
class RangeResult:
    """Lambda_k(A) as a dimension plus the witnesses that prove it.

    dim is -1 (empty), 0 (``point``), 1 (``endpoints``) or 2 (``boundary`` and
    interior ``representatives``, one or more per component of Lambda_k minus V(g_A)).
    """

    dim: int
    k: int
    n: int
    point: DualPoint | None = None
    endpoints: tuple[DualPoint, DualPoint] | None = None
    boundary: BoundaryPoly | None = None
    representatives: tuple[DualPoint, ...] = ()
    diagnostics: tuple[str, ...] = ()
    ambiguous: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        has_point = self.point is not None
        has_segment = self.endpoints is not None
        has_region = self.boundary is not None and bool(self.representatives)
        expected = {-1: (False, False, False), 0: (True, False, False), 1: (False, True, False), 2: (False, False, True)}
        if self.dim not in expected:
            raise InconsistencyError(f"dimension must be -1, 0, 1 or 2, got {self.dim}")
        if (has_point, has_segment, has_region) != expected[self.dim]:
            raise InconsistencyError(f"witness fields do not match dim={self.dim}")
        if has_segment and _same_point(*self.endpoints):
            raise InconsistencyError("segment endpoints coincide")

    def witnesses(self) -> list[DualPoint]:
        if self.point is not None:
            return [self.point]
        if self.endpoints is not None:
            return list(self.endpoints)
        return list(self.representatives)


class _Trace:
    def __init__(self, operation: str) -> None:
        self.operation = operation
        self.entries: list[str] = []
        self.ambiguous: list[str] = []

    def note(self, message: str, *args: Any) -> None:
        text = message % args if args else message
        self.entries.append(text)
        logger.debug("%s: %s", self.operation, text)

    def flag(self, verdict: MembershipVerdict) -> None:
        text = f"ambiguous margin {verdict.margin:.3e} at ({verdict.point[0]}, {verdict.point[1]})"
        self.ambiguous.append(text)
        logger.warning("%s: %s", self.operation, text)

    def result(self, dim: int, k: int, n: int, **witnesses: Any) -> RangeResult:
        return RangeResult(dim, k, n, diagnostics=tuple(self.entries), ambiguous=tuple(self.ambiguous), **witnesses)


def _as_data(source: ComplexMatrix | KippenhahnData) -> KippenhahnData:
    return source if isinstance(source, KippenhahnData) else kippenhahn_poly(source)


def _same_point(left: DualPoint, right: DualPoint) -> bool:
    (a1, b1), (a2, b2) = left.floats(), right.floats()
    return math.hypot(a1 - a2, b1 - b2) <= DISTINCT_TOL * (1 + abs(a1) + abs(b1))


def _distinct(points: Sequence[DualPoint]) -> list[DualPoint]:
    kept: list[DualPoint] = []
    for point in points:
        if not any(_same_point(point, other) for other in kept):
            kept.append(point)
    return kept


def nonempty_guaranteed(n: int, k: int) -> bool:
    """Lambda_k(A) is non-empty for every n x n matrix once n >= 3k - 2."""
    return n >= 3 * k - 2


def _empty(trace: _Trace, k: int, n: int, reason: str) -> RangeResult:
    if nonempty_guaranteed(n, k):
        raise InconsistencyError(f"{reason}, but Lambda_{k} is non-empty for n={n} >= 3k-2")
    trace.note("empty: %s", reason)
    return trace.result(-1, k, n)


def _passing(
    data: KippenhahnData, k: int, candidates: Sequence[DualPoint], config: SolverConfig, trace: _Trace
) -> list[tuple[DualPoint, MembershipVerdict]]:
    def check(candidate: DualPoint) -> MembershipVerdict:
        return membership_test(
            data, k, *candidate.query(), config.tol, precision=config.precision, divtol=config.divtol
        )

    verdicts = parallel_map(check, list(candidates), config.workers)
    passing = []
    for candidate, verdict in zip(candidates, verdicts):
        if verdict.ambiguous:
            trace.flag(verdict)
        if verdict.member:
            passing.append((candidate, verdict))
    trace.note("%d of %d candidate(s) pass membership", len(passing), len(candidates))
    return passing


def _singleton(data: KippenhahnData, k: int, trace: _Trace) -> RangeResult | None:
    singleton = power_of_linear_form(data)
    if singleton is None:
        return None
    trace.note("f_A is a power of a linear form")
    return trace.result(0, k, data.n, point=DualPoint(*singleton, True, 0.0, "linear-form"))


def _outer_polygon(data: KippenhahnData, k: int, config: SolverConfig, trace: _Trace) -> SupportPolygon:
    slack = OUTER_SLACK * (1 + spectral_radius(data.pair))
    polygon = halfplane_polygon(data, k, config.samples, slack=slack, workers=config.workers)
    trace.note("outer polygon with %d vertices from %d halfplanes", len(polygon.vertices), config.samples)
    return polygon


def compute_range(
    source: ComplexMatrix | KippenhahnData, k: int, config: SolverConfig | None = None
) -> RangeResult:
    """Lambda_k(A) for 1 <= k < (n+1)/2.

    The real singular points of V(f_A) where -p0 = lambda_k(p1, p2) =
    lambda_{n-k+1}(p1, p2) span a projective subspace V whose dimension
    selects the branch: a plane means empty, a line pins the single candidate
    point, a point restricts Lambda_k to the segment cut by the lines
    p-tangent there, and no point at all leaves a full-dimensional region or a
    tritangent point.
    """
    config = config or load_config()
    data = _as_data(source)
    n = data.n
    _check_k(k, n)
    if not 2 * k < n + 1:
        raise KIndexError(f"compute_range needs k < (n+1)/2, got k={k}, n={n}")
    started = time.perf_counter()
    logger.info("compute_range started n=%d k=%d", n, k)
    trace = _Trace("compute_range")
    result = _singleton(data, k, trace) or _compute_range(data, k, config, trace)
    logger.info(
        "compute_range completed n=%d k=%d dim=%d in %.3fs", n, k, result.dim, time.perf_counter() - started
    )
    return result


def _compute_range(data: KippenhahnData, k: int, config: SolverConfig, trace: _Trace) -> RangeResult:
    n = data.n
    polygon = None
    if config.outer_check:
        polygon = _outer_polygon(data, k, config, trace)
        if polygon.is_empty:
            return _empty(trace, k, n, "outer support polygon is empty")

    span = antipodal_span(data, k, workers=config.workers)
    trace.note("antipodal singular points: %d, dim V = %d", len(span.points), span.dim)

    if span.dim == 2:
        return _empty(trace, k, n, "antipodal points span the plane")

    if span.dim == 1:
        if span.vperp is None:
            return _empty(trace, k, n, "span line has no affine dual point")
        if _passing(data, k, [span.vperp], config, trace):
            return trace.result(0, k, n, point=span.vperp)
        return _empty(trace, k, n, "dual point of the span line fails membership")

    if span.dim == 0:
        return _segment_branch(data, k, span.points[0], config, trace)

    return _region_branch(data, k, polygon, config, trace)


def _segment_branch(data: KippenhahnData, k: int, p: Any, config: SolverConfig, trace: _Trace) -> RangeResult:
    n = data.n
    tangents = singularity_tangents(data, p, precision=config.precision)
    trace.note("%d line(s) p-tangent at %s", len(tangents.points), p)
    passing = _distinct([candidate for candidate, _ in _passing(data, k, tangents.points, config, trace)])
    if not passing:
        return _empty(trace, k, n, "no p-tangent line passes membership")

    p0, p1, p2 = p.floats()
    for candidate in passing:
        a, b = candidate.floats()
        if abs(p0 + a * p1 + b * p2) > COLLINEAR_TOL * (1 + abs(a) + abs(b)):
            raise InconsistencyError(f"tangent point ({a}, {b}) is off the line through {p}")
    if len(passing) == 1:
        return trace.result(0, k, n, point=passing[0])

    def along(candidate: DualPoint) -> float:
        a, b = candidate.floats()
        return -p2 * a + p1 * b

    low = min(passing, key=along)
    high = max(passing, key=along)
    if _same_point(low, high):
        return trace.result(0, k, n, point=low)
    trace.note("segment along the line through %s", p)
    return trace.result(1, k, n, endpoints=(low, high))


def _window(polygon: SupportPolygon | None) -> tuple[tuple[Any, Any], tuple[Any, Any]] | None:
    if polygon is None or polygon.is_empty:
        return None
    a_min, b_min, a_max, b_max = polygon.bounds()
    pad = WINDOW_MARGIN * (1 + max(abs(a_min), abs(a_max), abs(b_min), abs(b_max)))
    return (
        (to_rational(a_min - pad), to_rational(a_max + pad)),
        (to_rational(b_min - pad), to_rational(b_max + pad)),
    )


def _collapsed(data: KippenhahnData, k: int, config: SolverConfig, trace: _Trace) -> bool:
    """The outer polygon with REFINE_FACTOR times more halfplanes has diameter at most COLLAPSE_TOL."""
    scale = 1 + spectral_radius(data.pair)
    samples = REFINE_FACTOR * config.samples
    refined = halfplane_polygon(data, k, samples, slack=OUTER_SLACK * scale, workers=config.workers)
    trace.note("refined polygon from %d halfplanes has diameter %.3e", samples, refined.diameter)
    return classify_polygon(refined, COLLAPSE_TOL * scale) <= 0


def _region_branch(
    data: KippenhahnData, k: int, polygon: SupportPolygon | None, config: SolverConfig, trace: _Trace
) -> RangeResult:
    n = data.n
    boundary = boundary_poly(data, workers=config.workers)
    trace.note("g_A of degree %d with %d component(s)", boundary.degree, len(boundary.components))
    window = _window(polygon)
    reps = bounded_component_reps(boundary, window=window, precision=config.precision, workers=config.workers)
    trace.note("%d cell representative(s)", len(reps))
    candidates = [DualPoint(a, b, True, 0.0, "cell") for a, b in reps]
    passing = _passing(data, k, candidates, config, trace)
    if any(verdict.margin > config.tol for _, verdict in passing):
        return trace.result(2, k, n, boundary=boundary, representatives=tuple(point for point, _ in passing))
    if passing:
        trace.note("%d cell representative(s) pass only within the tolerance", len(passing))

    candidates, skipped = tritangent_search(
        data, boundary, max_dual_degree=config.max_dual_degree, workers=config.workers
    )
    for note in skipped:
        trace.note(note)
    trace.note("%d tritangent or linear-factor candidate(s)", len(candidates))
    passing_points = _distinct([candidate for candidate, _ in _passing(data, k, candidates, config, trace)])
    if len(passing_points) > 1:
        raise InconsistencyError(f"{len(passing_points)} distinct points pass where at most one may")
    if passing_points:
        return trace.result(0, k, n, point=passing_points[0])
    if passing:
        if _collapsed(data, k, config, trace):
            best, _ = max(passing, key=lambda item: item[1].margin)
            return trace.result(0, k, n, point=best)
        for _, verdict in passing:
            if not verdict.ambiguous:
                trace.flag(verdict)
        return trace.result(2, k, n, boundary=boundary, representatives=tuple(point for point, _ in passing))
    return _empty(trace, k, n, "no cell or tritangent candidate passes membership")


def compute_range_high_k(
    source: ComplexMatrix | KippenhahnData, k: int, config: SolverConfig | None = None
) -> RangeResult:
    """Lambda_k(A) for (n+1)/2 <= k <= n: at most a point, on a linear factor of multiplicity >= 2k - n."""
    config = config or load_config()
    data = _as_data(source)
    n = data.n
    _check_k(k, n)
    if 2 * k < n + 1:
        raise KIndexError(f"compute_range_high_k needs k >= (n+1)/2, got k={k}, n={n}")
    logger.info("compute_range_high_k started n=%d k=%d", n, k)
    trace = _Trace("compute_range_high_k")
    result = _singleton(data, k, trace)
    if result is None:
        candidates = [
            DualPoint(*form.point, True, 0.0, "linear-factor")
            if form.exact
            else DualPoint(*(float(value) for value in form.point), False, form.radius, "linear-factor")
            for form, multiplicity in linear_factors(data.f)
            if multiplicity >= 2 * k - n and form.point is not None
        ]
        trace.note("%d linear factor(s) of multiplicity >= %d", len(candidates), 2 * k - n)
        passing = _distinct([candidate for candidate, _ in _passing(data, k, candidates, config, trace)])
        if len(passing) > 1:
            raise InconsistencyError(f"{len(passing)} linear factors pass where at most one may")
        if passing:
            result = trace.result(0, k, n, point=passing[0])
        else:
            result = _empty(trace, k, n, "no linear factor passes membership")
    logger.info("compute_range_high_k completed n=%d k=%d dim=%d", n, k, result.dim)
    return result


def solve_range(source: ComplexMatrix | KippenhahnData, k: int, config: SolverConfig | None = None) -> RangeResult:
    data = _as_data(source)
    _check_k(k, data.n)
    if 2 * k < data.n + 1:
        return compute_range(data, k, config)
    return compute_range_high_k(data, k, config)


def _as_ab(poly: sympy.Poly | sympy.Expr) -> sympy.Poly:
    expr = poly.as_expr() if isinstance(poly, sympy.Poly) else poly
    return sympy.Poly(expr, A_SYM, B_SYM, domain=QQ)


def _in_b(poly: sympy.Poly) -> sympy.Poly:
    return sympy.Poly(poly.as_expr(), B_SYM, domain=QQ)


@functools.lru_cache(maxsize=64)
def _critical_poly(factors: tuple[sympy.Poly, ...]) -> sympy.Poly:
    """Product of the b-values where the a-roots of g can merge or escape."""
    pieces: list[sympy.Poly] = []
    for factor in factors:
        degree_a = factor.degree(A_SYM)
        if degree_a == 0:
            pieces.append(_in_b(factor))
            continue
        pieces.append(sympy.Poly(_leading_in_a(factor), B_SYM, domain=QQ))
        if degree_a >= 2:
            pieces.append(_in_b(discriminant(factor, A_SYM)))
    for left, right in itertools.combinations(factors, 2):
        if left.degree(A_SYM) >= 1 and right.degree(A_SYM) >= 1:
            pieces.append(_in_b(resultant(left, right, A_SYM)))
    product = sympy.Poly(1, B_SYM, domain=QQ)
    for piece in pieces:
        if not piece.is_zero and piece.degree() > 0:
            product *= piece
    return product.sqf_part() if product.degree() > 0 else product


def _leading_in_a(factor: sympy.Poly) -> sympy.Expr:
    return sympy.Poly(factor.as_expr(), A_SYM).LC()


def bounded_component_reps(
    g: sympy.Poly | BoundaryPoly,
    *,
    window: tuple[tuple[Any, Any], tuple[Any, Any]] | None = None,
    precision: Any = DEFAULT_PRECISION,
    workers: int = 1,
) -> list[tuple[sympy.Rational, sympy.Rational]]:
    """Sample points with at least one in every bounded component of R^2 minus V(g).

    Between consecutive critical values of the projection to b a line b = b'
    is cut by V(g) into intervals; their midpoints are the samples. ``window``
    ((a_lo, a_hi), (b_lo, b_hi)) restricts the search to components inside it.
    """
    if isinstance(g, BoundaryPoly):
        factors = tuple(_as_ab(factor) for factor in g.factors())
        poly = _as_ab(g.g)
    else:
        poly = _as_ab(g)
        _, listed = poly.factor_list()
        factors = tuple(_as_ab(factor) for factor, _ in listed)
    if poly.total_degree() < 1:
        raise DomainError("bounded components of a constant polynomial")

    sheared = poly.degree(A_SYM) == 0
    if sheared:
        shear = {B_SYM: B_SYM + A_SYM}
        poly = _as_ab(poly.as_expr().subs(shear, simultaneous=True).expand())
        factors = tuple(_as_ab(factor.as_expr().subs(shear, simultaneous=True).expand()) for factor in factors)
        window = None

    a_range, b_range = window if window is not None else ((None, None), (None, None))
    critical = _critical_poly(tuple(sorted(factors, key=lambda factor: str(factor.as_expr()))))
    levels = isolate_real_roots(critical, precision, inf=b_range[0], sup=b_range[1]) if critical.degree() > 0 else None
    intervals = list(levels.intervals) if levels is not None else []
    if len(intervals) < 2:
        logger.debug("bounded_component_reps: %d critical value(s), no bounded cells", len(intervals))
        return []
    samples = [(upper + following[0]) / 2 for (_, upper), following in zip(intervals, intervals[1:])]

    def cut(b_value: sympy.Rational) -> list[tuple[sympy.Rational, sympy.Rational]]:
        line = sympy.Poly(poly.as_expr().subs(B_SYM, b_value), A_SYM, domain=QQ)
        if line.degree() < 2:
            return []
        roots = isolate_real_roots(line, precision, inf=a_range[0], sup=a_range[1]).intervals
        return [((upper + following[0]) / 2, b_value) for (_, upper), following in zip(roots, roots[1:])]

    reps = list(itertools.chain.from_iterable(parallel_map(cut, samples, workers)))
    if sheared:
        reps = [(a, b + a) for a, b in reps]
    logger.debug("bounded_component_reps: %d level(s), %d representative(s)", len(samples), len(reps))
    return reps


__all__ = [
    "RangeResult",
    "nonempty_guaranteed",
    "compute_range",
    "compute_range_high_k",
    "solve_range",
    "bounded_component_reps",
]
