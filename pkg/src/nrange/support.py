"""Outer approximation of Lambda_k(A) by sampled supporting halfplanes.

Lambda_k(A) is the intersection over theta of the halfplanes
a*cos(theta) + b*sin(theta) <= lambda_k(cos(theta)*Re(A) + sin(theta)*Im(A)).
Intersecting m of them gives a convex polygon that contains Lambda_k(A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import MIN_SAMPLES
from .errors import ParameterError
from .kippenhahn import KippenhahnData
from .pencil import ComplexMatrix, HermitianPair, _check_k, hermitian_parts, lambda_k, spectral_radius
from .utils import parallel_map

ORACLE_EPS = 1e-5
BOX_FACTOR = 4.0
DEFAULT_SLACK = 1e-12


@dataclass(frozen=True)
class SupportPolygon:
    """Convex polygon with counterclockwise vertices; no vertices means empty."""

    vertices: tuple[tuple[float, float], ...]
    thetas: tuple[float, ...]

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        points = np.asarray(self.vertices)
        x, y = points[:, 0], points[:, 1]
        return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2)

    @property
    def diameter(self) -> float:
        if len(self.vertices) < 2:
            return 0.0
        points = np.asarray(self.vertices)
        gaps = points[:, None, :] - points[None, :, :]
        return float(np.max(np.hypot(gaps[..., 0], gaps[..., 1])))

    @property
    def centroid(self) -> tuple[float, float] | None:
        if self.is_empty:
            return None
        center = np.asarray(self.vertices).mean(axis=0)
        return (float(center[0]), float(center[1]))

    def bounds(self) -> tuple[float, float, float, float] | None:
        """(a_min, b_min, a_max, b_max)."""
        if self.is_empty:
            return None
        points = np.asarray(self.vertices)
        low, high = points.min(axis=0), points.max(axis=0)
        return (float(low[0]), float(low[1]), float(high[0]), float(high[1]))


def _as_pair(source: ComplexMatrix | HermitianPair | KippenhahnData) -> HermitianPair:
    if isinstance(source, HermitianPair):
        return source
    if isinstance(source, KippenhahnData):
        return source.pair
    return hermitian_parts(source)


def _thetas(m: int) -> list[float]:
    return [2 * math.pi * index / m for index in range(m)]


def _clip(vertices: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """Sutherland-Hodgman step against normal . v <= offset."""
    distances = vertices @ normal - offset
    inside = distances <= 0
    if inside.all():
        return vertices
    if not inside.any():
        return vertices[:0]
    kept: list[np.ndarray] = []
    count = len(vertices)
    for index in range(count):
        following = (index + 1) % count
        current, upcoming = vertices[index], vertices[following]
        if inside[index]:
            kept.append(current)
        if inside[index] != inside[following]:
            weight = distances[index] / (distances[index] - distances[following])
            kept.append(current + weight * (upcoming - current))
    return np.array(kept).reshape(-1, 2)


def _dedupe_vertices(vertices: np.ndarray, tolerance: float) -> tuple[tuple[float, float], ...]:
    points: list[tuple[float, float]] = []
    for a, b in vertices:
        if points and math.hypot(a - points[-1][0], b - points[-1][1]) <= tolerance:
            continue
        points.append((float(a), float(b)))
    if len(points) > 1 and math.hypot(points[0][0] - points[-1][0], points[0][1] - points[-1][1]) <= tolerance:
        points.pop()
    return tuple(points)


def halfplane_polygon(
    source: ComplexMatrix | HermitianPair | KippenhahnData,
    k: int,
    m: int,
    *,
    slack: float | None = None,
    workers: int = 1,
) -> SupportPolygon:
    """Intersect m equally spaced supporting halfplanes, each pushed out by ``slack``.

    The default slack is DEFAULT_SLACK relative to the largest level, so a range
    that is a single point gives a tiny polygon rather than an empty one.
    """
    if m < MIN_SAMPLES:
        raise ParameterError(f"sample count must be at least {MIN_SAMPLES}, got {m}")
    pair = _as_pair(source)
    _check_k(k, pair.n)
    thetas = _thetas(m)
    levels = parallel_map(lambda theta: lambda_k(pair, k, math.cos(theta), math.sin(theta)), thetas, workers)
    scale = 1 + max(abs(level) for level in levels)
    if slack is None:
        slack = DEFAULT_SLACK * scale
    box = BOX_FACTOR * scale + abs(slack)
    vertices = np.array([[-box, -box], [box, -box], [box, box], [-box, box]], dtype=float)
    for theta, level in zip(thetas, levels):
        vertices = _clip(vertices, np.array([math.cos(theta), math.sin(theta)]), level + slack)
        if len(vertices) == 0:
            break
    return SupportPolygon(_dedupe_vertices(vertices, 1e-15 * box), tuple(thetas))


def support_boundary_points(
    source: ComplexMatrix | HermitianPair | KippenhahnData, k: int, m: int
) -> list[tuple[float, float]]:
    """Intersections of consecutive supporting lines a*cos + b*sin = lambda_k."""
    if m < MIN_SAMPLES:
        raise ParameterError(f"sample count must be at least {MIN_SAMPLES}, got {m}")
    pair = _as_pair(source)
    _check_k(k, pair.n)
    thetas = _thetas(m)
    levels = [lambda_k(pair, k, math.cos(theta), math.sin(theta)) for theta in thetas]
    points: list[tuple[float, float]] = []
    for index, theta in enumerate(thetas):
        following = (index + 1) % m
        system = np.array(
            [[math.cos(theta), math.sin(theta)], [math.cos(thetas[following]), math.sin(thetas[following])]]
        )
        a, b = np.linalg.solve(system, np.array([levels[index], levels[following]]))
        points.append((float(a), float(b)))
    return points


def oracle_eps(source: ComplexMatrix | HermitianPair | KippenhahnData) -> float:
    return ORACLE_EPS * max(1.0, spectral_radius(_as_pair(source)))


def classify_polygon(polygon: SupportPolygon, eps: float) -> int:
    """-1 empty, 0 diameter <= eps, 1 area <= eps, otherwise 2."""
    if polygon.is_empty:
        return -1
    if polygon.diameter <= eps:
        return 0
    if polygon.area <= eps:
        return 1
    return 2


__all__ = [
    "SupportPolygon",
    "halfplane_polygon",
    "support_boundary_points",
    "oracle_eps",
    "classify_polygon",
]
