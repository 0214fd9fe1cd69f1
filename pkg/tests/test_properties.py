import functools
import math

import numpy as np
import pytest
import sympy
from scipy import ndimage

from conftest import random_corpus
from nrange.boundary import relative_residual
from nrange.config import SolverConfig
from nrange.kippenhahn import AffineMap, apply_affine, kippenhahn_poly, multiplicity_at, real_singular_points
from nrange.membership import membership_test
from nrange.pencil import ComplexMatrix, antipodal_gap, spectral_radius
from nrange.polynomials import A_SYM, B_SYM, T, X, Y, vanishing_order
from nrange.solver import bounded_component_reps, solve_range
from nrange.support import classify_polygon, halfplane_polygon, oracle_eps, support_boundary_points

pytestmark = pytest.mark.slow

CONFIG = SolverConfig(threads=1)
CORPUS = random_corpus()
INDICES = range(len(CORPUS))
ORACLE_SAMPLES = 1440
GAP_ANGLES = 720
LINE = sympy.Symbol("r")


@functools.lru_cache(maxsize=None)
def _data(index: int):
    return kippenhahn_poly(CORPUS[index])


@functools.lru_cache(maxsize=None)
def _solved(index: int, k: int):
    return solve_range(_data(index), k, CONFIG)


def _ranks(index: int) -> range:
    return range(1, CORPUS[index].n + 1)


def _member(data, k: int, a, b) -> bool:
    return membership_test(data, k, a, b, CONFIG.tol).member


def test_corpus_covers_sizes_two_to_seven() -> None:
    assert len(CORPUS) >= 50
    assert {matrix.n for matrix in CORPUS} == {2, 3, 4, 5, 6, 7}


@pytest.mark.parametrize("index", INDICES)
def test_dimension_matches_the_halfplane_oracle(index: int) -> None:
    data = _data(index)
    eps = oracle_eps(data)
    for k in _ranks(index):
        result = _solved(index, k)
        if result.ambiguous:
            continue
        expected = classify_polygon(halfplane_polygon(data, k, ORACLE_SAMPLES), eps)
        assert result.dim == expected, f"k={k}"


def test_ambiguous_results_are_rare() -> None:
    results = [_solved(index, k) for index in INDICES for k in _ranks(index)]
    flagged = sum(1 for result in results if result.ambiguous)
    assert flagged < 0.05 * len(results)


@pytest.mark.parametrize("index", INDICES)
def test_antipodal_gap_sign_follows_k(index: int) -> None:
    data = _data(index)
    n = data.n
    bound = 1e-9 * (1 + spectral_radius(data.pair))
    thetas = [2 * math.pi * step / GAP_ANGLES for step in range(GAP_ANGLES)]
    for k in _ranks(index):
        gaps = [antipodal_gap(data.pair, k, theta) for theta in thetas]
        if 2 * k <= n + 1:
            assert min(gaps) >= -bound, f"k={k}"
        if 2 * k >= n + 1:
            assert max(gaps) <= bound, f"k={k}"


@pytest.mark.parametrize("index", INDICES)
def test_multiplicity_is_the_vanishing_order_on_lines(index: int) -> None:
    data = _data(index)
    if data.fred.degree < 2:
        pytest.skip("no singular points on a line")
    rng = np.random.default_rng(index)
    for point in real_singular_points(data):
        if not point.exact:
            continue
        multiplicity = multiplicity_at(data, point)
        p0, p1, p2 = point.coords
        for _ in range(5):
            q0, q1, q2 = (sympy.Rational(int(value)) for value in rng.integers(-(10**6), 10**6, size=3))
            line = {T: p0 + LINE * q0, X: p1 + LINE * q1, Y: p2 + LINE * q2}
            moved = data.f.as_expr().subs(line, simultaneous=True)
            coefficients = sympy.Poly(sympy.expand(moved), LINE).all_coeffs()[::-1]
            assert vanishing_order(coefficients) == multiplicity, str(point)


@pytest.mark.parametrize("index", INDICES)
def test_boundary_polynomial_vanishes_on_support_points(index: int) -> None:
    data = _data(index)
    regions = [_solved(index, k) for k in _ranks(index) if _solved(index, k).dim == 2]
    if not regions:
        pytest.skip("no two-dimensional range")
    for result in regions:
        points = support_boundary_points(data, result.k, 36000)
        g = result.boundary.g
        residuals = [
            min(relative_residual(g, *points[start]), relative_residual(g, *points[start + 1]))
            for start in range(0, len(points), 360)
        ]
        assert len(residuals) == 100
        assert max(residuals) <= 1e-6, f"k={result.k}"


def _random_affine_maps(count: int) -> list[AffineMap]:
    rng = np.random.default_rng(11)
    maps = []
    while len(maps) < count:
        u01, u02, u11, u12, u21, u22 = (int(value) for value in rng.integers(-2, 3, size=6))
        if u11 * u22 - u21 * u12 != 0:
            maps.append(AffineMap(u01, u02, u11, u12, u21, u22))
    return maps


EQUIVARIANCE_CASES = list(zip((0, 3, 6, 9, 20, 24, 30, 32, 40, 44), _random_affine_maps(10)))


def _close(left: tuple[float, float], right: tuple[float, float]) -> bool:
    return math.hypot(left[0] - right[0], left[1] - right[1]) <= 1e-8 * (1 + abs(left[0]) + abs(left[1]))


@pytest.mark.parametrize(("index", "transform"), EQUIVARIANCE_CASES)
def test_ranges_move_with_affine_maps(index: int, transform: AffineMap) -> None:
    image = kippenhahn_poly(apply_affine(CORPUS[index], transform))
    for k in _ranks(index):
        original = _solved(index, k)
        moved = solve_range(image, k, CONFIG)
        assert moved.dim == original.dim, f"k={k}"
        if original.dim in (0, 1):
            targets = [point.floats() for point in moved.witnesses()]
            for point in original.witnesses():
                image_point = tuple(float(value) for value in transform.apply(*point.floats()))
                assert any(_close(image_point, target) for target in targets), f"k={k}"
        elif original.dim == 2:
            for point in original.representatives:
                assert _member(image, k, *transform.apply(*point.query())), f"k={k}"


@pytest.mark.parametrize("index", INDICES)
def test_ranges_are_nested_and_convex(index: int) -> None:
    data = _data(index)
    for k in range(1, data.n):
        inner = _solved(index, k + 1)
        for point in inner.witnesses():
            assert _member(data, k, *point.query()), f"k={k}"
    for k in _ranks(index):
        witnesses = _solved(index, k).witnesses()
        for left, right in zip(witnesses, witnesses[1:]):
            (a1, b1), (a2, b2) = left.floats(), right.floats()
            assert _member(data, k, (a1 + a2) / 2, (b1 + b2) / 2), f"k={k}"


SEGMENT_CASES = [
    (ComplexMatrix.diagonal([1, -1]), 1),
    (ComplexMatrix.diagonal([0, 1, 2, 3]), 1),
    (ComplexMatrix.diagonal([0, 1, 2, 3, 4]), 2),
    (ComplexMatrix.diagonal([sympy.I, 1 + 2 * sympy.I, 2 + 3 * sympy.I, 0, 3 + 4 * sympy.I]), 2),
]


def _segments() -> list[tuple[object, object]]:
    found = [(kippenhahn_poly(matrix), solve_range(matrix, k, CONFIG)) for matrix, k in SEGMENT_CASES]
    found.extend((_data(index), _solved(index, k)) for index in INDICES for k in _ranks(index))
    return [(data, result) for data, result in found if result.dim == 1]


def test_segment_endpoints_are_extremal() -> None:
    segments = _segments()
    assert len(segments) >= len(SEGMENT_CASES)
    for data, result in segments:
        (a1, b1), (a2, b2) = (point.floats() for point in result.endpoints)
        length = math.hypot(a2 - a1, b2 - b1)
        step = 1e-4
        for (x0, y0), (x1, y1) in (((a1, b1), (a2, b2)), ((a2, b2), (a1, b1))):
            beyond = (x0 + step * (x0 - x1), y0 + step * (y0 - y1))
            assert not _member(data, result.k, *beyond), f"k={result.k} length={length}"


def _cell_labels(g: sympy.Poly, half_width: float, grid: int) -> tuple[np.ndarray, set[int]]:
    """Label grid cells by connected runs of one sign pattern over the factors of g."""
    step = 2 * half_width / grid
    centers = -half_width + step * (np.arange(grid) + 0.5)
    a_grid, b_grid = np.meshgrid(centers, centers, indexing="ij")
    codes = np.zeros(a_grid.shape, dtype=np.int64)
    on_curve = np.zeros(a_grid.shape, dtype=bool)
    for position, (factor, _) in enumerate(g.factor_list()[1]):
        evaluate = sympy.lambdify((A_SYM, B_SYM), factor.as_expr(), "numpy")
        values = np.broadcast_to(evaluate(a_grid, b_grid), a_grid.shape)
        codes |= (values > 0).astype(np.int64) << position
        on_curve |= values == 0
    labels = np.zeros(a_grid.shape, dtype=np.int64)
    offset = 0
    for code in np.unique(codes[~on_curve]):
        pieces, count = ndimage.label((codes == code) & ~on_curve)
        labels = np.where(pieces > 0, pieces + offset, labels)
        offset += count
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])).tolist())
    bounded = set(np.unique(labels).tolist()) - border - {0}
    return labels, bounded


a, b = A_SYM, B_SYM
CELL_CASES = [
    (a**2 + b**2 - 1, 1),
    ((a**2 + b**2 - 1) * ((a - 3) ** 2 + b**2 - 1), 2),
    ((a**2 + b**2 - 1) * ((a - 1) ** 2 + b**2 - 1), 3),
    ((a**2 + b**2 - 1) * a, 2),
    ((a**2 + b**2 - 1) * a * b, 4),
    ((a**2 + b**2 - 1) * (a**2 + b**2 - 4), 2),
    (a * b * (a + b - 2), 1),
    (a * (a - 1) * (a - 2) * b * (b - 2), 2),
    ((a + 1) * (b + 1) * (a + b - 1) * (4 * a**2 + 4 * b**2 - 1), 2),
    ((a**2 + 4 * b**2 - 4) * (4 * a**2 + 4 * b**2 - 9), 5),
]


@pytest.mark.parametrize(("expr", "cells"), CELL_CASES)
def test_bounded_component_reps_meet_every_bounded_cell(expr: sympy.Expr, cells: int) -> None:
    g = sympy.Poly(expr, A_SYM, B_SYM, domain=sympy.QQ)
    half_width, grid = 4.0, 400
    labels, bounded = _cell_labels(g, half_width, grid)
    assert len(bounded) == cells
    reps = bounded_component_reps(g)
    assert all(g(a_value, b_value) != 0 for a_value, b_value in reps)
    step = 2 * half_width / grid
    hit = set()
    for a_value, b_value in reps:
        i = min(grid - 1, max(0, int((float(a_value) + half_width) // step)))
        j = min(grid - 1, max(0, int((float(b_value) + half_width) // step)))
        hit.add(int(labels[i, j]))
    assert bounded <= hit
