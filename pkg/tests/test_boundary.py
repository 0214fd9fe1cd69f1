import math

import pytest
import sympy
from sympy import QQ

from conftest import quartic1_matrix, weird_tritangent_matrix
from nrange.boundary import (
    C_SYM,
    DUAL,
    SINGULAR_LINE,
    _factor_is_p_tangent,
    antipodal_span,
    boundary_poly,
    duality_residuals,
    is_p_tangent,
    relative_residual,
    singularity_tangents,
    tritangent_candidates,
    tritangent_search,
)
from nrange.errors import DomainError, KIndexError
from nrange.kippenhahn import ProjPointR, kippenhahn_poly
from nrange.pencil import ComplexMatrix
from nrange.polynomials import A_SYM, B_SYM

a, b = A_SYM, B_SYM
POLE = ProjPointR.of(0, 0, 1)


def _same(poly, expected) -> bool:
    return sympy.expand(poly.as_expr() - expected) == 0


def test_boundary_of_a_two_point_normal_matrix() -> None:
    boundary = boundary_poly(kippenhahn_poly(ComplexMatrix.diagonal([1, -1])))

    assert _same(boundary.g, b)
    assert [component.kind for component in boundary.components] == [SINGULAR_LINE]


def test_boundary_of_circle_and_line(circle_and_line) -> None:
    boundary = boundary_poly(circle_and_line)

    assert _same(boundary.g, (16 * a**2 + 16 * b**2 - 1) * ((1 - a) ** 2 - 15 * b**2))
    assert boundary.degree == 4
    kinds = sorted(component.kind for component in boundary.components)
    assert kinds == [DUAL, SINGULAR_LINE]
    assert _same(boundary.dual_part, 16 * a**2 + 16 * b**2 - 1)
    assert not boundary.extraneous_removed


def test_boundary_rejects_a_power_of_a_linear_form() -> None:
    with pytest.raises(DomainError):
        boundary_poly(kippenhahn_poly(ComplexMatrix.diagonal([2, 2])))


def test_boundary_vanishes_on_tangent_lines(circle_and_line) -> None:
    residuals = duality_residuals(circle_and_line, boundary_poly(circle_and_line))

    assert residuals
    assert max(residuals) <= 1e-6


def test_relative_residual_is_scale_free() -> None:
    g = sympy.Poly(a**2 + b**2 - 1, a, b, domain=QQ)

    assert relative_residual(g, 0.6, 0.8) <= 1e-15
    assert relative_residual(g, 0.0, 0.0) == 1.0
    assert relative_residual(g * 1000, 2.0, 0.0) == pytest.approx(relative_residual(g, 2.0, 0.0))


@pytest.mark.slow
def test_boundary_of_quartic1_is_its_dual_curve() -> None:
    boundary = boundary_poly(kippenhahn_poly(quartic1_matrix()))
    expected = (
        15625 * a**12
        + 273750 * a**10 * b**2
        + 90375 * a**8 * b**4
        + 549236 * a**6 * b**6
        + 90375 * a**4 * b**8
        + 273750 * a**2 * b**10
        + 15625 * b**12
        - 1368750 * a**10
        - 17139750 * a**8 * b**2
        + 44934900 * a**6 * b**4
        + 44934900 * a**4 * b**6
        - 17139750 * a**2 * b**8
        - 1368750 * b**10
        + 47610625 * a**8
        + 429249700 * a**6 * b**2
        - 1058169786 * a**4 * b**4
        + 429249700 * a**2 * b**6
        + 47610625 * b**8
        - 838188000 * a**6
        - 5975989920 * a**4 * b**2
        - 5975989920 * a**2 * b**4
        - 838188000 * b**6
        + 7621461600 * a**4
        + 39076977600 * a**2 * b**2
        + 7621461600 * b**4
        - 30526848000 * a**2
        - 30526848000 * b**2
        + 21083040000
    )

    assert boundary.degree == 12
    assert _same(boundary.g, expected)


@pytest.mark.slow
def test_dual_part_of_weird_tritangent() -> None:
    boundary = boundary_poly(kippenhahn_poly(weird_tritangent_matrix()))
    expected = (
        49 * a**6
        - 644 * a**5 * b
        + 196 * a**5
        + 3824 * a**4 * b**2
        - 2212 * a**4 * b
        + 98 * a**4
        - 12172 * a**3 * b**3
        + 8942 * a**3 * b**2
        + 56 * a**3 * b
        - 294 * a**3
        + 21248 * a**2 * b**4
        - 16084 * a**2 * b**3
        - 3420 * a**2 * b**2
        + 2324 * a**2 * b
        - 147 * a**2
        - 18836 * a * b**5
        + 11860 * a * b**4
        + 9244 * a * b**3
        - 4754 * a * b**2
        + 56 * a * b
        + 98 * a
        + 7260 * b**6
        - 5132 * b**5
        - 1739 * b**4
        - 1600 * b**3
        + 2402 * b**2
        - 672 * b
        + 49
    )

    assert _same(boundary.dual_part, expected)
    assert any(_same(component.poly, b) for component in boundary.components if component.kind == SINGULAR_LINE)


def test_pringle_tangents_at_the_pole(pringle) -> None:
    tangents = singularity_tangents(pringle, POLE)

    assert tangents.origin == POLE
    assert tangents.certified
    assert all(point.exact for point in tangents.points)
    assert sorted((point.a, point.b) for point in tangents.points) == [(-2, 0), (-1, 0), (0, 0), (1, 0), (2, 0)]


def test_quartic_p_tangent_lines_at_the_pole(quartic_p_tangent) -> None:
    tangents = singularity_tangents(quartic_p_tangent, POLE)
    values = [point.floats()[0] for point in tangents.points]

    assert all(point.floats()[1] == 0 for point in tangents.points)
    for expected in ((4 - math.sqrt(41)) / 25, (4 + math.sqrt(41)) / 25, 1 / 3):
        assert min(abs(value - expected) for value in values) < 1e-10
    third = next(point for point in tangents.points if point.exact and point.a == sympy.Rational(1, 3))
    assert third.source == "p-tangent"


def test_weird_tritangent_tangents_at_the_pole_are_certified(weird_tritangent) -> None:
    tangents = singularity_tangents(weird_tritangent, POLE)
    expected = sorted(-1 - 2 * math.cos(2 * math.pi * j / 7) for j in (1, 2, 3))

    assert tangents.certified
    assert len(tangents.points) == 3
    assert sorted(point.floats()[0] for point in tangents.points) == pytest.approx(expected, abs=1e-10)
    assert all(point.floats()[1] == 0 for point in tangents.points)
    assert not any(point.exact for point in tangents.points)


def test_factor_tangency_holds_for_all_roots_at_once(weird_tritangent) -> None:
    c = C_SYM

    assert _factor_is_p_tangent(weird_tritangent.fred, sympy.Poly(c**3 + 2 * c**2 - c - 1, c, domain=QQ), 3)
    assert not _factor_is_p_tangent(weird_tritangent.fred, sympy.Poly(c**2 - 2, c, domain=QQ), 3)


def test_tangents_through_a_float_point_are_uncertified(pringle) -> None:
    tangents = singularity_tangents(pringle, ProjPointR.of(0, 0, 1, exact=False))

    assert not tangents.certified
    assert min(abs(point.floats()[0] - 2) for point in tangents.points) < 1e-6


def test_singularity_tangents_needs_a_point_on_the_curve(pringle) -> None:
    with pytest.raises(DomainError):
        singularity_tangents(pringle, ProjPointR.of(1, 0, 0))


def test_is_p_tangent_on_pringle(pringle) -> None:
    fred = pringle.fred

    assert is_p_tangent(fred, POLE, 0, 0)
    assert is_p_tangent(fred, POLE, 1, 0)
    assert not is_p_tangent(fred, POLE, 3, 0)
    assert not is_p_tangent(fred, POLE, 0, 1)


def test_antipodal_span_of_pringle(pringle) -> None:
    span = antipodal_span(pringle, 2)

    assert span.dim == 0
    assert span.points == (POLE,)
    assert span.vperp is None


def test_antipodal_span_of_a_smooth_curve(quartic1) -> None:
    span = antipodal_span(quartic1, 1)

    assert span.dim == -1
    assert span.points == ()


def test_antipodal_span_needs_small_k(ok_plane) -> None:
    with pytest.raises(KIndexError):
        antipodal_span(ok_plane, 2)


def test_tritangent_candidates_of_low_degree_curve(circle_and_line) -> None:
    candidates = tritangent_candidates(circle_and_line)

    assert [point.floats() for point in candidates] == [(1.0, 0.0)]
    assert candidates[0].source == "linear-factor"


def test_tritangent_search_reports_no_skips_below_degree_six(circle_and_line) -> None:
    candidates, skipped = tritangent_search(circle_and_line)

    assert len(candidates) == 1
    assert skipped == []
