"""Point membership in the rank-k numerical range."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from .config import DEFAULT_DIVTOL, DEFAULT_PRECISION, DEFAULT_TOL
from .errors import InconsistencyError, ParameterError
from .kippenhahn import KippenhahnData, kippenhahn_poly, power_of_linear_form
from .pencil import ComplexMatrix, _check_k, eigenvalues
from .polynomials import divide_out_linear, real_roots, restrict_to_membership_line
from .utils import parallel_map

logger = logging.getLogger("nrange.membership")

MEMBER = "member"
NON_MEMBER = "non-member"
BOUNDARY = "boundary"
RETEST_FACTOR = 10


class PencilSample(NamedTuple):
    s: float
    upper: float
    lower: float
    level: float
    margin: float


class SignProfile(NamedTuple):
    positives: int
    negatives: int
    zeros: int


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership query.

    ``margin`` is the smallest slack min(lambda_k - level, level - lambda_{n-k+1})
    over the test points, where level = a + b*s.
    """

    member: bool
    margin: float
    witnesses: tuple[PencilSample, ...]
    tol: float
    k: int
    point: tuple[Any, Any]
    linear_power: int = 0

    @property
    def status(self) -> str:
        if abs(self.margin) <= self.tol:
            return BOUNDARY
        return MEMBER if self.member else NON_MEMBER

    @property
    def ambiguous(self) -> bool:
        """The verdict flips when the tolerance is tightened tenfold."""
        return -self.tol <= self.margin < -self.tol / RETEST_FACTOR


def _as_data(source: ComplexMatrix | KippenhahnData) -> KippenhahnData:
    return source if isinstance(source, KippenhahnData) else kippenhahn_poly(source)


def _test_points(roots: list[float], *, with_origin: bool = False) -> list[float]:
    if not roots:
        return [0.0]
    points = [roots[0] - 1]
    points.extend((left + right) / 2 for left, right in zip(roots, roots[1:]))
    points.append(roots[-1] + 1)
    if with_origin and 0.0 not in points:
        points.append(0.0)
        points.sort()
    return points


def membership_test(
    source: ComplexMatrix | KippenhahnData,
    k: int,
    a: Any,
    b: Any,
    tol: float = DEFAULT_TOL,
    *,
    precision: float = DEFAULT_PRECISION,
    divtol: float = DEFAULT_DIVTOL,
    workers: int = 1,
) -> MembershipVerdict:
    """Decide whether a + i*b lies in Lambda_k(A).

    Rational (a, b) divide f_A exactly; float (a, b) use the floating
    divisibility test. The pencil is then checked at one point between each
    pair of consecutive real roots of h(y) = f~(-a - b*y, 1, y) and beyond
    the extreme roots. For float (a, b) the coefficients of h below divtol
    relative to its largest one are roundoff and dropped, and s = 0 is always
    checked.
    """
    if not tol > 0:
        raise ParameterError("tol must be greater than zero.")
    data = _as_data(source)
    n = data.n
    _check_k(k, n)

    singleton = power_of_linear_form(data)
    if singleton is not None:
        distance = float(np.hypot(float(a) - float(singleton[0]), float(b) - float(singleton[1])))
        return MembershipVerdict(distance <= tol, -distance, (), tol, k, (a, b), n)

    d, reduced = divide_out_linear(data.f, a, b, divtol=divtol)
    h = restrict_to_membership_line(reduced, a, b).trimmed(divtol)
    if h.is_zero:
        raise InconsistencyError("restriction vanishes identically after dividing out the linear form")
    roots = real_roots(h, precision).approximations()
    inexact = not h.poly.get_domain().is_Exact
    a_value, b_value = float(a), float(b)

    def check(s: float) -> PencilSample:
        values = eigenvalues(data.pair, 1.0, s)
        level = a_value + b_value * s
        upper, lower = float(values[k - 1]), float(values[n - k])
        return PencilSample(s, upper, lower, level, min(upper - level, level - lower))

    witnesses = tuple(parallel_map(check, _test_points(roots, with_origin=inexact), workers))
    margin = min(point.margin for point in witnesses)
    verdict = MembershipVerdict(margin >= -tol, margin, witnesses, tol, k, (a, b), d)
    logger.debug(
        "membership_test k=%d point=(%s, %s) d=%d roots=%d margin=%.3e status=%s",
        k,
        a,
        b,
        d,
        len(roots),
        margin,
        verdict.status,
    )
    return verdict


def eigen_sign_profile(
    source: ComplexMatrix | KippenhahnData,
    a: Any,
    b: Any,
    s: float,
    tol: float = DEFAULT_TOL,
) -> SignProfile:
    """Signs of the eigenvalues of (-a - b*s)*I + Re(A) + s*Im(A)."""
    data = _as_data(source)
    values = eigenvalues(data.pair, 1.0, s) - (float(a) + float(b) * float(s))
    return SignProfile(
        int(np.count_nonzero(values > tol)),
        int(np.count_nonzero(values < -tol)),
        int(np.count_nonzero(np.abs(values) <= tol)),
    )


__all__ = [
    "MEMBER",
    "NON_MEMBER",
    "BOUNDARY",
    "PencilSample",
    "SignProfile",
    "MembershipVerdict",
    "membership_test",
    "eigen_sign_profile",
]
