"""Exact polynomial arithmetic on sympy ``Poly`` objects.

Homogeneous trivariate polynomials live in the generators (t, x, y); boundary
polynomials live in (a, b). Everything that decides a sign or a vanishing is
done over QQ; floats only enter through the membership line of a float query.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import sympy
from sympy import QQ, RR

from .config import DEFAULT_DIVTOL, DEFAULT_PRECISION
from .errors import DomainError
from .utils import to_rational

logger = logging.getLogger("nrange.polynomials")

T, X, Y = sympy.symbols("t x y")
A_SYM, B_SYM = sympy.symbols("a b")
GENS = (T, X, Y)

SOLVE_PRECISION = sympy.Rational(1, 10**30)
EXACT_DENOMINATOR_BOUND = 10**6
COMMON_ZERO_RESIDUAL = 1e-18
LINEAR_FACTOR_RESIDUAL = 1e-20
COMBINATION_SEEDS = ((1, 2, 3, 5, 7, 11), (3, -1, 4, -1, 5, -9))


def _as_eps(value: Any) -> sympy.Rational:
    if isinstance(value, sympy.Rational):
        return value
    return sympy.Rational(repr(float(value)))


def _is_exact_domain(poly: sympy.Poly) -> bool:
    return poly.get_domain() in (QQ, sympy.ZZ)


def coefficient_norm(poly: sympy.Poly) -> float:
    return max((abs(float(coefficient)) for coefficient in poly.coeffs()), default=0.0)


def float_eval(poly: sympy.Poly, point: Sequence[float]) -> float:
    """Evaluate in double precision by summing terms."""
    values = [float(value) for value in point]
    total = 0.0
    for monom, coefficient in poly.terms():
        term = float(coefficient)
        for value, exponent in zip(values, monom):
            if exponent:
                term *= value**exponent
        total += term
    return total


@dataclass(frozen=True)
class HomPoly3:
    """Homogeneous polynomial in (t, x, y)."""

    poly: sympy.Poly

    def __post_init__(self) -> None:
        if tuple(self.poly.gens) != GENS:
            raise DomainError(f"expected generators {GENS}, got {self.poly.gens}")
        if not self.poly.is_zero and not self.poly.is_homogeneous:
            raise DomainError("polynomial is not homogeneous")

    @classmethod
    def from_expr(cls, expr: Any, *, domain: Any = QQ) -> "HomPoly3":
        return cls(sympy.Poly(expr, *GENS, domain=domain))

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[tuple[int, int, int], Any]) -> "HomPoly3":
        terms = {monom: to_rational(value) for monom, value in coeffs.items() if value != 0}
        if not terms:
            return cls(sympy.Poly(0, *GENS, domain=QQ))
        return cls(sympy.Poly.from_dict(terms, *GENS, domain=QQ))

    @property
    def degree(self) -> int:
        return 0 if self.poly.is_zero else self.poly.total_degree()

    @property
    def coeffs(self) -> dict[tuple[int, int, int], Any]:
        return {monom: coefficient for monom, coefficient in self.poly.terms() if coefficient != 0}

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    @property
    def exact(self) -> bool:
        return _is_exact_domain(self.poly)

    def __call__(self, t: Any, x: Any, y: Any) -> Any:
        return self.poly(t, x, y)

    def evaluate_float(self, t: float, x: float, y: float) -> float:
        return float_eval(self.poly, (t, x, y))

    def diff(self, var: sympy.Symbol) -> "HomPoly3":
        return HomPoly3(self.poly.diff(var))

    def as_expr(self) -> sympy.Expr:
        return self.poly.as_expr()

    def dehomogenize(self, chart: str) -> sympy.Poly:
        """Restrict to an affine chart: ``t`` gives f(1,x,y), ``x`` gives f(t,1,y), ``y`` gives f(t,x,1)."""
        index = "txy".index(chart)
        remaining = tuple(gen for position, gen in enumerate(GENS) if position != index)
        return sympy.Poly(self.poly.as_expr().subs(GENS[index], 1), *remaining, domain=self.poly.get_domain())


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial; coefficients lowest degree first."""

    poly: sympy.Poly

    def __post_init__(self) -> None:
        if len(self.poly.gens) != 1:
            raise DomainError("univariate polynomial expected")

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Any], *, gen: sympy.Symbol = Y) -> "UniPoly":
        exact = all(not isinstance(value, float) for value in coeffs)
        values = [to_rational(value) for value in coeffs] if exact else [float(value) for value in coeffs]
        return cls(sympy.Poly(list(reversed(values)) or [0], gen, domain=QQ if exact else RR))

    @property
    def coeffs(self) -> list[Any]:
        if self.poly.is_zero:
            return []
        return list(reversed(self.poly.all_coeffs()))

    @property
    def degree(self) -> int:
        return -1 if self.poly.is_zero else self.poly.degree()

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    def __call__(self, value: Any) -> Any:
        return self.poly(value)

    def trimmed(self, rel_tol: float) -> "UniPoly":
        """Zero float coefficients below rel_tol times the largest one; exact polynomials are returned as is."""
        if self.is_zero or _is_exact_domain(self.poly):
            return self
        scale = coefficient_norm(self.poly)
        kept = [value if abs(float(value)) > rel_tol * scale else 0 for value in self.poly.all_coeffs()]
        return UniPoly(sympy.Poly(kept, self.poly.gens[0], domain=RR))


@dataclass(frozen=True)
class RootIsolation:
    """Sorted disjoint isolating intervals of the distinct real roots."""

    intervals: tuple[tuple[sympy.Rational, sympy.Rational], ...]
    multiplicities: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.intervals)

    def midpoints(self) -> list[sympy.Rational]:
        return [(lower + upper) / 2 for lower, upper in self.intervals]

    def approximations(self) -> list[float]:
        return [float(midpoint) for midpoint in self.midpoints()]

    def radius(self) -> float:
        return max((float(upper - lower) / 2 for lower, upper in self.intervals), default=0.0)


@dataclass(frozen=True)
class LinearForm:
    """l0*t + l1*x + l2*y, scaled so the first nonzero coefficient is 1.

    Irrational coefficients are stored as rational approximations with ``radius``
    bounding the error.
    """

    coefficients: tuple[sympy.Rational, sympy.Rational, sympy.Rational]
    exact: bool = True
    radius: float = 0.0

    @classmethod
    def normalized(cls, l0: Any, l1: Any, l2: Any, *, exact: bool = True, radius: float = 0.0) -> "LinearForm":
        values = [to_rational(value) for value in (l0, l1, l2)]
        pivot = next((value for value in values if value != 0), None)
        if pivot is None:
            raise DomainError("linear form is identically zero")
        scaled = tuple(value / pivot for value in values)
        return cls(scaled, exact, radius / abs(float(pivot)) if radius else 0.0)

    @property
    def point(self) -> tuple[sympy.Rational, sympy.Rational] | None:
        """(a, b) for a form t + a*x + b*y, otherwise None."""
        l0, l1, l2 = self.coefficients
        if l0 == 0:
            return None
        return (l1 / l0, l2 / l0)

    def as_poly(self) -> sympy.Poly:
        l0, l1, l2 = self.coefficients
        return sympy.Poly(l0 * T + l1 * X + l2 * Y, *GENS, domain=QQ)

    def __str__(self) -> str:
        return str(self.as_poly().as_expr())


def squarefree(f: HomPoly3) -> HomPoly3:
    """Product of the distinct irreducible factors, leading coefficient 1 in lex order."""
    if f.is_zero:
        raise DomainError("squarefree part of the zero polynomial")
    return HomPoly3(f.poly.sqf_part().monic())


def divide_out_linear(
    f: HomPoly3, a: Any, b: Any, *, divtol: float = DEFAULT_DIVTOL
) -> tuple[int, HomPoly3]:
    """Largest d with (t + a*x + b*y)^d dividing f, and the cofactor.

    Rational (a, b) divide exactly. Floats divide over RR and accept a remainder
    whose coefficient norm is at most divtol times that of f.
    """
    if f.is_zero:
        raise DomainError("cannot divide the zero polynomial")
    exact = f.exact and not isinstance(a, float) and not isinstance(b, float)
    if exact:
        a, b = to_rational(a), to_rational(b)
        current = f.poly
        divisor = sympy.Poly(T + a * X + b * Y, *GENS, domain=QQ)
    else:
        current = f.poly.set_domain(RR)
        divisor = sympy.Poly(T + sympy.Float(float(a)) * X + sympy.Float(float(b)) * Y, *GENS, domain=RR)

    scale = coefficient_norm(f.poly)
    d = 0
    while current.total_degree() >= 1:
        quotient, remainder = current.div(divisor)
        if exact:
            divisible = remainder.is_zero
        else:
            divisible = coefficient_norm(remainder) <= divtol * scale
        if not divisible:
            break
        current = quotient
        d += 1
    return d, HomPoly3(current)


def restrict_to_membership_line(f: HomPoly3, a: Any, b: Any) -> UniPoly:
    """The univariate polynomial y -> f(-a - b*y, 1, y)."""
    if f.exact and not isinstance(a, float) and not isinstance(b, float):
        a, b = to_rational(a), to_rational(b)
        domain = QQ
    else:
        a, b = sympy.Float(float(a)), sympy.Float(float(b))
        domain = RR
    expr = f.poly.as_expr().subs({T: -a - b * Y, X: 1}, simultaneous=True)
    return UniPoly(sympy.Poly(sympy.expand(expr), Y, domain=domain))


def _reordered(poly: sympy.Poly, var: sympy.Symbol) -> sympy.Poly:
    if var not in poly.gens:
        raise DomainError(f"{var} is not a generator of {poly.gens}")
    others = [gen for gen in poly.gens if gen != var]
    return sympy.Poly(poly.as_expr(), var, *others, domain=poly.get_domain())


def _lift(result: Any, gens: Sequence[sympy.Symbol], domain: Any) -> sympy.Poly:
    if isinstance(result, sympy.Poly):
        return result
    return sympy.Poly(result, *gens, domain=domain) if gens else sympy.Poly(result, Y, domain=domain)


def discriminant(f: sympy.Poly, var: sympy.Symbol) -> sympy.Poly:
    """Disc_var(f) as a polynomial in the remaining generators."""
    ordered = _reordered(f, var)
    if ordered.degree(var) < 1:
        raise DomainError(f"discriminant needs positive degree in {var}")
    others = ordered.gens[1:]
    if ordered.degree(var) == 1:
        return _lift(sympy.Integer(1), others, ordered.get_domain())
    return _lift(ordered.discriminant(), others, ordered.get_domain())


def resultant(p: sympy.Poly, q: sympy.Poly, var: sympy.Symbol) -> sympy.Poly:
    """Sylvester resultant with respect to var."""
    gens = list(dict.fromkeys([*p.gens, *q.gens]))
    if var not in gens:
        raise DomainError(f"{var} is not a generator")
    others = [gen for gen in gens if gen != var]
    left = sympy.Poly(p.as_expr(), var, *others, domain=QQ)
    right = sympy.Poly(q.as_expr(), var, *others, domain=QQ)
    if left.is_zero or right.is_zero:
        raise DomainError("resultant of the zero polynomial")
    if left.degree(var) < 1 and right.degree(var) < 1:
        raise DomainError(f"resultant needs positive degree in {var}")
    return _lift(left.resultant(right), others, QQ)


def isolate_real_roots(
    poly: sympy.Poly,
    precision: Any = DEFAULT_PRECISION,
    *,
    inf: Any = None,
    sup: Any = None,
) -> RootIsolation:
    """Isolating intervals of width below precision for a univariate polynomial."""
    if len(poly.gens) != 1:
        raise DomainError("root isolation needs a univariate polynomial")
    if poly.is_zero:
        raise DomainError("root isolation of the zero polynomial")
    if not _is_exact_domain(poly):
        poly = poly.to_exact()
    if poly.degree() <= 0:
        return RootIsolation((), ())
    raw = poly.intervals(
        eps=_as_eps(precision),
        inf=None if inf is None else to_rational(inf),
        sup=None if sup is None else to_rational(sup),
    )
    raw = sorted(raw, key=lambda item: item[0][0])
    return RootIsolation(
        tuple((sympy.Rational(lower), sympy.Rational(upper)) for (lower, upper), _ in raw),
        tuple(int(multiplicity) for _, multiplicity in raw),
    )


def real_roots(p: UniPoly, precision: Any = DEFAULT_PRECISION) -> RootIsolation:
    return isolate_real_roots(p.poly, precision)


def lowest_degree_part(poly: sympy.Poly) -> sympy.Poly:
    """Sum of the terms of minimal total degree."""
    if poly.is_zero:
        raise DomainError("lowest degree part of the zero polynomial")
    lowest = min(sum(monom) for monom in poly.monoms())
    terms = {monom: coefficient for monom, coefficient in poly.terms() if sum(monom) == lowest}
    return sympy.Poly.from_dict(terms, *poly.gens, domain=poly.get_domain())


def normalize_bivariate(poly: sympy.Poly) -> sympy.Poly:
    """Integer coefficients with content 1 and positive leading coefficient (lex order)."""
    if poly.is_zero:
        raise DomainError("cannot normalize the zero polynomial")
    _, cleared = poly.clear_denoms(convert=True)
    _, primitive = cleared.primitive()
    if primitive.LC() < 0:
        primitive = -primitive
    return primitive.set_domain(QQ)


def _snap_into(lower: sympy.Rational, upper: sympy.Rational) -> sympy.Rational | None:
    """The small-denominator rational inside [lower, upper], if the midpoint snaps to one."""
    if lower == upper:
        return lower
    midpoint = (lower + upper) / 2
    candidate = Fraction(midpoint.p, midpoint.q).limit_denominator(EXACT_DENOMINATOR_BOUND)
    snapped = sympy.Rational(candidate.numerator, candidate.denominator)
    return snapped if lower <= snapped <= upper else None


def linear_factors(f: HomPoly3) -> list[tuple[LinearForm, int]]:
    """Real linear factors of f with multiplicities.

    Rational factors come straight from the factorization over QQ. An
    irreducible factor of degree >= 2 can still split into conjugate real
    lines; those are found by pairing the roots of q(t, 1, 0) and q(t, 0, 1)
    and keeping the pairs whose restriction vanishes to high precision.
    """
    if not f.exact:
        raise DomainError("linear factors need exact coefficients")
    if f.is_zero:
        raise DomainError("linear factors of the zero polynomial")
    found: list[tuple[LinearForm, int]] = []
    _, factors = f.poly.factor_list()
    for factor, multiplicity in factors:
        if factor.total_degree() == 1:
            coefficients = [factor.coeff_monomial(gen) for gen in GENS]
            found.append((LinearForm.normalized(*coefficients), multiplicity))
        elif factor.degree(T) == factor.total_degree():
            found.extend((form, multiplicity) for form in _split_into_real_lines(factor))
    found.sort(key=lambda item: tuple(float(value) for value in item[0].coefficients))
    return found


def _split_into_real_lines(factor: sympy.Poly) -> list[LinearForm]:
    along_x = sympy.Poly(factor.as_expr().subs({X: 1, Y: 0}), T, domain=QQ)
    along_y = sympy.Poly(factor.as_expr().subs({X: 0, Y: 1}), T, domain=QQ)
    roots_x = isolate_real_roots(along_x, SOLVE_PRECISION).midpoints()
    roots_y = isolate_real_roots(along_y, SOLVE_PRECISION).midpoints()
    scale = 1 + coefficient_norm(factor)
    lines: list[LinearForm] = []
    for root_x, root_y in itertools.product(roots_x, roots_y):
        a, b = -root_x, -root_y
        restricted = sympy.Poly(factor.as_expr().subs({T: -a * X - b * Y}, simultaneous=True), X, Y, domain=QQ)
        spread = (1 + abs(float(a)) + abs(float(b))) ** factor.total_degree()
        if coefficient_norm(restricted) <= LINEAR_FACTOR_RESIDUAL * scale * spread:
            lines.append(LinearForm.normalized(1, a, b, exact=False, radius=float(SOLVE_PRECISION)))
    return lines


@dataclass(frozen=True)
class PlanePoint:
    """A real solution (u, v) of a bivariate system; ``radius`` is 0 when exact."""

    u: sympy.Rational
    v: sympy.Rational
    exact: bool
    radius: float = 0.0


def _eliminants(polys: Sequence[sympy.Poly], keep: sympy.Symbol, drop: sympy.Symbol) -> list[sympy.Poly]:
    eliminants: list[sympy.Poly] = []
    for poly in polys:
        if poly.degree(drop) <= 0:
            eliminants.append(sympy.Poly(poly.as_expr(), keep, domain=QQ))
    for left, right in itertools.combinations(polys, 2):
        if left.degree(drop) <= 0 and right.degree(drop) <= 0:
            continue
        eliminant = resultant(left, right, drop)
        eliminant = sympy.Poly(eliminant.as_expr(), keep, domain=QQ)
        if not eliminant.is_zero:
            eliminants.append(eliminant)
    return eliminants


def _combined(polys: Sequence[sympy.Poly]) -> list[sympy.Poly]:
    combos: list[sympy.Poly] = []
    for seed in COMBINATION_SEEDS:
        total = sympy.Poly(0, *polys[0].gens, domain=QQ)
        for weight, poly in zip(itertools.cycle(seed), polys):
            total += weight * poly
        combos.append(total)
    return combos


def _candidates(polys: Sequence[sympy.Poly], keep: sympy.Symbol, drop: sympy.Symbol) -> RootIsolation:
    eliminants = _eliminants(polys, keep, drop)
    if not eliminants:
        eliminants = _eliminants(_combined(polys), keep, drop)
    if not eliminants:
        raise DomainError("system has infinitely many common zeros")
    combined = eliminants[0]
    for eliminant in eliminants[1:]:
        combined = combined.gcd(eliminant)
    if combined.is_zero:
        raise DomainError("system has infinitely many common zeros")
    return isolate_real_roots(combined, SOLVE_PRECISION)


def real_common_zeros(polys: Iterable[sympy.Poly]) -> list[PlanePoint]:
    """All real common zeros of bivariate polynomials over QQ, assumed finite.

    Each coordinate is projected by resultants, isolated to 1e-30 and the
    candidate pairs are kept when every polynomial nearly vanishes there.
    Coordinates with small denominators are snapped and confirmed exactly.
    """
    system = [poly for poly in polys if not poly.is_zero]
    if not system:
        raise DomainError("empty system of equations")
    gens = system[0].gens
    if len(gens) != 2:
        raise DomainError("bivariate polynomials expected")
    system = [sympy.Poly(poly.as_expr(), *gens, domain=QQ) for poly in system]
    if any(poly.is_ground for poly in system):
        return []
    common = system[0]
    for poly in system[1:]:
        common = common.gcd(poly)
    if common.total_degree() > 0:
        raise DomainError("system has a common curve component")

    u_gen, v_gen = gens
    u_roots = _candidates(system, u_gen, v_gen)
    v_roots = _candidates(system, v_gen, u_gen)
    points: list[PlanePoint] = []
    for (u_interval, u_mid), (v_interval, v_mid) in itertools.product(
        zip(u_roots.intervals, u_roots.midpoints()),
        zip(v_roots.intervals, v_roots.midpoints()),
    ):
        if not _nearly_common_zero(system, u_mid, v_mid):
            continue
        point = _exact_point(system, u_interval, v_interval)
        if point is None:
            radius = max(float(u_interval[1] - u_interval[0]), float(v_interval[1] - v_interval[0])) / 2
            point = PlanePoint(u_mid, v_mid, False, radius)
        points.append(point)
    logger.debug("real_common_zeros found %d point(s) from %d equation(s)", len(points), len(system))
    return points


def _nearly_common_zero(system: Sequence[sympy.Poly], u: sympy.Rational, v: sympy.Rational) -> bool:
    spread = 1 + abs(float(u)) + abs(float(v))
    for poly in system:
        scale = (1 + coefficient_norm(poly)) * spread ** poly.total_degree()
        if abs(float(poly(u, v))) > COMMON_ZERO_RESIDUAL * scale:
            return False
    return True


def _exact_point(
    system: Sequence[sympy.Poly],
    u_interval: tuple[sympy.Rational, sympy.Rational],
    v_interval: tuple[sympy.Rational, sympy.Rational],
) -> PlanePoint | None:
    u_exact = _snap_into(*u_interval)
    v_exact = _snap_into(*v_interval)
    if u_exact is None or v_exact is None:
        return None
    if all(poly(u_exact, v_exact) == 0 for poly in system):
        return PlanePoint(u_exact, v_exact, True)
    return None


def vanishing_order(values: Sequence[Any]) -> int:
    """Index of the first nonzero entry of a coefficient list (lowest degree first)."""
    for index, value in enumerate(values):
        if value != 0:
            return index
    return len(values)


__all__ = [
    "T",
    "X",
    "Y",
    "A_SYM",
    "B_SYM",
    "GENS",
    "SOLVE_PRECISION",
    "HomPoly3",
    "UniPoly",
    "RootIsolation",
    "LinearForm",
    "PlanePoint",
    "coefficient_norm",
    "float_eval",
    "squarefree",
    "divide_out_linear",
    "restrict_to_membership_line",
    "discriminant",
    "resultant",
    "isolate_real_roots",
    "real_roots",
    "lowest_degree_part",
    "normalize_bivariate",
    "linear_factors",
    "real_common_zeros",
    "vanishing_order",
]
