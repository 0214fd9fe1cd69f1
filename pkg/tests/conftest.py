import numpy as np
import pytest
import sympy

from nrange.kippenhahn import kippenhahn_poly
from nrange.pencil import ComplexMatrix

I = sympy.I
R = sympy.Rational


def quartic1_matrix() -> ComplexMatrix:
    return ComplexMatrix.from_rows(
        [
            [0, 2, 0, 0],
            [0, 0, 4, 0],
            [0, 0, 0, 6],
            [8, 0, 0, 0],
        ]
    )


def pringle_matrix() -> ComplexMatrix:
    return ComplexMatrix.from_rows(
        [
            [0, 2, 0, 0],
            [2, 0, I, 0],
            [0, I, 0, 1],
            [0, 0, 1, 0],
        ]
    )


def ok_plane_matrix() -> ComplexMatrix:
    return ComplexMatrix.from_rows([[0, 0, 0], [0, 0, 2], [0, 0, 0]])


def circle_and_line_matrix() -> ComplexMatrix:
    return ComplexMatrix.from_rows([[1, 0, 0], [0, 0, R(1, 2)], [0, 0, 0]])


def quartic_p_tangent_matrix() -> ComplexMatrix:
    """Re(A) = diag(1/2, -1/2, 1/3, -1/3); Im(A) is a star on vertex 2 with eigenvalues +-1/2, 0, 0."""
    edge = (-1 + I) / 5
    back = (1 + I) / 5
    return ComplexMatrix.from_rows(
        [
            [R(1, 2), R(3, 10) * I, 0, 0],
            [R(3, 10) * I, R(-1, 2), edge, edge],
            [0, back, R(1, 3), 0],
            [0, back, 0, R(-1, 3)],
        ]
    )


def weird_tritangent_matrix() -> ComplexMatrix:
    return ComplexMatrix.from_rows(
        [
            [1 + I, 1, 1, 0],
            [1, -1, -1, 0],
            [1, -1, -1, -1],
            [0, 0, -1, 0],
        ]
    )


def smooth_sextic_matrix() -> ComplexMatrix:
    diagonal = [1, 1, -1 + I, -1 + I, -1 - I, -1 - I]
    perturbation = [
        [0, 1, 1, -1, 0, 1],
        [1, 0, 0, 0, 1, 0],
        [-1, 1, 1, -1, 1, 1],
        [1, 1, 1, 0, 1, 0],
        [0, -1, 1, 1, 1, -1],
        [-1, 0, 1, 0, 1, -1],
    ]
    rows = [
        [(diagonal[i] if i == j else 0) + R(1, 5) * perturbation[i][j] for j in range(6)] for i in range(6)
    ]
    return ComplexMatrix.from_rows(rows)


def tritangent_family_matrix(u) -> ComplexMatrix:
    """diag(B + u(1+i)I_2, quartic1) with B = [[0, 3], [0, 0]]."""
    shift = u * (1 + I)
    quartic = quartic1_matrix()
    rows = [[shift, 3, 0, 0, 0, 0], [0, shift, 0, 0, 0, 0]]
    for i in range(4):
        rows.append([0, 0] + [quartic.entry(i, j) for j in range(4)])
    return ComplexMatrix.from_rows(rows)


def _gaussian_rational(rng: np.random.Generator):
    real = R(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    imag = R(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return real + I * imag


def _dense_rows(rng: np.random.Generator, n: int) -> list[list[object]]:
    return [[_gaussian_rational(rng) for _ in range(n)] for _ in range(n)]


def random_corpus(seed: int = 20240) -> list[ComplexMatrix]:
    """Fifty matrices with Gaussian-rational entries, n from 2 to 7.

    Dense 2x2 and 3x3 blocks, normal diagonals and a dense 2x2 block beside a
    diagonal keep every exact elimination small.
    """
    rng = np.random.default_rng(seed)
    corpus = [ComplexMatrix.from_rows(_dense_rows(rng, 2)) for _ in range(20)]
    corpus.extend(ComplexMatrix.from_rows(_dense_rows(rng, 3)) for _ in range(10))
    for n in (3, 4, 5, 6, 7, 3, 4, 5, 6, 7):
        corpus.append(ComplexMatrix.diagonal([_gaussian_rational(rng) for _ in range(n)]))
    for n in (3, 3, 4, 4, 5, 3, 3, 4, 4, 5):
        block = _dense_rows(rng, 2)
        tail = [_gaussian_rational(rng) for _ in range(n - 2)]
        rows = [row + [0] * (n - 2) for row in block]
        rows.extend([0] * (2 + i) + [value] + [0] * (n - 3 - i) for i, value in enumerate(tail))
        corpus.append(ComplexMatrix.from_rows(rows))
    return corpus


def matrix_document(matrix: ComplexMatrix) -> dict[str, object]:
    entries = [
        [[str(real.p), str(real.q), str(imag.p), str(imag.q)] for real, imag in zip(real_row, imag_row)]
        for real_row, imag_row in zip(matrix.real, matrix.imag)
    ]
    return {"n": matrix.n, "mode": "exact", "entries": entries}


@pytest.fixture
def quartic1():
    return kippenhahn_poly(quartic1_matrix())


@pytest.fixture
def pringle():
    return kippenhahn_poly(pringle_matrix())


@pytest.fixture
def ok_plane():
    return kippenhahn_poly(ok_plane_matrix())


@pytest.fixture
def circle_and_line():
    return kippenhahn_poly(circle_and_line_matrix())


@pytest.fixture
def quartic_p_tangent():
    return kippenhahn_poly(quartic_p_tangent_matrix())


@pytest.fixture
def weird_tritangent():
    return kippenhahn_poly(weird_tritangent_matrix())
