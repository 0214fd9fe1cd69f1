import pytest
import sympy

import nrange.server as server
from conftest import circle_and_line_matrix, matrix_document, pringle_matrix
from nrange.pencil import ComplexMatrix


@pytest.fixture(autouse=True)
def _environment(monkeypatch) -> None:
    monkeypatch.setenv("NRANGE_THREADS", "1")
    monkeypatch.setenv("MCP_LOG_LEVEL", "INFO")


def test_healthcheck_returns_ok() -> None:
    assert server.healthcheck() == "ok"


def test_kippenhahn_polynomial_payload() -> None:
    payload = server.kippenhahn_polynomial(matrix_document(circle_and_line_matrix()))

    assert payload["n"] == 3
    assert payload["degree"] == 3
    assert payload["reduced_degree"] == 3
    assert {"exponents": [3, 0, 0], "coefficient": "1"} in payload["terms"]


def test_kippenhahn_polynomial_rejects_bad_documents() -> None:
    payload = server.kippenhahn_polynomial({"n": 2, "entries": []})

    assert payload["error"] == "invalid_request"
    assert "expected 2 rows" in payload["message"]


def test_membership_payload() -> None:
    payload = server.membership(matrix_document(pringle_matrix()), 2, "0", "0")

    assert payload["member"] is True
    assert payload["status"] == "member"
    assert payload["test_points"] == [0.0]


def test_membership_rejects_unreadable_coordinates() -> None:
    payload = server.membership(matrix_document(pringle_matrix()), 2, "one third", 0)

    assert payload["error"] == "invalid_request"


def test_membership_rejects_out_of_range_k() -> None:
    payload = server.membership(matrix_document(pringle_matrix()), 7, 0, 0)

    assert payload["error"] == "invalid_request"


def test_numerical_range_payload() -> None:
    payload = server.numerical_range(matrix_document(pringle_matrix()), k=2)

    assert payload["n"] == 4
    (result,) = payload["results"]
    assert result["k"] == 2
    assert result["dim"] == 0
    assert result["point"]["exact"] == ["0", "0"]


def test_boundary_polynomial_payload() -> None:
    payload = server.boundary_polynomial(matrix_document(circle_and_line_matrix()))

    assert payload["degree"] == 4
    assert payload["extraneous_removed"] is False
    assert len(payload["components"]) == 2


def test_boundary_polynomial_of_scalar_matrix_is_a_computation_error() -> None:
    matrix = ComplexMatrix.diagonal([1 + sympy.I, 1 + sympy.I])

    payload = server.boundary_polynomial(matrix_document(matrix))

    assert payload["error"] == "computation_error"
