import json
import os

import anyio
import httpx
import mcp.types as types
import pytest
from mcp.client.session import ClientSession
from mcp.client.streamable_http import streamable_http_client

PRINGLE = {
    "n": 4,
    "mode": "exact",
    "entries": [
        [[0, 1, 0, 1], [2, 1, 0, 1], [0, 1, 0, 1], [0, 1, 0, 1]],
        [[2, 1, 0, 1], [0, 1, 0, 1], [0, 1, 1, 1], [0, 1, 0, 1]],
        [[0, 1, 0, 1], [0, 1, 1, 1], [0, 1, 0, 1], [1, 1, 0, 1]],
        [[0, 1, 0, 1], [0, 1, 0, 1], [1, 1, 0, 1], [0, 1, 0, 1]],
    ],
}


def _extract_text(result: types.CallToolResult) -> str:
    if result.structuredContent is not None:
        return json.dumps(result.structuredContent)

    parts: list[str] = []
    for block in result.content:
        block_type = getattr(block, "type", None)
        if block_type == "text" and hasattr(block, "text"):
            parts.append(block.text)
        else:
            parts.append(str(block))
    return "\n".join(parts)


def _load_matrix_env(value: str | None) -> dict[str, object]:
    if value is None or not value.strip():
        return PRINGLE
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        return PRINGLE
    return parsed if isinstance(parsed, dict) else PRINGLE


async def _run_tool(url: str, timeout_seconds: float, name: str, arguments: dict[str, object]) -> str:
    async with httpx.AsyncClient(timeout=timeout_seconds) as client:
        async with streamable_http_client(url, http_client=client) as (read_stream, write_stream, _):
            async with ClientSession(read_stream, write_stream) as session:
                await session.initialize()
                result = await session.send_request(
                    types.ClientRequest(
                        types.CallToolRequest(
                            params=types.CallToolRequestParams(
                                name=name,
                                arguments=arguments,
                            )
                        )
                    ),
                    types.CallToolResult,
                )
                return _extract_text(result)


def _remote() -> tuple[str, float]:
    if os.getenv("MCP_RUN_SYSTEM_TESTS") != "1":
        pytest.skip("Set MCP_RUN_SYSTEM_TESTS=1 to run system tests.")
    url = os.getenv("MCP_REMOTE_URL", "http://localhost:8001/mcp")
    timeout_seconds = float(os.getenv("MCP_REMOTE_TIMEOUT_SECONDS", "60"))
    return url, timeout_seconds


@pytest.mark.system
def test_remote_healthcheck() -> None:
    url, timeout_seconds = _remote()
    expected = os.getenv("MCP_REMOTE_EXPECT", "ok").lower()

    result_text = anyio.run(_run_tool, url, timeout_seconds, "healthcheck", {}).lower()
    assert expected in result_text


@pytest.mark.system
def test_remote_kippenhahn_polynomial() -> None:
    url, timeout_seconds = _remote()
    matrix = _load_matrix_env(os.getenv("MCP_REMOTE_MATRIX"))

    result_text = anyio.run(_run_tool, url, timeout_seconds, "kippenhahn_polynomial", {"matrix": matrix})
    assert "reduced_degree" in result_text
    assert "error" not in result_text


@pytest.mark.system
def test_remote_membership() -> None:
    url, timeout_seconds = _remote()

    result_text = anyio.run(
        _run_tool,
        url,
        timeout_seconds,
        "membership",
        {"matrix": PRINGLE, "k": 2, "a": "0", "b": "0"},
    )
    assert '"status": "member"' in result_text


@pytest.mark.system
def test_remote_numerical_range() -> None:
    url, timeout_seconds = _remote()
    k = int(os.getenv("MCP_REMOTE_K", "2"))
    matrix = _load_matrix_env(os.getenv("MCP_REMOTE_MATRIX"))

    result_text = anyio.run(_run_tool, url, timeout_seconds, "numerical_range", {"matrix": matrix, "k": k})
    assert '"dim"' in result_text


@pytest.mark.system
def test_remote_boundary_polynomial() -> None:
    url, timeout_seconds = _remote()

    result_text = anyio.run(_run_tool, url, timeout_seconds, "boundary_polynomial", {"matrix": PRINGLE})
    assert "singular-line" in result_text


@pytest.mark.system
def test_remote_invalid_matrix_is_reported() -> None:
    url, timeout_seconds = _remote()

    result_text = anyio.run(
        _run_tool, url, timeout_seconds, "kippenhahn_polynomial", {"matrix": {"n": 2, "entries": []}}
    )
    assert "invalid_request" in result_text
