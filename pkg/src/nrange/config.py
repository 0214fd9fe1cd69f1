"""Configuration helpers and logging setup."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from typing import Any

from .errors import ParameterError

DEFAULT_TOL = 1e-9
DEFAULT_SAMPLES = 720
MIN_SAMPLES = 8
DEFAULT_PRECISION = 1e-12
DEFAULT_DIVTOL = 1e-8
DEFAULT_THREADS = 0
DEFAULT_MAX_DUAL_DEGREE = 16
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_TRANSPORT = "stdio"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s - %(message)s"

logger = logging.getLogger("nrange")


def _read_env(name: str, *, default: str | None = None, required: bool = False) -> str:
    value = os.getenv(name, default)
    if value is None:
        if required:
            raise ValueError(f"Missing required environment variable: {name}")
        return ""

    value = value.strip()
    if required and not value:
        raise ValueError(f"Missing required environment variable: {name}")
    return value


def _read_env_int(name: str, *, default: int) -> int:
    raw_value = os.getenv(name)
    if raw_value is None or not raw_value.strip():
        return default
    try:
        return int(raw_value)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer.") from exc


def _read_env_float(name: str, *, default: float) -> float:
    raw_value = os.getenv(name)
    if raw_value is None or not raw_value.strip():
        return default
    try:
        return float(raw_value)
    except ValueError as exc:
        raise ValueError(f"{name} must be a number.") from exc


def _resolve_log_level(level_name: str) -> int:
    value = getattr(logging, level_name.strip().upper(), None)
    if isinstance(value, int):
        return value
    return logging.INFO


def _log_level_name() -> str:
    return _read_env(
        "NRANGE_LOG_LEVEL",
        default=_read_env("MCP_LOG_LEVEL", default=DEFAULT_LOG_LEVEL),
    )


def _configure_logging() -> None:
    configured_level_name = _log_level_name()
    resolved_level = _resolve_log_level(configured_level_name)

    root_logger = logging.getLogger()
    if not root_logger.handlers:
        logging.basicConfig(level=resolved_level, format=LOG_FORMAT)
    root_logger.setLevel(resolved_level)
    logger.setLevel(resolved_level)

    configured_level_raw = getattr(logging, configured_level_name.strip().upper(), None)
    if not isinstance(configured_level_raw, int):
        logger.warning(
            "Invalid NRANGE_LOG_LEVEL=%r. Falling back to INFO.",
            configured_level_name,
        )


def _parse_bool(value: str | None, *, default: bool) -> bool:
    if value is None:
        return default

    normalized = value.strip().lower()
    if normalized in {"1", "true", "yes", "on"}:
        return True
    if normalized in {"0", "false", "no", "off"}:
        return False
    return default


def _worker_count(threads: int) -> int:
    if threads < 0:
        raise ValueError("NRANGE_THREADS must be zero or greater.")
    if threads == 0:
        return os.cpu_count() or 1
    return threads


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs shared by every computation.

    tol is the eigenvalue comparison tolerance, samples the number of
    supporting halfplanes, precision the width of real root isolating
    intervals and divtol the relative remainder bound for floating
    divisibility by a linear form.
    """

    tol: float = DEFAULT_TOL
    samples: int = DEFAULT_SAMPLES
    precision: float = DEFAULT_PRECISION
    divtol: float = DEFAULT_DIVTOL
    threads: int = DEFAULT_THREADS
    outer_check: bool = True
    max_dual_degree: int = DEFAULT_MAX_DUAL_DEGREE

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ParameterError("tol must be greater than zero.")
        if self.samples < MIN_SAMPLES:
            raise ParameterError(f"samples must be at least {MIN_SAMPLES}.")
        if not self.precision > 0:
            raise ParameterError("precision must be greater than zero.")
        if not self.divtol > 0:
            raise ParameterError("divtol must be greater than zero.")
        if self.threads < 0:
            raise ParameterError("threads must be zero or greater.")
        if self.max_dual_degree < 2:
            raise ParameterError("max_dual_degree must be at least 2.")

    @property
    def workers(self) -> int:
        return _worker_count(self.threads)

    def with_overrides(self, **overrides: Any) -> "SolverConfig":
        values = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **values) if values else self

    def echo(self) -> dict[str, Any]:
        return {
            "tol": self.tol,
            "samples": self.samples,
            "precision": self.precision,
            "divtol": self.divtol,
        }


def load_config(**overrides: Any) -> SolverConfig:
    """Build a SolverConfig from NRANGE_* variables, then apply non-None overrides."""
    config = SolverConfig(
        tol=_read_env_float("NRANGE_TOL", default=DEFAULT_TOL),
        samples=_read_env_int("NRANGE_SAMPLES", default=DEFAULT_SAMPLES),
        precision=_read_env_float("NRANGE_PRECISION", default=DEFAULT_PRECISION),
        divtol=_read_env_float("NRANGE_DIVTOL", default=DEFAULT_DIVTOL),
        threads=_read_env_int("NRANGE_THREADS", default=DEFAULT_THREADS),
        outer_check=_parse_bool(os.getenv("NRANGE_OUTER_CHECK"), default=True),
        max_dual_degree=_read_env_int("NRANGE_MAX_DUAL_DEGREE", default=DEFAULT_MAX_DUAL_DEGREE),
    )
    return config.with_overrides(**overrides)


def _fastmcp_host() -> str:
    return _read_env(
        "MCP_HOST",
        default=_read_env("FASTMCP_HOST", default="127.0.0.1"),
    )


def _fastmcp_port() -> int:
    return _read_env_int(
        "MCP_PORT",
        default=_read_env_int("FASTMCP_PORT", default=8000),
    )


def _fastmcp_log_level() -> str:
    level = _log_level_name().strip().upper()
    if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
        return DEFAULT_LOG_LEVEL
    return level


def _resolve_transport() -> str:
    transport = _read_env("MCP_TRANSPORT", default=DEFAULT_TRANSPORT).strip().lower()
    if transport in {"stdio", "sse", "streamable-http"}:
        return transport
    logger.warning("Invalid MCP_TRANSPORT=%r. Falling back to stdio.", transport)
    return DEFAULT_TRANSPORT


__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_SAMPLES",
    "MIN_SAMPLES",
    "DEFAULT_PRECISION",
    "DEFAULT_DIVTOL",
    "DEFAULT_THREADS",
    "DEFAULT_MAX_DUAL_DEGREE",
    "DEFAULT_LOG_LEVEL",
    "DEFAULT_TRANSPORT",
    "LOG_FORMAT",
    "logger",
    "SolverConfig",
    "load_config",
    "_read_env",
    "_read_env_int",
    "_read_env_float",
    "_resolve_log_level",
    "_configure_logging",
    "_parse_bool",
    "_worker_count",
    "_fastmcp_host",
    "_fastmcp_port",
    "_fastmcp_log_level",
    "_resolve_transport",
]
