"""Real points of V(f_A) in an affine chart, for CSV export and plots."""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np
import sympy

from .errors import DomainError, ParameterError
from .kippenhahn import KippenhahnData
from .pencil import MIN_OK_SAMPLES, eigenvalues
from .polynomials import float_eval

CHARTS = ("t", "x", "y")
RESIDUAL_BOUND = 1e-8
CHART_BOUND = 1e3
NEWTON_STEPS = 8


@dataclass(frozen=True)
class CurveBranch:
    """Consecutive samples of one eigenvalue branch; ``index`` is j in lambda_j."""

    index: int
    points: tuple[tuple[float, float], ...]


def _chart_name(chart: str) -> str:
    name = chart.split("=", 1)[0].strip()
    if name not in CHARTS:
        raise DomainError(f"chart must be one of t=1, x=1, y=1, got {chart!r}")
    return name


def _polish(
    poly: sympy.Poly, gradient: tuple[sympy.Poly, sympy.Poly], point: tuple[float, float]
) -> tuple[float, float] | None:
    u, v = point
    for _ in range(NEWTON_STEPS):
        value = float_eval(poly, (u, v))
        if abs(value) <= RESIDUAL_BOUND:
            return (u, v)
        du, dv = (float_eval(part, (u, v)) for part in gradient)
        norm = du * du + dv * dv
        if norm == 0.0:
            return None
        u, v = u - value * du / norm, v - value * dv / norm
    return (u, v) if abs(float_eval(poly, (u, v))) <= RESIDUAL_BOUND else None


def sample_curve(data: KippenhahnData, chart: str = "t=1", m: int = 720) -> list[CurveBranch]:
    """Branches of real points of V(f_A) in the chart t=1, x=1 or y=1.

    Every real point with (x, y) != 0 is a multiple of
    (lambda_j(theta), -cos(theta), -sin(theta)); the samples are moved into the
    chart, Newton-polished and kept only when |f_A| <= 1e-8 there.
    """
    if m < MIN_OK_SAMPLES:
        raise ParameterError(f"sample count must be at least {MIN_OK_SAMPLES}, got {m}")
    name = _chart_name(chart)
    index = CHARTS.index(name)
    poly = data.f.dehomogenize(name)
    gradient = (poly.diff(poly.gens[0]), poly.diff(poly.gens[1]))

    runs: dict[int, list[list[tuple[float, float]]]] = {j: [[]] for j in range(1, data.n + 1)}
    for step in range(m):
        theta = 2 * math.pi * step / m
        x, y = -math.cos(theta), -math.sin(theta)
        values = eigenvalues(data.pair, -x, -y)
        for j, value in enumerate(values, start=1):
            projective = (float(value), x, y)
            pivot = projective[index]
            point = None
            if abs(pivot) > 1 / CHART_BOUND:
                u, v = (coordinate / pivot for position, coordinate in enumerate(projective) if position != index)
                if abs(u) <= CHART_BOUND and abs(v) <= CHART_BOUND:
                    point = _polish(poly, gradient, (u, v))
            if point is None:
                if runs[j][-1]:
                    runs[j].append([])
                continue
            runs[j][-1].append(point)

    branches = [
        CurveBranch(j, tuple(run)) for j in sorted(runs) for run in runs[j] if run
    ]
    return branches


def curve_residuals(data: KippenhahnData, chart: str, branches: Sequence[CurveBranch]) -> np.ndarray:
    poly = data.f.dehomogenize(_chart_name(chart))
    return np.array([abs(float_eval(poly, point)) for branch in branches for point in branch.points])


def write_curve_csv(branches: Sequence[CurveBranch], destination: str | Path | IO[str]) -> None:
    """Rows ``branch,segment,u,v``; u and v are the two remaining chart coordinates."""

    def emit(handle: IO[str]) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["branch", "segment", "u", "v"])
        for segment, branch in enumerate(branches):
            for u, v in branch.points:
                writer.writerow([branch.index, segment, repr(u), repr(v)])

    if isinstance(destination, (str, Path)):
        with Path(destination).open("w", encoding="utf-8", newline="") as handle:
            emit(handle)
    else:
        emit(destination)


__all__ = ["CHARTS", "CurveBranch", "sample_curve", "curve_residuals", "write_curve_csv"]
