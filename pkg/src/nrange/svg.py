"""Deterministic SVG pictures of curves, support polygons and range witnesses."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any

from .errors import DomainError
from .solver import RangeResult
from .support import SupportPolygon

SVG_NS = "http://www.w3.org/2000/svg"
SIZE = 640
MARGIN = 0.1
DIGITS = 6
CURVE_COLOR = "#4c72b0"
REGION_COLOR = "#dd8452"
WITNESS_COLOR = "#c44e52"


def _rounded(value: Any) -> Any:
    if isinstance(value, float):
        value = round(value, DIGITS)
        return int(value) if value.is_integer() else value
    return value


def _props(attributes: dict[str, Any]) -> str:
    return " ".join(f'{key.replace("_", "-")}="{_rounded(value)}"' for key, value in attributes.items())


@dataclass
class Element:
    tag: str
    attributes: dict[str, Any] = field(default_factory=dict)
    children: list["Element"] = field(default_factory=list)
    text: str = ""

    def svg(self) -> str:
        props = _props(self.attributes)
        opening = f"<{self.tag} {props}" if props else f"<{self.tag}"
        if not self.children and not self.text:
            return opening + " />"
        inner = self.text + "".join("\n" + child.svg() for child in self.children)
        closing = "\n" if self.children else ""
        return f"{opening}>{inner}{closing}</{self.tag}>"


@dataclass(frozen=True)
class RangeLayer:
    result: RangeResult
    polygon: SupportPolygon


def _spaced(values: Sequence[Any]) -> str:
    return " ".join(str(_rounded(value)) for value in values)


def _shape(tag: str, points: Sequence[tuple[float, float]], **attributes: Any) -> Element:
    """A polyline or polygon through (a, b) points, with b flipped to screen coordinates."""
    coordinates = " ".join(f"{_rounded(float(a))},{_rounded(-float(b))}" for a, b in points)
    return Element(tag, {"points": coordinates, **attributes})


def _bounds(
    layers: Sequence[RangeLayer], curve: Sequence[Sequence[tuple[float, float]]]
) -> tuple[float, float, float, float]:
    points = [point for layer in layers for point in layer.polygon.vertices]
    points += [point.floats() for layer in layers for point in layer.result.witnesses()]
    points += [point for branch in curve for point in branch]
    if not points:
        return (-1.0, -1.0, 1.0, 1.0)
    a_values = [float(a) for a, _ in points]
    b_values = [float(b) for _, b in points]
    return (min(a_values), min(b_values), max(a_values), max(b_values))


def render_svg(
    layers: Sequence[RangeLayer],
    destination: str | Path | IO[str] | None = None,
    *,
    curve: Sequence[Sequence[tuple[float, float]]] = (),
    n: int | None = None,
) -> str:
    """Draw curve branches as polylines, each Lambda_k polygon filled darker for larger k, witnesses as dots.

    The y axis is flipped so b grows upwards. Returns the SVG text and writes it
    when ``destination`` is given.
    """
    if not layers and not curve:
        raise DomainError("nothing to draw")
    a_min, b_min, a_max, b_max = _bounds(layers, curve)
    span = max(a_max - a_min, b_max - b_min, 1e-9)
    pad = MARGIN * span
    width, height = a_max - a_min + 2 * pad, b_max - b_min + 2 * pad
    scale = max(width, height)
    top = n or max((layer.result.n for layer in layers), default=1)

    root = Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "width": SIZE,
            "height": SIZE,
            "viewBox": _spaced((a_min - pad, -(b_max + pad), width, height)),
        },
    )
    curves = Element("g", {"id": "curve", "fill": "none", "stroke": CURVE_COLOR, "stroke_width": scale / 400})
    for branch in curve:
        if len(branch) > 1:
            curves.children.append(_shape("polyline", branch))
    root.children.append(curves)

    regions = Element("g", {"id": "ranges", "stroke": REGION_COLOR, "stroke_width": scale / 500})
    witnesses = Element("g", {"id": "witnesses", "fill": WITNESS_COLOR})
    legend = Element("g", {"id": "legend", "font_size": scale / 30, "font_family": "sans-serif"})
    ordered = sorted(layers, key=lambda layer: layer.result.k)
    for row, layer in enumerate(ordered):
        k = layer.result.k
        if layer.result.dim >= 1 and not layer.polygon.is_empty:
            opacity = 0.15 + 0.6 * k / max(top, 1)
            regions.children.append(
                _shape("polygon", layer.polygon.vertices, fill=REGION_COLOR, fill_opacity=opacity)
            )
        if layer.result.dim in (0, 1):
            for point in layer.result.witnesses():
                a, b = point.floats()
                witnesses.children.append(Element("circle", {"cx": a, "cy": -b, "r": scale / 150}))
        label = f"Λ_{k} = ∅" if layer.result.dim == -1 else f"Λ_{k}: dim {layer.result.dim}"
        legend.children.append(
            Element(
                "text",
                {"x": a_min - pad + scale / 40, "y": -(b_max + pad) + scale / 20 * (row + 1)},
                text=label,
            )
        )
    root.children.extend([regions, witnesses, legend])
    text = root.svg() + "\n"

    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    elif destination is not None:
        destination.write(text)
    return text


__all__ = ["RangeLayer", "render_svg"]
