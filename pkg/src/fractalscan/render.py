"""Curve rendering: a scan order becomes a polyline through cell centers.

SVG is the primary format (crisp at any zoom); PPM is a raster fallback for
viewerless environments. Output bytes are a pure function of the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fractalscan.curves import ScanOrder
from fractalscan.fileio import write_bytes_atomic

FORMATS = ("svg", "ppm")

FAMILY_COLORS = {
    "raster": "#888888",
    "continuous": "#2b8cbe",
    "local": "#7b3294",
    "hilbert": "#d7301f",
    "peano": "#1a9641",
}

_FALLBACK_COLOR = "#333333"
_BACKGROUND = "#ffffff"


@dataclass(frozen=True)
class RenderSpec:
    """How to draw: output format, pixels per grid cell, stroke width in
    pixels, and a family-to-color table."""

    format: str = "svg"
    cell: int = 16
    stroke: float = 2.0
    colors: dict = field(default_factory=lambda: dict(FAMILY_COLORS))

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}; choose from {FORMATS}")
        if int(self.cell) < 1:
            raise ValueError(f"cell size must be >= 1 pixel, got {self.cell}")
        if not float(self.stroke) > 0:
            raise ValueError(f"stroke width must be positive, got {self.stroke}")

    def color_for(self, family: str) -> str:
        return self.colors.get(family, _FALLBACK_COLOR)


def _fmt_coord(v: float) -> str:
    return format(v, ".6g")


def curve_vertices(order: ScanOrder, cell: int) -> np.ndarray:
    """Pixel-space polyline vertices: the center of each cell, in visiting
    order, as an (N, 2) array of (x, y)."""
    coords = order.coords().astype(float)
    xy = np.empty_like(coords)
    xy[:, 0] = (coords[:, 1] + 0.5) * cell
    xy[:, 1] = (coords[:, 0] + 0.5) * cell
    return xy


def render_svg(order: ScanOrder, spec: RenderSpec) -> bytes:
    h, w = order.shape
    width, height = w * spec.cell, h * spec.cell
    pts = curve_vertices(order, spec.cell)
    points = " ".join(f"{_fmt_coord(x)},{_fmt_coord(y)}" for x, y in pts)
    color = spec.color_for(order.family)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n',
        f'  <rect width="{width}" height="{height}" fill="{_BACKGROUND}"/>\n',
        f'  <polyline fill="none" stroke="{color}" '
        f'stroke-width="{_fmt_coord(spec.stroke)}" stroke-linecap="round" '
        f'stroke-linejoin="round" points="{points}"/>\n',
        "</svg>\n",
    ]
    return "".join(parts).encode("ascii")


def _hex_to_rgb(color: str) -> np.ndarray:
    c = color.lstrip("#")
    return np.array([int(c[i:i + 2], 16) for i in (0, 2, 4)], dtype=float) / 255.0


def render_ppm_array(order: ScanOrder, spec: RenderSpec) -> np.ndarray:
    """Raster the polyline onto an RGB canvas by dense sampling of each
    segment (adequate for axis-aligned and short diagonal steps)."""
    h, w = order.shape
    canvas = np.ones((h * spec.cell, w * spec.cell, 3))
    color = _hex_to_rgb(spec.color_for(order.family))
    pts = curve_vertices(order, spec.cell)
    radius = max(0, int(round(spec.stroke / 2)) - 1)
    ymax, xmax = canvas.shape[0] - 1, canvas.shape[1] - 1
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        steps = int(max(abs(x1 - x0), abs(y1 - y0))) * 2 + 1
        xs = np.rint(np.linspace(x0, x1, steps)).astype(int)
        ys = np.rint(np.linspace(y0, y1, steps)).astype(int)
        for dy in range(-radius, radius + 1):
            for dx in range(-radius, radius + 1):
                canvas[np.clip(ys + dy, 0, ymax), np.clip(xs + dx, 0, xmax)] = color
    if len(pts) == 1:
        y, x = int(pts[0, 1]), int(pts[0, 0])
        canvas[max(0, y - radius):y + radius + 1, max(0, x - radius):x + radius + 1] = color
    return canvas


def render_curve(order: ScanOrder, spec: RenderSpec | None = None,
                 path=None) -> bytes:
    """Draw the order and return the encoded bytes; also writes them to
    `path` when given (atomically)."""
    spec = spec or RenderSpec()
    if spec.format == "svg":
        data = render_svg(order, spec)
        if path is not None:
            write_bytes_atomic(path, data)
        return data
    canvas = render_ppm_array(order, spec)
    hh, ww = canvas.shape[:2]
    quantized = np.rint(np.clip(canvas, 0.0, 1.0) * 255).astype(np.uint8)
    data = f"P6\n{ww} {hh}\n255\n".encode("ascii") + quantized.tobytes()
    if path is not None:
        write_bytes_atomic(path, data)
    return data
