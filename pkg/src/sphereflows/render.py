"""Static SVG phase portraits.

Rendering is a pure view of an :class:`~sphereflows.analysis.Analysis`: it
reads equilibria and separatrices and, optionally, traces a few ordinary
orbits for context.  Nothing it computes feeds back into the analysis.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .analysis import Analysis
from .field import SpherePoint
from .flow import FlowError, IntegratorConfig, integrate

# glossary color map: red sources and blow-up, blue sinks and blow-down,
# purple saddle connections and centers, black saddles drawn as circles
COLORS = {
    "red": "#d62728",
    "blue": "#1f77b4",
    "purple": "#800080",
    "black": "#000000",
    "orbit": "#b4b4b4",
}

KIND_STYLE = {
    "Source": ("red", True),
    "Sink": ("blue", True),
    "Center": ("purple", True),
    "PoleSaddle": ("black", False),
    "DegeneratePole": ("black", False),
    "DegenerateZero": ("purple", False),
}


@dataclass(frozen=True)
class RenderSpec:
    """What to draw.

    Parameters
    ----------
    view : {"stereographic", "charts"}
        ``stereographic`` draws the plane of the projection from the north
        pole (chart ``W``); ``charts`` draws charts ``W`` and ``Z = 1/W`` side
        by side.
    size : int
        Width and height of one panel in pixels.
    radius : float or None
        Half-width of the visible window; chosen from the equilibria if None.
    density : int
        Ordinary orbits are seeded on a ``density x density`` grid (0 for none).
    """

    view: str = "stereographic"
    size: int = 600
    radius: float | None = None
    density: int = 6
    orbit_time: float = 20.0

    def __post_init__(self):
        if self.view not in ("stereographic", "charts"):
            raise ValueError(f"unknown view {self.view!r}")
        if self.size < 50:
            raise ValueError("size must be at least 50 pixels")


def _auto_radius(analysis: Analysis) -> float:
    finite = [abs(r.location.w) for r in analysis.records if r.location.chart == "W"]
    return max(2.0, 1.3 * max(finite, default=1.0))


def _segments(points: list[SpherePoint], chart: str, radius: float) -> list[list[complex]]:
    """Split a path into runs that stay inside the visible disk of ``chart``."""
    out, cur = [], []
    for p in points:
        v = p.in_chart(chart)
        if math.isfinite(abs(v)) and abs(v) <= radius:
            cur.append(v)
        else:
            if len(cur) > 1:
                out.append(cur)
            cur = []
    if len(cur) > 1:
        out.append(cur)
    return out


class _Panel:
    def __init__(self, root: ET.Element, x0: float, size: int, radius: float, chart: str, title: str):
        self.g = ET.SubElement(root, "g", {"class": f"chart-{chart}"})
        self.x0, self.size, self.radius, self.chart = x0, size, radius, chart
        self.scale = (size / 2 - 10) / radius
        ET.SubElement(
            self.g, "rect", {"x": f"{x0:.2f}", "y": "0", "width": str(size), "height": str(size), "fill": "white", "stroke": "#cccccc"}
        )
        label = ET.SubElement(self.g, "text", {"x": f"{x0 + 8:.2f}", "y": "18", "font-size": "14", "font-family": "sans-serif"})
        label.text = title

    def xy(self, v: complex) -> tuple[float, float]:
        c = self.size / 2
        return self.x0 + c + v.real * self.scale, c - v.imag * self.scale

    def path(self, pts: list[complex], color: str, width: float) -> None:
        coords = " ".join("{:.2f},{:.2f}".format(*self.xy(v)) for v in pts)
        ET.SubElement(
            self.g, "polyline", {"points": coords, "fill": "none", "stroke": COLORS[color], "stroke-width": f"{width}"}
        )

    def marker(self, v: complex, color: str, filled: bool, title: str) -> None:
        x, y = self.xy(v)
        el = ET.SubElement(
            self.g,
            "circle",
            {
                "cx": f"{x:.2f}",
                "cy": f"{y:.2f}",
                "r": "5",
                "fill": COLORS[color] if filled else "white",
                "stroke": COLORS[color],
                "stroke-width": "2",
            },
        )
        ET.SubElement(el, "title").text = title


def _orbits(analysis: Analysis, spec: RenderSpec, radius: float) -> list[tuple[list[SpherePoint], str]]:
    if spec.density <= 0:
        return []
    fld = analysis.field
    cfg = IntegratorConfig(rel_tol=1e-7, max_steps=2000)
    out = []
    grid = np.linspace(-radius, radius, spec.density + 2)[1:-1]
    for x in grid:
        for y in grid:
            w = complex(x, y)
            if any(abs(w - r.location.w) < 1e-3 for r in analysis.records if r.location.chart == "W"):
                continue
            for t in (spec.orbit_time, -spec.orbit_time):
                try:
                    traj = integrate(fld, SpherePoint.from_w(w), t_max=t, cfg=cfg)
                except FlowError:
                    continue
                color = "purple" if traj.verdict.tag == "Periodic" else "orbit"
                out.append(([s.point for s in traj.samples], color))
    return out


def render_svg(analysis: Analysis, spec: RenderSpec | None = None) -> str:
    """Draw equilibria and separatrices; returns the SVG document as text."""
    spec = spec or RenderSpec()
    radius = spec.radius or _auto_radius(analysis)
    charts = [("W", "w-plane (stereographic)")] if spec.view == "stereographic" else [("W", "chart w"), ("Z", "chart z = 1/w")]
    width = spec.size * len(charts)
    root = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": str(width),
            "height": str(spec.size),
            "viewBox": f"0 0 {width} {spec.size}",
        },
    )
    orbits = _orbits(analysis, spec, radius)
    for k, (chart, title) in enumerate(charts):
        panel = _Panel(root, k * spec.size, spec.size, radius, chart, title)
        for pts, color in orbits:
            for seg in _segments(pts, chart, radius):
                panel.path(seg, color, 0.8)
        for sep in analysis.separatrices:
            color = "purple" if sep.suspicions else ("red" if sep.color == "Red" else "blue")
            for seg in _segments([s.point for s in sep.trajectory.samples], chart, radius):
                panel.path(seg, color, 2.0)
        for r in analysis.records:
            v = r.location.in_chart(chart)
            if math.isfinite(abs(v)) and abs(v) <= radius:
                color, filled = KIND_STYLE.get(r.kind, ("black", False))
                panel.marker(v, color, filled, f"{r.id}: {r.kind}")
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"
