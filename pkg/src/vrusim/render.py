"""Top-down SVG snapshots of a simulation step.

A frame shows the road band along the ego path, the V2X awareness zone,
the onboard sensor sector, the ego body as a single ``<rect>`` and each VRU
as a single ``<circle>``. Zones and sectors are drawn as ``<path>`` so that
element counts identify the agents unambiguously.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

from .engine import StepRecord
from .geometry import PathSpec, Vec2, path_point_at
from .scenario import ScenarioSpec

LANE_WIDTH = 7.0  # m, two 3.5 m lanes
VIEW_W, VIEW_H = 100.0, 60.0  # m, window centred on the ego
PX_PER_M = 8.0
SAMPLE_STEP = 0.5  # m between polyline vertices

STYLE = """
.road { fill: none; stroke: #d0d0d0; stroke-linejoin: round; }
.vru-path { fill: none; stroke: #999; stroke-dasharray: 1 1; stroke-width: 0.15; }
.v2x-zone { fill: #4a90d9; fill-opacity: 0.08; stroke: #4a90d9; stroke-width: 0.2; }
.fov { fill: #f5c242; fill-opacity: 0.25; stroke: none; }
.ego { fill: #2f6fb3; stroke: #123; stroke-width: 0.1; }
.vru { fill: #d9534f; stroke: #611; stroke-width: 0.1; }
.vru.exited { fill-opacity: 0.3; }
.label { font: 2px sans-serif; fill: #222; }
"""


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _xy(p: Vec2) -> str:
    # SVG y grows downward; flip so the world y axis points up
    return f"{_fmt(p.x)},{_fmt(-p.y)}"


def _polyline(path: PathSpec) -> str:
    n = max(1, math.ceil(path.length / SAMPLE_STEP))
    pts = [path_point_at(path, path.length * i / n)[0] for i in range(n + 1)]
    return " ".join(_xy(p) for p in pts)


def _circle_path(c: Vec2, r: float) -> str:
    a, b = c + Vec2(r, 0.0), c - Vec2(r, 0.0)
    rr = _fmt(r)
    return f"M {_xy(a)} A {rr} {rr} 0 1 0 {_xy(b)} A {rr} {rr} 0 1 0 {_xy(a)} Z"


def _sector_path(apex: Vec2, heading: float, radius: float, angle: float) -> str:
    if angle >= 2.0 * math.pi:
        return _circle_path(apex, radius)
    left = apex + Vec2.polar(radius, heading + angle / 2.0)
    right = apex + Vec2.polar(radius, heading - angle / 2.0)
    large = 1 if angle > math.pi else 0
    rr = _fmt(radius)
    # world counter-clockwise is the negative-angle direction of the y-down canvas
    return f"M {_xy(apex)} L {_xy(right)} A {rr} {rr} 0 {large} 0 {_xy(left)} Z"


def render_frame(spec: ScenarioSpec, row: StepRecord) -> str:
    """SVG document for one trace row."""
    ego = row.ego
    centre = ego.position + Vec2.polar(spec.ego.body_length / 2.0, ego.heading)
    x0, y0 = centre.x - VIEW_W / 2.0, -centre.y - VIEW_H / 2.0
    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": _fmt(VIEW_W * PX_PER_M),
            "height": _fmt(VIEW_H * PX_PER_M),
            "viewBox": f"{_fmt(x0)} {_fmt(y0)} {_fmt(VIEW_W)} {_fmt(VIEW_H)}",
        },
    )
    ET.SubElement(svg, "style").text = STYLE
    ET.SubElement(svg, "polyline", {"class": "road", "points": _polyline(spec.ego.path), "stroke-width": _fmt(LANE_WIDTH)})
    for vspec in spec.vrus:
        ET.SubElement(svg, "polyline", {"class": "vru-path", "points": _polyline(vspec.path)})
    if spec.v2x.enabled:
        ET.SubElement(svg, "path", {"class": "v2x-zone", "d": _circle_path(spec.v2x.rsu_position, spec.v2x.comm_range)})
    ET.SubElement(
        svg, "path", {"class": "fov", "d": _sector_path(ego.position, ego.heading, spec.sensor.range, spec.sensor.fov_angle)}
    )
    ET.SubElement(
        svg,
        "rect",
        {
            "class": "ego",
            "x": "0",
            "y": _fmt(-spec.ego.body_width / 2.0),
            "width": _fmt(spec.ego.body_length),
            "height": _fmt(spec.ego.body_width),
            "transform": f"translate({_xy(ego.position)}) rotate({_fmt(-math.degrees(ego.heading))})",
        },
    )
    for vru, vspec in zip(row.vrus, spec.vrus):
        ET.SubElement(
            svg,
            "circle",
            {
                "class": "vru exited" if vru.exited else "vru",
                "cx": _fmt(vru.position.x),
                "cy": _fmt(-vru.position.y),
                "r": _fmt(vspec.vru_class.radius),
            },
        )
    label = ET.SubElement(svg, "text", {"class": "label", "x": _fmt(x0 + 1.0), "y": _fmt(y0 + 3.0)})
    label.text = f"t = {row.t:.2f} s  v = {ego.speed:.2f} m/s  {row.planner_mode.value}"
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode", xml_declaration=True) + "\n"
