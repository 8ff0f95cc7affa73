"""Scenario and agent descriptions, TOML ingestion, and the built-in test cases.

Scenario files are TOML with SI units throughout except angles, which are
written in degrees and held in radians once loaded. The schema is documented
in ``docs/scenario-format.md``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import Any

import tomli
import tomli_w

from .errors import ParseError, UnknownField, UnknownScenario, ValidationError
from .geometry import C0_TOLERANCE, Arc, Line, PathSpec, Vec2, distance


class VruKind(str, Enum):
    PEDESTRIAN = "pedestrian"
    ESCOOTER = "escooter"
    MOTORCYCLIST = "motorcyclist"


class RoadLayout(str, Enum):
    STRAIGHT = "straight"
    INTERSECTION = "intersection"


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValidationError(name, "must be > 0")


@dataclass(frozen=True)
class VruClass:
    kind: VruKind
    v_max: float
    radius: float
    a_max: float
    mass: float

    def __post_init__(self):
        for name in ("v_max", "radius", "a_max", "mass"):
            _require_positive(name, getattr(self, name))


VRU_CLASSES: dict[VruKind, VruClass] = {
    VruKind.PEDESTRIAN: VruClass(VruKind.PEDESTRIAN, v_max=1.8, radius=0.5, a_max=1.5, mass=75.0),
    VruKind.ESCOOTER: VruClass(VruKind.ESCOOTER, v_max=13.4, radius=1.0, a_max=2.5, mass=100.0),
    VruKind.MOTORCYCLIST: VruClass(VruKind.MOTORCYCLIST, v_max=30.0, radius=1.5, a_max=2.1, mass=250.0),
}


@dataclass(frozen=True)
class VruSpec:
    vru_class: VruClass
    init_position: Vec2
    target_speed: float
    path: PathSpec
    start_time: float = 0.0

    def __post_init__(self):
        _require_positive("target_speed", self.target_speed)
        if self.target_speed > self.vru_class.v_max:
            raise ValidationError("target_speed", f"must be <= v_max ({self.vru_class.v_max})")
        if distance(self.init_position, self.path.start) >= C0_TOLERANCE:
            raise ValidationError("init_position", "must lie on the path start")
        if not self.start_time >= 0:
            raise ValidationError("start_time", "must be >= 0")


@dataclass(frozen=True)
class EgoSpec:
    init_position: Vec2
    init_heading: float
    cruise_speed: float
    path: PathSpec
    wheelbase: float = 2.8
    body_length: float = 4.8
    body_width: float = 1.8

    def __post_init__(self):
        for name in ("cruise_speed", "wheelbase", "body_length", "body_width"):
            _require_positive(name, getattr(self, name))
        if not self.wheelbase < self.body_length:
            raise ValidationError("wheelbase", "must be < body_length")


@dataclass(frozen=True)
class SensorSpec:
    range: float = 20.0
    fov_angle: float = math.radians(120.0)

    def __post_init__(self):
        _require_positive("range", self.range)
        if not 0 < self.fov_angle <= 2 * math.pi:
            raise ValidationError("fov_angle", "must be in (0, 360] degrees")


@dataclass(frozen=True)
class V2xSpec:
    enabled: bool = False
    rsu_position: Vec2 = Vec2(0.0, 0.0)
    comm_range: float = 40.0

    def __post_init__(self):
        # zero range is allowed so that range sweeps can start from "no zone"
        if not self.comm_range >= 0:
            raise ValidationError("comm_range", "must be >= 0")


@dataclass(frozen=True)
class PlannerParams:
    time_headway: float = 2.0
    a_pre: float = -1.5
    a_emergency: float = -6.0
    a_cruise_max: float = 2.0
    k_speed: float = 0.5
    pass_hysteresis: float = 1.0

    def __post_init__(self):
        _require_positive("time_headway", self.time_headway)
        if not self.a_emergency < self.a_pre < 0 < self.a_cruise_max:
            raise ValidationError("a_pre", "requires a_emergency < a_pre < 0 < a_cruise_max")
        _require_positive("k_speed", self.k_speed)
        if not self.pass_hysteresis >= 0:
            raise ValidationError("pass_hysteresis", "must be >= 0")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    ego: EgoSpec
    vrus: tuple[VruSpec, ...]
    sensor: SensorSpec = field(default_factory=SensorSpec)
    v2x: V2xSpec = field(default_factory=V2xSpec)
    planner: PlannerParams = field(default_factory=PlannerParams)
    dt: float = 0.01
    t_max: float = 20.0
    road_layout: RoadLayout = RoadLayout.STRAIGHT

    def __post_init__(self):
        object.__setattr__(self, "vrus", tuple(self.vrus))
        _require_positive("dt", self.dt)
        if not self.t_max > self.dt:
            raise ValidationError("t_max", "must be > dt")
        if not self.vrus:
            raise ValidationError("vru", "at least one VRU is required")

    def with_v2x(self, enabled: bool) -> ScenarioSpec:
        return replace(self, v2x=replace(self.v2x, enabled=enabled))


# ---------------------------------------------------------------- ingestion


class _Table:
    """Strict view of a TOML table: every key must be consumed exactly once."""

    def __init__(self, data: Any, where: str):
        if not isinstance(data, dict):
            raise ValidationError(where, "must be a table")
        self.data = dict(data)
        self.where = where

    def _key(self, key: str) -> str:
        return f"{self.where}.{key}" if self.where else key

    def has(self, key: str) -> bool:
        return key in self.data

    def raw(self, key: str, default: Any = ...) -> Any:
        if key in self.data:
            return self.data.pop(key)
        if default is ...:
            raise ValidationError(self._key(key), "is required")
        return default

    def number(self, key: str, default: Any = ...) -> float:
        v = self.raw(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValidationError(self._key(key), f"must be a number, got {v!r}")
        if not math.isfinite(v):
            raise ValidationError(self._key(key), "must be finite")
        return float(v)

    def flag(self, key: str, default: Any = ...) -> bool:
        v = self.raw(key, default)
        if not isinstance(v, bool):
            raise ValidationError(self._key(key), f"must be true or false, got {v!r}")
        return v

    def text(self, key: str, default: Any = ...) -> str:
        v = self.raw(key, default)
        if not isinstance(v, str):
            raise ValidationError(self._key(key), f"must be a string, got {v!r}")
        return v

    def vec2(self, key: str, default: Any = ...) -> Vec2:
        v = self.raw(key, default)
        if isinstance(v, Vec2):
            return v
        if (
            not isinstance(v, list)
            or len(v) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v)
        ):
            raise ValidationError(self._key(key), f"must be a pair of numbers [x, y], got {v!r}")
        try:
            return Vec2(float(v[0]), float(v[1]))
        except ValidationError:
            raise ValidationError(self._key(key), "must be finite") from None

    def sub(self, key: str) -> _Table:
        return _Table(self.raw(key, {}), self._key(key))

    def finish(self) -> None:
        if self.data:
            raise UnknownField(self._key(sorted(self.data)[0]))


def _build(where: str, factory, **kwargs):
    """Construct a spec object, prefixing any validation failure with ``where``."""
    try:
        return factory(**kwargs)
    except ValidationError as exc:
        raise ValidationError(f"{where}.{exc.field}" if where else exc.field, exc.message) from None


def _parse_path(raw: Any, where: str) -> PathSpec:
    if not isinstance(raw, list) or not raw:
        raise ValidationError(where, "must be a non-empty array of segment tables")
    segments = []
    for i, item in enumerate(raw):
        t = _Table(item, f"{where}[{i}]")
        kind = t.text("type")
        if kind == "line":
            segments.append(Line(t.vec2("start"), t.vec2("end")))
        elif kind == "arc":
            radius = t.number("radius")
            segments.append(
                Arc(
                    t.vec2("center"),
                    radius,
                    math.radians(t.number("start_angle")),
                    math.radians(t.number("sweep")),
                )
            )
        else:
            raise ValidationError(f"{where}[{i}].type", f"must be 'line' or 'arc', got {kind!r}")
        t.finish()
    try:
        return PathSpec(tuple(segments))
    except ValidationError as exc:
        raise ValidationError(where + exc.field.removeprefix("path"), exc.message) from None


def _parse_vru(raw: Any, where: str) -> VruSpec:
    t = _Table(raw, where)
    kind_name = t.text("class")
    try:
        kind = VruKind(kind_name)
    except ValueError:
        choices = ", ".join(k.value for k in VruKind)
        raise ValidationError(f"{where}.class", f"must be one of {choices}, got {kind_name!r}") from None
    base = VRU_CLASSES[kind]
    vru_class = _build(
        where,
        VruClass,
        kind=kind,
        v_max=t.number("v_max", base.v_max),
        radius=t.number("radius", base.radius),
        a_max=t.number("a_max", base.a_max),
        mass=t.number("mass", base.mass),
    )
    init_position = t.vec2("init_position")
    target_speed = t.number("target_speed")
    start_time = t.number("start_time", 0.0)
    path = _parse_path(t.raw("path"), f"{where}.path")
    t.finish()
    return _build(
        where,
        VruSpec,
        vru_class=vru_class,
        init_position=init_position,
        target_speed=target_speed,
        path=path,
        start_time=start_time,
    )


def _parse_ego(t: _Table) -> EgoSpec:
    d = EgoSpec.__dataclass_fields__
    kwargs = dict(
        init_position=t.vec2("init_position"),
        init_heading=math.radians(t.number("init_heading", 0.0)),
        cruise_speed=t.number("cruise_speed"),
        wheelbase=t.number("wheelbase", d["wheelbase"].default),
        body_length=t.number("body_length", d["body_length"].default),
        body_width=t.number("body_width", d["body_width"].default),
    )
    kwargs["path"] = _parse_path(t.raw("path"), "ego.path")
    t.finish()
    return _build("ego", EgoSpec, **kwargs)


def from_document(doc: dict) -> ScenarioSpec:
    top = _Table(doc, "")
    name = top.text("name", "scenario")
    layout_name = top.text("road_layout", RoadLayout.STRAIGHT.value)
    try:
        layout = RoadLayout(layout_name)
    except ValueError:
        raise ValidationError("road_layout", f"must be 'straight' or 'intersection', got {layout_name!r}") from None

    if not top.has("ego"):
        raise ValidationError("ego", "table is required")
    ego = _parse_ego(top.sub("ego"))

    raw_vrus = top.raw("vru", [])
    if not isinstance(raw_vrus, list):
        raise ValidationError("vru", "must be an array of tables ([[vru]])")
    vrus = tuple(_parse_vru(v, f"vru[{i}]") for i, v in enumerate(raw_vrus))

    s = top.sub("sensor")
    sd = SensorSpec()
    sensor = _build(
        "sensor",
        SensorSpec,
        range=s.number("range", sd.range),
        fov_angle=math.radians(s.number("fov_angle", math.degrees(sd.fov_angle))),
    )
    s.finish()

    v = top.sub("v2x")
    vd = V2xSpec()
    v2x = _build(
        "v2x",
        V2xSpec,
        enabled=v.flag("enabled", vd.enabled),
        rsu_position=v.vec2("rsu_position", vd.rsu_position),
        comm_range=v.number("comm_range", vd.comm_range),
    )
    v.finish()

    p = top.sub("planner")
    pd = PlannerParams()
    planner = _build(
        "planner",
        PlannerParams,
        **{name: p.number(name, getattr(pd, name)) for name in PlannerParams.__dataclass_fields__},
    )
    p.finish()

    m = top.sub("sim")
    dt = m.number("dt", 0.01)
    t_max = m.number("t_max", 20.0)
    m.finish()
    top.finish()

    return _build(
        "",
        ScenarioSpec,
        name=name,
        ego=ego,
        vrus=vrus,
        sensor=sensor,
        v2x=v2x,
        planner=planner,
        dt=dt,
        t_max=t_max,
        road_layout=layout,
    )


def load_scenario(source: str) -> ScenarioSpec:
    """Parse and validate scenario TOML text, filling defaults for omitted fields."""
    try:
        doc = tomli.loads(source)
    except tomli.TOMLDecodeError as exc:
        raise ParseError(exc.msg if hasattr(exc, "msg") else str(exc), getattr(exc, "lineno", None)) from None
    return from_document(doc)


def load_scenario_file(path) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        return load_scenario(fh.read())


# ------------------------------------------------------------ serialization


def _degrees(rad: float) -> float:
    """Shortest degree value that converts back to exactly ``rad``."""
    approx = math.degrees(rad)
    for digits in range(1, 18):
        d = float(f"{approx:.{digits}g}")
        if math.radians(d) == rad:
            return d
    d = approx
    for _ in range(8):
        up, down = math.nextafter(d, math.inf), math.nextafter(d, -math.inf)
        for cand in (up, down):
            if math.radians(cand) == rad:
                return cand
        d = up
    return approx


def _vec(v: Vec2) -> list[float]:
    return [v.x, v.y]


def _path_doc(path: PathSpec) -> list[dict]:
    out = []
    for seg in path.segments:
        if isinstance(seg, Line):
            out.append({"type": "line", "start": _vec(seg.start), "end": _vec(seg.end)})
        else:
            out.append(
                {
                    "type": "arc",
                    "center": _vec(seg.center),
                    "radius": seg.radius,
                    "start_angle": _degrees(seg.start_angle),
                    "sweep": _degrees(seg.sweep),
                }
            )
    return out


def to_document(spec: ScenarioSpec) -> dict:
    ego = spec.ego
    return {
        "name": spec.name,
        "road_layout": spec.road_layout.value,
        "sim": {"dt": spec.dt, "t_max": spec.t_max},
        "ego": {
            "init_position": _vec(ego.init_position),
            "init_heading": _degrees(ego.init_heading),
            "cruise_speed": ego.cruise_speed,
            "wheelbase": ego.wheelbase,
            "body_length": ego.body_length,
            "body_width": ego.body_width,
            "path": _path_doc(ego.path),
        },
        "vru": [
            {
                "class": v.vru_class.kind.value,
                "init_position": _vec(v.init_position),
                "target_speed": v.target_speed,
                "start_time": v.start_time,
                "v_max": v.vru_class.v_max,
                "radius": v.vru_class.radius,
                "a_max": v.vru_class.a_max,
                "mass": v.vru_class.mass,
                "path": _path_doc(v.path),
            }
            for v in spec.vrus
        ],
        "sensor": {"range": spec.sensor.range, "fov_angle": _degrees(spec.sensor.fov_angle)},
        "v2x": {
            "enabled": spec.v2x.enabled,
            "rsu_position": _vec(spec.v2x.rsu_position),
            "comm_range": spec.v2x.comm_range,
        },
        "planner": {name: getattr(spec.planner, name) for name in PlannerParams.__dataclass_fields__},
    }


def dump_scenario(spec: ScenarioSpec) -> str:
    return tomli_w.dumps(to_document(spec))


# ---------------------------------------------------------------- built-ins

BUILTIN_NAMES = ("ped_crossing", "escooter_leading", "moto_crossing")


def builtin_source(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise UnknownScenario(name)
    return resources.files("vrusim").joinpath(f"scenarios/{name}.toml").read_text(encoding="utf-8")


def builtin_scenario(name: str, v2x_enabled: bool = False) -> ScenarioSpec:
    """One of the three reference test cases, with V2X switched as requested."""
    return load_scenario(builtin_source(name)).with_v2x(v2x_enabled)
