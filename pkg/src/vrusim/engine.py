"""Fixed-step closed-loop simulation of one scenario."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .awareness import Detection, Source, perceive, v2x_aware
from .geometry import OrientedBox, Vec2
from .motion import EgoState, VruState, initial_ego_state, initial_vru_state, step_ego, step_vru
from .planner import Mode, PlannerState, is_conflicting, plan
from .scenario import EgoSpec, ScenarioSpec


class Outcome(str, Enum):
    COLLISION = "Collision"
    COMPLETED = "Completed"
    TIMEOUT = "Timeout"


class EventKind(str, Enum):
    FIRST_ONBOARD_DETECTION = "FirstOnboardDetection"
    V2X_ZONE_ENTRY = "V2xZoneEntry"
    MODE_CHANGE = "ModeChange"
    COLLISION = "Collision"
    VRU_PASSED = "VruPassed"
    TRIP_COMPLETE = "TripComplete"


@dataclass(frozen=True)
class StepRecord:
    t: float
    ego: EgoState
    planner_mode: Mode
    accel_cmd: float
    vrus: tuple[VruState, ...]
    detections: tuple[Detection, ...]
    ttc: Optional[float]


@dataclass(frozen=True)
class SimEvent:
    t: float
    kind: EventKind
    detail: str = ""


@dataclass
class SimResult:
    outcome: Outcome
    trace: list[StepRecord]
    events: list[SimEvent] = field(default_factory=list)
    trip_time: Optional[float] = None
    min_ttc: Optional[float] = None

    def first_event(self, kind: EventKind) -> Optional[SimEvent]:
        return next((e for e in self.events if e.kind is kind), None)

    @property
    def collision_time(self) -> Optional[float]:
        e = self.first_event(EventKind.COLLISION)
        return None if e is None else e.t


def ego_box(ego: EgoState, spec: EgoSpec) -> OrientedBox:
    return OrientedBox(ego.position, ego.heading, spec.body_length, spec.body_width)


def ego_center(ego: EgoState, spec: EgoSpec) -> Vec2:
    return ego.position + Vec2(math.cos(ego.heading), math.sin(ego.heading)) * (spec.body_length / 2.0)


def ego_velocity(ego: EgoState) -> Vec2:
    return Vec2(math.cos(ego.heading), math.sin(ego.heading)) * ego.speed


def check_collision(ego: EgoState, ego_spec: EgoSpec, vru: VruState, radius: float) -> bool:
    return ego_box(ego, ego_spec).distance_to(vru.position) <= radius


def _ray_box_entry(q: Vec2, u: Vec2, lo: Vec2, hi: Vec2) -> Optional[float]:
    """First t >= 0 at which ``q + u t`` lies in the axis-aligned box, by the slab method."""
    t0, t1 = 0.0, math.inf
    for p, d, a, b in ((q.x, u.x, lo.x, hi.x), (q.y, u.y, lo.y, hi.y)):
        if d == 0.0:
            if p < a or p > b:
                return None
            continue
        ta, tb = (a - p) / d, (b - p) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
        if t0 > t1:
            return None
    return t0


def _ray_disc_entry(q: Vec2, u: Vec2, c: Vec2, r: float) -> Optional[float]:
    dp = q - c
    cc = dp.dot(dp) - r * r
    if cc <= 0.0:
        return 0.0
    a = u.dot(u)
    b = 2.0 * dp.dot(u)
    if a == 0.0 or b >= 0.0:
        return None
    disc = b * b - 4.0 * a * cc
    if disc < 0.0:
        return None
    # smaller root, written to avoid cancellation when |b| dominates
    return 2.0 * cc / (-b + math.sqrt(disc))


def ttc(ego: EgoState, ego_spec: EgoSpec, vru: VruState, radius: float) -> Optional[float]:
    """Time until the VRU disc touches the ego body if both keep their velocities.

    Works in the ego frame, where the VRU centre moves on a straight line
    and contact means entering the body rectangle grown by ``radius`` (two
    slabs plus four corner discs). Returns 0 when already in contact and
    None when the line misses.
    """
    length, half_w = ego_spec.body_length, ego_spec.body_width / 2.0
    q = vru.position.to_local(ego.position, ego.heading)
    u = (vru.velocity - ego_velocity(ego)).rotated(-ego.heading)
    if OrientedBox(Vec2(0.0, 0.0), 0.0, length, 2.0 * half_w).distance_to(q) <= radius:
        return 0.0
    hits = [
        _ray_box_entry(q, u, Vec2(-radius, -half_w), Vec2(length + radius, half_w)),
        _ray_box_entry(q, u, Vec2(0.0, -half_w - radius), Vec2(length, half_w + radius)),
    ]
    hits += [_ray_disc_entry(q, u, Vec2(cx, cy), radius) for cx in (0.0, length) for cy in (-half_w, half_w)]
    found = [h for h in hits if h is not None]
    return min(found) if found else None


class _Recorder:
    """Collects trace rows and emits the one-shot events."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.trace: list[StepRecord] = []
        self.events: list[SimEvent] = []
        self.seen_onboard = False
        self.seen_zone = False
        self.passed: set[int] = set()
        self.mode = Mode.CRUISE

    def observe(self, t: float, ego: EgoState, vrus, detections, planner_state: PlannerState) -> None:
        if not self.seen_zone and v2x_aware(ego, self.spec.v2x):
            self.seen_zone = True
            self.events.append(SimEvent(t, EventKind.V2X_ZONE_ENTRY, "ego entered the V2X awareness zone"))
        onboard = [d for d in detections if d.source is Source.ONBOARD]
        if onboard and not self.seen_onboard:
            self.seen_onboard = True
            self.events.append(
                SimEvent(t, EventKind.FIRST_ONBOARD_DETECTION, f"vru {onboard[0].vru_index} entered the sensor sector")
            )
        if planner_state.mode is not self.mode:
            self.events.append(
                SimEvent(t, EventKind.MODE_CHANGE, f"{self.mode.value} -> {planner_state.mode.value}")
            )
            self.mode = planner_state.mode
        for i, vru in enumerate(vrus):
            if i in self.passed:
                continue
            probe = Detection(i, vru.position, vru.velocity, Source.ONBOARD)
            if vru.exited:
                self.passed.add(i)
                self.events.append(SimEvent(t, EventKind.VRU_PASSED, f"vru {i} left the scene"))
            elif not is_conflicting(ego, probe, self.spec.planner.pass_hysteresis):
                self.passed.add(i)
                self.events.append(SimEvent(t, EventKind.VRU_PASSED, f"vru {i} is behind the ego"))


def _min_ttc(spec: ScenarioSpec, ego: EgoState, vrus) -> Optional[float]:
    best = None
    for vru, vspec in zip(vrus, spec.vrus):
        if vru.exited:
            continue
        value = ttc(ego, spec.ego, vru, vspec.vru_class.radius)
        if value is not None and (best is None or value < best):
            best = value
    return best


def run(spec: ScenarioSpec) -> SimResult:
    """Simulate ``spec`` from t = 0 until collision, trip completion, or ``t_max``.

    Each step perceives and plans on the current states, then advances the
    ego and every VRU, then checks for contact. Row k of the trace holds the
    states at ``k * dt`` together with the command chosen from them.
    """
    dt = spec.dt
    n_max = int(math.floor(spec.t_max / dt + 1e-9))
    ego = initial_ego_state(spec.ego)
    vrus = tuple(initial_vru_state(v) for v in spec.vrus)
    planner_state = PlannerState()
    rec = _Recorder(spec)
    path_len = spec.ego.path.length

    k = 0
    outcome = Outcome.TIMEOUT
    colliders: list[int] = []
    while True:
        t = k * dt
        detections = perceive(ego, vrus, spec.sensor, spec.v2x)
        planner_state, accel = plan(planner_state, ego, spec.ego, detections, spec.vrus, spec.planner)
        rec.observe(t, ego, vrus, detections, planner_state)
        step_ttc = 0.0 if colliders else _min_ttc(spec, ego, vrus)
        rec.trace.append(StepRecord(t, ego, planner_state.mode, accel, vrus, tuple(detections), step_ttc))

        if colliders:
            outcome = Outcome.COLLISION
            rec.events.append(SimEvent(t, EventKind.COLLISION, "ego contacted vru " + ", ".join(map(str, colliders))))
            break
        if ego.path_progress >= path_len:
            outcome = Outcome.COMPLETED
            rec.events.append(SimEvent(t, EventKind.TRIP_COMPLETE, f"ego reached the path end ({path_len:.2f} m)"))
            break
        if k >= n_max:
            break

        ego = step_ego(ego, accel, spec.ego, dt)
        vrus = tuple(step_vru(v, vs, t, dt) for v, vs in zip(vrus, spec.vrus))
        k += 1
        colliders = [
            i
            for i, (v, vs) in enumerate(zip(vrus, spec.vrus))
            if not v.exited and check_collision(ego, spec.ego, v, vs.vru_class.radius)
        ]

    finite = [r.ttc for r in rec.trace if r.ttc is not None]
    return SimResult(
        outcome=outcome,
        trace=rec.trace,
        events=rec.events,
        trip_time=rec.trace[-1].t if outcome is Outcome.COMPLETED else None,
        min_ttc=min(finite) if finite else None,
    )
