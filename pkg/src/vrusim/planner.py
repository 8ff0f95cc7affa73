"""Rule-based collision-avoidance planner with three longitudinal modes.

Cruise tracks the desired speed. Once a perceived VRU is both ahead (not yet
passed) and approaching (range not opening), the planner pre-decelerates
gently while it is farther than the time-headway safe distance and brakes
hard otherwise. It returns to Cruise when no such VRU remains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .awareness import Detection
from .geometry import Vec2, distance
from .motion import EgoState
from .scenario import EgoSpec, PlannerParams, VruSpec


class Mode(str, Enum):
    CRUISE = "Cruise"
    PRE_SLOW = "PreSlow"
    EMERGENCY_BRAKE = "EmergencyBrake"


@dataclass(frozen=True)
class PlannerState:
    mode: Mode = Mode.CRUISE
    engaged_vru: Optional[int] = None

    def __post_init__(self):
        if (self.engaged_vru is None) != (self.mode is Mode.CRUISE):
            raise ValueError("engaged_vru must be set exactly when mode is not Cruise")


def safe_distance(v: float, params: PlannerParams) -> float:
    return params.time_headway * v


def gap_to(ego: EgoState, spec: EgoSpec, det: Detection, vru_radius: float) -> float:
    """Clearance from the body centre less half a body length, so roughly bumper to VRU edge."""
    heading = Vec2(math.cos(ego.heading), math.sin(ego.heading))
    centre = ego.position + heading * (spec.body_length / 2.0)
    return max(0.0, distance(centre, det.position) - vru_radius - spec.body_length / 2.0)


def is_conflicting(ego: EgoState, det: Detection, pass_hysteresis: float = 1.0) -> bool:
    """False once the VRU is more than ``pass_hysteresis`` behind the rear axle."""
    longitudinal = det.position.to_local(ego.position, ego.heading).x
    return longitudinal >= -pass_hysteresis


def is_approaching(ego: EgoState, det: Detection) -> bool:
    """True unless the range between ego and VRU is strictly opening."""
    heading = Vec2(math.cos(ego.heading), math.sin(ego.heading))
    rel_v = det.velocity - heading * ego.speed
    return (det.position - ego.position).dot(rel_v) <= 0.0


def cruise_accel(ego: EgoState, spec: EgoSpec, params: PlannerParams) -> float:
    a = params.k_speed * (spec.cruise_speed - ego.speed)
    return min(max(a, -abs(params.a_pre)), params.a_cruise_max)


def plan(
    state: PlannerState,
    ego: EgoState,
    ego_spec: EgoSpec,
    detections: Sequence[Detection],
    vru_specs: Sequence[VruSpec],
    params: PlannerParams,
) -> tuple[PlannerState, float]:
    del state  # the mode follows from the current detections alone
    best: Optional[tuple[float, int]] = None
    for det in detections:
        if not (is_conflicting(ego, det, params.pass_hysteresis) and is_approaching(ego, det)):
            continue
        gap = gap_to(ego, ego_spec, det, vru_specs[det.vru_index].vru_class.radius)
        key = (gap, det.vru_index)
        if best is None or key < best:
            best = key

    if best is None:
        return PlannerState(Mode.CRUISE), cruise_accel(ego, ego_spec, params)
    gap, index = best
    if gap > safe_distance(ego.speed, params):
        return PlannerState(Mode.PRE_SLOW, index), params.a_pre
    return PlannerState(Mode.EMERGENCY_BRAKE, index), params.a_emergency
