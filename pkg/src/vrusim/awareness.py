"""Onboard sector sensing and the idealized roadside V2X channel."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .geometry import Vec2, distance
from .motion import EgoState, VruState
from .scenario import SensorSpec, V2xSpec

BOUNDARY_EPS = 1e-9  # slack on the closed sector so exact-edge points survive rounding


class Source(str, Enum):
    ONBOARD = "onboard"
    V2X = "v2x"


@dataclass(frozen=True)
class Detection:
    vru_index: int
    position: Vec2
    velocity: Vec2
    source: Source


def in_fov(ego: EgoState, sensor: SensorSpec, p: Vec2) -> bool:
    """Closed sector test: within ``range`` and within half the cone angle of the heading."""
    rel = p - ego.position
    r = rel.norm()
    if r > sensor.range + BOUNDARY_EPS:
        return False
    if r == 0.0:
        return True
    local = rel.rotated(-ego.heading)
    bearing = abs(math.atan2(local.y, local.x))
    return bearing <= sensor.fov_angle / 2.0 + BOUNDARY_EPS


def v2x_aware(ego: EgoState, v2x: V2xSpec) -> bool:
    return v2x.enabled and distance(ego.position, v2x.rsu_position) <= v2x.comm_range


def perceive(
    ego: EgoState, vrus: Sequence[VruState], sensor: SensorSpec, v2x: V2xSpec
) -> list[Detection]:
    """Fused detections, one per VRU at most, onboard taking precedence over V2X.

    VRUs that have left the scene are never reported. Dormant VRUs (before
    their start time) are, since they are physically present.
    """
    aware = v2x_aware(ego, v2x)
    out = []
    for i, vru in enumerate(vrus):
        if vru.exited:
            continue
        if in_fov(ego, sensor, vru.position):
            out.append(Detection(i, vru.position, vru.velocity, Source.ONBOARD))
        elif aware:
            out.append(Detection(i, vru.position, vru.velocity, Source.V2X))
    return out
