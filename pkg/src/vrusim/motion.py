"""Agent kinematics: point-mass VRUs and a kinematic-bicycle ego vehicle."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geometry import PathSpec, Vec2, normalize_angle, path_point_at, path_project
from .scenario import EgoSpec, VruSpec

VRU_SPEED_GAIN = 2.0  # 1/s, velocity-tracking gain of the VRU force law
MAX_STEER = 0.6  # rad
MIN_LOOKAHEAD = 3.0  # m
LOOKAHEAD_TIME = 0.5  # s


@dataclass(frozen=True)
class VruState:
    position: Vec2
    velocity: Vec2
    path_progress: float = 0.0
    exited: bool = False  # reached the end of its path and left the scene

    @property
    def speed(self) -> float:
        return self.velocity.norm()


@dataclass(frozen=True)
class EgoState:
    position: Vec2  # rear axle
    heading: float
    speed: float
    accel: float = 0.0
    path_progress: float = 0.0


def initial_vru_state(spec: VruSpec) -> VruState:
    return VruState(spec.init_position, Vec2(0.0, 0.0), 0.0)


def initial_ego_state(spec: EgoSpec) -> EgoState:
    progress = path_project(spec.path, spec.init_position, 0.0)
    return EgoState(spec.init_position, normalize_angle(spec.init_heading), spec.cruise_speed, 0.0, progress)


def step_vru(
    state: VruState, spec: VruSpec, t: float, dt: float, gain: float = VRU_SPEED_GAIN
) -> VruState:
    """Advance a VRU one step under a saturated velocity-tracking force.

    The net force is ``m * gain * (v_des - v)`` capped at ``m * a_max``, with
    ``v_des`` the target speed along the path tangent. Integration is
    semi-implicit Euler: velocity first, then position with the new velocity.
    """
    if t < spec.start_time or state.exited:
        return state
    cls = spec.vru_class
    path = spec.path
    _, tangent = path_point_at(path, state.path_progress)
    v_des = tangent * spec.target_speed

    force = (v_des - state.velocity) * (cls.mass * gain)
    f_norm = force.norm()
    f_cap = cls.mass * cls.a_max
    if f_norm > f_cap:
        force = force * (f_cap / f_norm)
    velocity = state.velocity + force * (dt / cls.mass)
    speed = velocity.norm()
    if speed > cls.v_max:
        velocity = velocity * (cls.v_max / speed)

    position = state.position + velocity * dt
    progress = path_project(path, position, state.path_progress)
    exited = progress >= path.length and (position - path.end).dot(path_point_at(path, path.length)[1]) >= 0
    return VruState(position, velocity, progress, exited)


def lookahead_distance(speed: float) -> float:
    return max(MIN_LOOKAHEAD, LOOKAHEAD_TIME * speed)


def pure_pursuit_steer(state: EgoState, path: PathSpec, wheelbase: float) -> float:
    """Front-wheel angle steering the rear axle toward a point ``L_d`` further along the path."""
    ld = lookahead_distance(state.speed)
    target, _ = path_point_at(path, min(state.path_progress + ld, path.length))
    local = target.to_local(state.position, state.heading)
    alpha = math.atan2(local.y, local.x)
    steer = math.atan2(2.0 * wheelbase * math.sin(alpha), ld)
    return min(max(steer, -MAX_STEER), MAX_STEER)


def step_ego(state: EgoState, accel_cmd: float, spec: EgoSpec, dt: float) -> EgoState:
    steer = pure_pursuit_steer(state, spec.path, spec.wheelbase)
    speed = max(0.0, state.speed + accel_cmd * dt)
    heading = normalize_angle(state.heading + speed / spec.wheelbase * math.tan(steer) * dt)
    position = state.position + Vec2(math.cos(heading), math.sin(heading)) * (speed * dt)
    progress = path_project(spec.path, position, state.path_progress)
    return replace(state, position=position, heading=heading, speed=speed, accel=accel_cmd, path_progress=progress)
