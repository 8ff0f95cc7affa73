"""Safety, efficiency and comfort scores of a finished run."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .engine import EventKind, Outcome, SimResult
from .errors import EmptyTrace
from .scenario import ScenarioSpec

A_REF = 3.0  # m/s^2
J_REF = 10.0  # m/s^3
JERK_CAP = 20.0  # m/s^3, rate limit applied to commands before differencing


@dataclass(frozen=True)
class Scores:
    safety: float
    efficiency: float
    comfort: float

    def as_dict(self) -> dict[str, float]:
        return {"safety": self.safety, "efficiency": self.efficiency, "comfort": self.comfort}


ZERO = Scores(0.0, 0.0, 0.0)


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def _rms(xs: Sequence[float]) -> float:
    return math.sqrt(math.fsum(x * x for x in xs) / len(xs)) if xs else 0.0


def rate_limited(commands: Sequence[float], dt: float, cap: float = JERK_CAP) -> list[float]:
    """Commands passed through a slew limiter of ``cap`` per second, starting from zero."""
    step = cap * dt
    out, prev = [], 0.0
    for a in commands:
        prev = prev + min(max(a - prev, -step), step)
        out.append(prev)
    return out


def jerk_series(commands: Sequence[float], dt: float, cap: float = JERK_CAP) -> list[float]:
    limited = rate_limited(commands, dt, cap)
    return [(b - a) / dt for a, b in zip([0.0] + limited[:-1], limited)]


def safety_score(min_ttc: float | None, tau_safe: float) -> float:
    return 1.0 if min_ttc is None else _clamp01(min_ttc / tau_safe)


def efficiency_score(trip_time: float | None, free_time: float) -> float:
    if trip_time is None:
        return 0.0
    if trip_time <= 0.0:
        return 1.0
    return _clamp01(free_time / trip_time)


def comfort_score(commands: Sequence[float], dt: float) -> float:
    rms_a = _rms(commands)
    rms_j = _rms(jerk_series(commands, dt))
    return _clamp01(1.0 - 0.5 * rms_a / A_REF - 0.5 * rms_j / J_REF)


def score(result: SimResult, spec: ScenarioSpec) -> Scores:
    """Score a run; any collision zeroes every component.

    Only commands that were actually applied count toward comfort, so the
    final row (recorded at the terminal instant) is left out.
    """
    if not result.trace:
        raise EmptyTrace("cannot score an empty trace")
    if result.outcome is Outcome.COLLISION or any(e.kind is EventKind.COLLISION for e in result.events):
        return ZERO
    finite = [r.ttc for r in result.trace if r.ttc is not None]
    safety = safety_score(min(finite) if finite else None, spec.planner.time_headway)
    trip = result.trip_time if result.outcome is Outcome.COMPLETED else None
    efficiency = efficiency_score(trip, spec.ego.path.length / spec.ego.cruise_speed)
    comfort = comfort_score([r.accel_cmd for r in result.trace[:-1]], spec.dt)
    return Scores(safety, efficiency, comfort)
