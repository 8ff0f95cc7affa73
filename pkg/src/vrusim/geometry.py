"""2D vectors and piecewise line/arc paths parametrized by arc length."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

from .errors import OutOfRange, ValidationError

C0_TOLERANCE = 1e-6
PROJECTION_WINDOW = 5.0


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError("vec2", f"non-finite component ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def rotated(self, angle: float) -> Vec2:
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def to_local(self, origin: Vec2, heading: float) -> Vec2:
        """Coordinates of this point in a frame at ``origin`` rotated by ``heading``."""
        return (self - origin).rotated(-heading)

    @classmethod
    def polar(cls, r: float, angle: float) -> Vec2:
        return cls(r * math.cos(angle), r * math.sin(angle))

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def distance(a: Vec2, b: Vec2) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def normalize_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.remainder(a, 2.0 * math.pi)
    return math.pi if a == -math.pi else a


@dataclass(frozen=True)
class Line:
    start: Vec2
    end: Vec2

    @property
    def length(self) -> float:
        return distance(self.start, self.end)

    @property
    def end_point(self) -> Vec2:
        return self.end

    @property
    def start_point(self) -> Vec2:
        return self.start

    def at(self, s: float) -> tuple[Vec2, Vec2]:
        d = self.end - self.start
        u = d * (1.0 / d.norm())
        return self.start + u * s, u

    def nearest(self, p: Vec2, lo: float, hi: float) -> float:
        d = self.end - self.start
        u = d * (1.0 / d.norm())
        return min(max((p - self.start).dot(u), lo), hi)


@dataclass(frozen=True)
class Arc:
    """Circular arc; ``sweep`` is signed, counter-clockwise positive."""

    center: Vec2
    radius: float
    start_angle: float
    sweep: float

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def _angle(self, s: float) -> float:
        return self.start_angle + math.copysign(s / self.radius, self.sweep)

    @property
    def start_point(self) -> Vec2:
        return self.center + Vec2.polar(self.radius, self.start_angle)

    @property
    def end_point(self) -> Vec2:
        return self.center + Vec2.polar(self.radius, self.start_angle + self.sweep)

    def at(self, s: float) -> tuple[Vec2, Vec2]:
        th = self._angle(s)
        sign = 1.0 if self.sweep >= 0 else -1.0
        tangent = Vec2(-math.sin(th) * sign, math.cos(th) * sign)
        return self.center + Vec2.polar(self.radius, th), tangent

    def nearest(self, p: Vec2, lo: float, hi: float) -> float:
        sign = 1.0 if self.sweep >= 0 else -1.0
        rel = p - self.center
        candidates = [lo, hi]
        if rel.norm() > 0.0:
            phi = (math.atan2(rel.y, rel.x) - self.start_angle) * sign
            # foot of the perpendicular, tried on every winding that can land in [lo, hi]
            for k in (-1, 0, 1, 2):
                s = (phi + 2.0 * math.pi * k) * self.radius
                if lo <= s <= hi:
                    candidates.append(s)
        return min(candidates, key=lambda s: (distance(self.at(s)[0], p), s))


Segment = Union[Line, Arc]


@dataclass(frozen=True)
class PathSpec:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValidationError("path", "at least one segment required")
        object.__setattr__(self, "segments", tuple(self.segments))
        for i, seg in enumerate(self.segments):
            if isinstance(seg, Arc) and not seg.radius > 0:
                raise ValidationError(f"path[{i}].radius", "must be > 0")
            if not seg.length > 0:
                raise ValidationError(f"path[{i}]", "segment length must be > 0")
            if i and distance(self.segments[i - 1].end_point, seg.start_point) >= C0_TOLERANCE:
                raise ValidationError(f"path[{i}]", "segment does not start where the previous one ends")
        if not self.length > 0:
            raise ValidationError("path", "total length must be > 0")

    @cached_property
    def _offsets(self) -> list[float]:
        out, acc = [], 0.0
        for seg in self.segments:
            out.append(acc)
            acc += seg.length
        return out

    @cached_property
    def length(self) -> float:
        return sum(seg.length for seg in self.segments)

    @property
    def start(self) -> Vec2:
        return self.segments[0].start_point

    @property
    def end(self) -> Vec2:
        return self.segments[-1].end_point


def path_length(path: PathSpec) -> float:
    return path.length


def path_point_at(path: PathSpec, s: float) -> tuple[Vec2, Vec2]:
    """Point and unit tangent at arc length ``s``."""
    total = path.length
    if s < -1e-9 or s > total + 1e-9:
        raise OutOfRange(f"arc length {s} outside [0, {total}]")
    s = min(max(s, 0.0), total)
    i = max(bisect.bisect_right(path._offsets, s) - 1, 0)
    seg = path.segments[i]
    return seg.at(min(s - path._offsets[i], seg.length))


def path_project(path: PathSpec, p: Vec2, hint: float, window: float = PROJECTION_WINDOW) -> float:
    """Arc length of the path point nearest ``p`` within ``[hint, hint + window]``."""
    total = path.length
    lo = min(max(hint, 0.0), total)
    hi = min(lo + window, total)
    best_s, best_d = lo, math.inf
    for seg, off in zip(path.segments, path._offsets):
        a, b = max(lo, off), min(hi, off + seg.length)
        if a > b:
            continue
        s = off + seg.nearest(p, a - off, b - off)
        d = distance(path_point_at(path, s)[0], p)
        if d < best_d:
            best_s, best_d = s, d
    return best_s


def line_path(*points: tuple[float, float]) -> PathSpec:
    pts = [Vec2(*p) for p in points]
    return PathSpec(tuple(Line(a, b) for a, b in zip(pts, pts[1:])))


@dataclass(frozen=True)
class OrientedBox:
    """Rectangle reaching ``length`` forward from the midpoint of its rear edge."""

    rear: Vec2
    heading: float
    length: float
    width: float

    def distance_to(self, p: Vec2) -> float:
        local = p.to_local(self.rear, self.heading)
        dx = max(0.0 - local.x, 0.0, local.x - self.length)
        dy = max(abs(local.y) - self.width / 2.0, 0.0)
        return math.hypot(dx, dy)

    def corners(self) -> list[Vec2]:
        w = self.width / 2.0
        local = [Vec2(0.0, -w), Vec2(self.length, -w), Vec2(self.length, w), Vec2(0.0, w)]
        return [self.rear + c.rotated(self.heading) for c in local]
