import math

from hypothesis import given, settings, strategies as st

from oracles import in_sector
from vrusim.awareness import Source, in_fov, perceive, v2x_aware
from vrusim.geometry import Vec2
from vrusim.motion import EgoState, VruState
from vrusim.scenario import SensorSpec, V2xSpec

SENSOR = SensorSpec(20.0, math.radians(120.0))
EGO = EgoState(Vec2(0.0, 0.0), 0.0, 10.0)
coord = st.floats(-40.0, 40.0, allow_nan=False)


def vru_at(x, y, exited=False):
    return VruState(Vec2(x, y), Vec2(0.0, 1.0), exited=exited)


def test_fov_examples():
    assert in_fov(EGO, SENSOR, Vec2(10.0, 0.0))
    assert not in_fov(EGO, SENSOR, Vec2(0.0, 10.0))
    assert in_fov(EGO, SENSOR, Vec2(19.0, 5.0))
    assert in_sector(19.0, 5.0, 0, 0, 0, 20, 120)


def test_fov_closed_boundary():
    edge = Vec2.polar(20.0, math.radians(60.0))
    assert in_fov(EGO, SENSOR, edge)
    assert in_fov(EGO, SENSOR, Vec2.polar(20.0, -math.radians(60.0)))
    assert not in_fov(EGO, SENSOR, Vec2.polar(20.001, 0.0))
    assert not in_fov(EGO, SENSOR, Vec2.polar(10.0, math.radians(60.01)))


def test_fov_apex_counts_as_seen():
    assert in_fov(EGO, SENSOR, EGO.position)


def test_fov_follows_heading():
    ego = EgoState(Vec2(5.0, 5.0), math.pi / 2, 10.0)
    assert in_fov(ego, SENSOR, Vec2(5.0, 15.0))
    assert not in_fov(ego, SENSOR, Vec2(15.0, 5.0))


@settings(max_examples=300)
@given(coord, coord, st.floats(-math.pi, math.pi))
def test_fov_matches_oracle_away_from_edges(x, y, h):
    r = math.hypot(x, y)
    bearing = abs(math.degrees(math.remainder(math.atan2(y, x) - h, 2 * math.pi)))
    if r < 1e-9 or abs(r - 20.0) < 1e-6 or abs(bearing - 60.0) < 1e-6:
        return
    ego = EgoState(Vec2(0.0, 0.0), h, 0.0)
    assert in_fov(ego, SENSOR, Vec2(x, y)) == in_sector(x, y, 0.0, 0.0, h, 20.0, 120.0)


@given(coord, coord, st.floats(1.0, 30.0), st.floats(1.0, 30.0), st.floats(10.0, 180.0), st.floats(10.0, 180.0))
def test_fov_monotone_in_range_and_angle(x, y, r1, r2, a1, a2):
    small = SensorSpec(min(r1, r2), math.radians(min(a1, a2)))
    big = SensorSpec(max(r1, r2), math.radians(max(a1, a2)))
    if in_fov(EGO, small, Vec2(x, y)):
        assert in_fov(EGO, big, Vec2(x, y))


def test_v2x_examples():
    rsu = Vec2(10.0, 0.0)
    assert not v2x_aware(EGO, V2xSpec(False, rsu, 40.0))
    assert v2x_aware(EGO, V2xSpec(True, rsu, 40.0))
    assert not v2x_aware(EGO, V2xSpec(True, Vec2(40.001, 0.0), 40.0))
    assert v2x_aware(EGO, V2xSpec(True, Vec2(40.0, 0.0), 40.0))


def test_perceive_examples():
    off = V2xSpec(False, Vec2(0.0, 0.0), 40.0)
    on = V2xSpec(True, Vec2(0.0, 0.0), 40.0)
    assert perceive(EGO, [vru_at(-5.0, 0.0)], SENSOR, off) == []
    far = perceive(EGO, [vru_at(0.0, 100.0)], SENSOR, on)
    assert [(d.vru_index, d.source) for d in far] == [(0, Source.V2X)]
    near = perceive(EGO, [vru_at(10.0, 0.0)], SENSOR, on)
    assert [(d.vru_index, d.source) for d in near] == [(0, Source.ONBOARD)]


def test_perceive_reports_true_state():
    v = VruState(Vec2(10.0, 1.0), Vec2(0.3, -0.4))
    (d,) = perceive(EGO, [v], SENSOR, V2xSpec())
    assert (d.position, d.velocity) == (v.position, v.velocity)


def test_exited_vru_not_reported():
    on = V2xSpec(True, Vec2(0.0, 0.0), 40.0)
    assert perceive(EGO, [vru_at(10.0, 0.0, exited=True)], SENSOR, on) == []


@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=5), coord, coord, st.floats(0.0, 60.0))
def test_fusion_superset_and_uniqueness(points, rx, ry, comm):
    vrus = [vru_at(x, y) for x, y in points]
    rsu = Vec2(rx, ry)
    with_v2x = perceive(EGO, vrus, SENSOR, V2xSpec(True, rsu, comm))
    without = perceive(EGO, vrus, SENSOR, V2xSpec(False, rsu, comm))
    assert {d.vru_index for d in without} <= {d.vru_index for d in with_v2x}
    idx = [d.vru_index for d in with_v2x]
    assert len(idx) == len(set(idx))
    for d in without:
        assert d.source is Source.ONBOARD
