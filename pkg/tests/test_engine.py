import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import TTC_HORIZON, brute_ttc, brute_ttc_vectorized, point_rect_distance, random_ttc_cases
from vrusim.engine import EventKind, Outcome, check_collision, run, ttc
from vrusim.geometry import Vec2, line_path
from vrusim.motion import EgoState, VruState
from vrusim.planner import Mode
from vrusim.scenario import BUILTIN_NAMES, VRU_CLASSES, EgoSpec, ScenarioSpec, VruKind, VruSpec, builtin_scenario

EGO_SPEC = EgoSpec(Vec2(0.0, 0.0), 0.0, 15.0, line_path((0.0, 0.0), (100.0, 0.0)))
ORIGIN = EgoState(Vec2(0.0, 0.0), 0.0, 0.0)


def still(x, y):
    return VruState(Vec2(x, y), Vec2(0.0, 0.0))


# ------------------------------------------------------------ collision


def test_collision_examples():
    assert check_collision(ORIGIN, EGO_SPEC, still(2.0, 0.3), 0.5)
    assert not check_collision(ORIGIN, EGO_SPEC, still(5.9, 0.0), 0.5)
    assert check_collision(ORIGIN, EGO_SPEC, still(5.2, 0.0), 0.5)
    assert check_collision(ORIGIN, EGO_SPEC, still(5.3, 0.0), 0.5)  # closed contact


@settings(max_examples=200)
@given(
    st.floats(-20, 20), st.floats(-20, 20), st.floats(-math.pi, math.pi),
    st.floats(-100, 100), st.floats(-100, 100), st.floats(-math.pi, math.pi),
    st.sampled_from([0.5, 1.0, 1.5]),
)
def test_collision_rigid_invariance(px, py, h, tx, ty, rot, r):
    ego = EgoState(Vec2(0.0, 0.0), h, 0.0)
    vru = still(px, py)
    moved_ego = EgoState(Vec2(tx, ty), h + rot, 0.0)
    moved_vru = still(*(Vec2(px, py).rotated(rot) + Vec2(tx, ty)).as_tuple())
    a = check_collision(ego, EGO_SPEC, vru, r)
    b = check_collision(moved_ego, EGO_SPEC, moved_vru, r)
    # exact-contact configurations may flip under rounding; skip those
    margin = abs(point_rect_distance(px, py, 0, 0, h, 4.8, 1.8) - r)
    if margin > 1e-9:
        assert a == b


# ------------------------------------------------------------ TTC


def test_ttc_head_on_example():
    # body centre 30 m from the VRU centre, closing at 15 m/s
    ego = EgoState(Vec2(-2.4, 0.0), 0.0, 15.0)
    value = ttc(ego, EGO_SPEC, still(30.0, 0.0), 0.5)
    assert value == pytest.approx((30.0 - 2.9) / 15.0, abs=1e-12)
    assert value == pytest.approx(1.807, abs=1e-3)
    assert brute_ttc((-2.4, 0.0), 0.0, 15.0, (30.0, 0.0), (0.0, 0.0), 0.5, 4.8, 1.8) == pytest.approx(value, abs=1e-3)


def test_ttc_parallel_motion_is_none():
    ego = EgoState(Vec2(0.0, 0.0), 0.0, 10.0)
    assert ttc(ego, EGO_SPEC, VruState(Vec2(20.0, 0.0), Vec2(10.0, 0.0)), 0.5) is None
    assert ttc(ORIGIN, EGO_SPEC, still(20.0, 0.0), 0.5) is None


def test_ttc_overlap_is_zero():
    assert ttc(ORIGIN, EGO_SPEC, still(2.0, 0.0), 0.5) == 0.0
    assert ttc(ORIGIN, EGO_SPEC, still(5.2, 0.0), 0.5) == 0.0


def test_ttc_adjacent_lane_pass_is_none():
    # VRU in the neighbouring lane passing head-on, 3.5 m to the left
    ego = EgoState(Vec2(0.0, 0.0), 0.0, 6.0)
    assert ttc(ego, EGO_SPEC, VruState(Vec2(30.0, 3.5), Vec2(-18.0, 0.0)), 1.5) is None


def test_ttc_corner_contact_matches_scan():
    ego = EgoState(Vec2(0.0, 0.0), 0.0, 0.0)
    vru = VruState(Vec2(10.0, 3.0), Vec2(-2.0, -0.5))
    value = ttc(ego, EGO_SPEC, vru, 1.0)
    assert value == pytest.approx(brute_ttc((0, 0), 0.0, 0.0, (10, 3), (-2.0, -0.5), 1.0, 4.8, 1.8), abs=1e-3)


def test_ttc_matches_brute_force_scan_sample():
    for e, h, s, p, v, r in random_ttc_cases(100, seed=7):
        cf = ttc(EgoState(Vec2(*e), h, s), EGO_SPEC, VruState(Vec2(*p), Vec2(*v)), r)
        bf = brute_ttc_vectorized(e, h, s, p, v, r, 4.8, 1.8, TTC_HORIZON)
        if bf is None:
            assert cf is None or cf > TTC_HORIZON - 0.02
        else:
            assert cf == pytest.approx(bf, abs=0.02)


# ------------------------------------------------------------ runs


def unobstructed_spec(**kw):
    ped = VRU_CLASSES[VruKind.PEDESTRIAN]
    vru_path = line_path((50.0, -30.0), (50.0, -20.0))
    vru = VruSpec(ped, vru_path.start, 1.0, vru_path, start_time=100.0)
    ego = EgoSpec(Vec2(0.0, 0.0), 0.0, 10.0, line_path((0.0, 0.0), (100.0, 0.0)))
    return ScenarioSpec("free", ego, (vru,), **kw)


def test_unobstructed_run_completes():
    r = run(unobstructed_spec())
    assert r.outcome is Outcome.COMPLETED
    assert r.trip_time == pytest.approx(10.0, abs=0.011)
    assert r.min_ttc is None
    assert all(row.planner_mode is Mode.CRUISE and row.accel_cmd == 0.0 for row in r.trace)
    assert r.events[-1].kind is EventKind.TRIP_COMPLETE


def test_timeout_outcome():
    r = run(unobstructed_spec(t_max=5.0))
    assert r.outcome is Outcome.TIMEOUT
    assert r.trip_time is None
    assert r.trace[-1].t == pytest.approx(5.0)


@pytest.fixture(scope="module")
def builtin_runs():
    return {(n, v): run(builtin_scenario(n, v)) for n in BUILTIN_NAMES for v in (False, True)}


def test_result_invariants(builtin_runs):
    for (name, v2x), r in builtin_runs.items():
        spec = builtin_scenario(name, v2x)
        collided = any(e.kind is EventKind.COLLISION for e in r.events)
        assert (r.outcome is Outcome.COLLISION) == collided
        assert (r.trip_time is not None) == (r.outcome is Outcome.COMPLETED)
        times = [e.t for e in r.events]
        assert times == sorted(times)
        for k, row in enumerate(r.trace):
            assert abs(row.t - k * spec.dt) < 1e-9
        if collided:
            assert r.min_ttc == 0.0
            assert r.trace[-1].ttc == 0.0


def test_ped_crossing_outcomes(builtin_runs):
    off, on = builtin_runs[("ped_crossing", False)], builtin_runs[("ped_crossing", True)]
    assert off.outcome is Outcome.COLLISION
    assert 4.3 <= off.collision_time <= 5.7
    assert on.outcome is Outcome.COMPLETED
    assert on.first_event(EventKind.COLLISION) is None
    assert on.first_event(EventKind.V2X_ZONE_ENTRY).t < on.first_event(EventKind.FIRST_ONBOARD_DETECTION).t


def test_v2x_off_never_enters_zone(builtin_runs):
    for (name, v2x), r in builtin_runs.items():
        if not v2x:
            assert r.first_event(EventKind.V2X_ZONE_ENTRY) is None


def test_vru_passed_once_per_vru(builtin_runs):
    for r in builtin_runs.values():
        passed = [e.detail for e in r.events if e.kind is EventKind.VRU_PASSED]
        assert len(passed) == len(set(passed)) <= 1


def test_mode_changes_match_trace(builtin_runs):
    for r in builtin_runs.values():
        changes = sum(1 for a, b in zip(r.trace, r.trace[1:]) if a.planner_mode is not b.planner_mode)
        changes += r.trace[0].planner_mode is not Mode.CRUISE
        assert changes == sum(1 for e in r.events if e.kind is EventKind.MODE_CHANGE)


def test_determinism():
    spec = builtin_scenario("moto_crossing", True)
    assert run(spec) == run(spec)


def test_frozen_event_times(builtin_runs):
    # regression anchors for the built-in scenarios
    expect = {
        ("ped_crossing", False): {EventKind.FIRST_ONBOARD_DETECTION: 3.24, EventKind.COLLISION: 5.01},
        ("ped_crossing", True): {EventKind.V2X_ZONE_ENTRY: 1.87, EventKind.FIRST_ONBOARD_DETECTION: 3.62},
        ("escooter_leading", False): {EventKind.FIRST_ONBOARD_DETECTION: 2.99},
        ("moto_crossing", False): {EventKind.FIRST_ONBOARD_DETECTION: 3.97, EventKind.COLLISION: 5.07},
        ("moto_crossing", True): {EventKind.V2X_ZONE_ENTRY: 1.8},
    }
    for key, events in expect.items():
        for kind, t in events.items():
            assert builtin_runs[key].first_event(kind).t == pytest.approx(t, abs=1e-9), (key, kind)


def test_trace_rows_hold_command_from_same_state(builtin_runs):
    r = builtin_runs[("escooter_leading", True)]
    for a, b in zip(r.trace, r.trace[1:]):
        assert b.ego.accel == a.accel_cmd
