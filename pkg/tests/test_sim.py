import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx

from asvkit.geo import GeoPoint, LeverArm
from asvkit.logfmt import DpthRecord, GpsRecord, MsgRecord, dumps_log
from asvkit.mission import SurveyArea, plan_lawnmower
from asvkit.sim import (SIM_DT, BatteryModel, BeaconKind, BeaconParams, SeabedKind,
                        SeabedModel, SensorNoise, SimulationError, VehicleModel, VehicleState,
                        WaveModel, beacon_profile, reached, run_survey, simulate_survey,
                        step_vehicle)

EUROPA = GeoPoint(-22.340984, 40.337634)
WATERLINE_ARM = {"sounder": LeverArm((0.3, 0.0, 1.0))}


@pytest.fixture(scope="module")
def small_plan():
    return plan_lawnmower(SurveyArea(EUROPA, 10, 30), 2.0, 1.0, 2.0)


@pytest.fixture(scope="module")
def europa_result():
    plan = plan_lawnmower(SurveyArea(EUROPA, 49, 115), 2.0, 1.0, 2.0)
    return simulate_survey(plan, seabed=SeabedModel.plane(5.0), seed=4)


def test_flat_calm_noiseless_depths(small_plan):
    log = run_survey(small_plan, seabed=SeabedModel.plane(5.0), waves=WaveModel.calm(),
                     noise=SensorNoise.none(), lever_arms=WATERLINE_ARM, seed=0)
    depths = np.array([r.depth for r in log.of(DpthRecord)])
    assert len(depths) > 100
    assert depths == approx(5.0, abs=1e-9)


def test_noiseless_depth_matches_truth_at_ground(small_plan):
    sb = SeabedModel.sloped(6.0, 0.05, -0.03)
    res = simulate_survey(small_plan, seabed=sb, waves=WaveModel.calm(),
                          noise=SensorNoise.none(), lever_arms=WATERLINE_ARM, seed=0)
    raw = np.array([r.depth for r in res.log.of(DpthRecord)])
    assert np.max(np.abs(raw - res.truth.true_depth)) < 1e-3
    assert res.truth.true_depth == approx(sb.depth(res.truth.ground_east, res.truth.ground_north),
                                          abs=1e-9)


def test_europa_scale_counts(europa_result):
    n = len(europa_result.log.of(DpthRecord))
    assert n == approx(24 * 230, rel=0.01)
    assert europa_result.truth.elapsed_s / 60 == approx(50, rel=0.05)


def test_gps_rate(europa_result):
    t = np.array([r.t for r in europa_result.log.of(GpsRecord)])
    assert np.diff(t) == approx(SIM_DT)


def test_energy_bookkeeping(europa_result):
    b = BatteryModel()
    tr = europa_result.truth
    assert tr.energy_wh == approx(b.avg_power_draw * tr.elapsed_s / 3600.0, rel=1e-9)


def test_byte_identical_logs(small_plan):
    a = dumps_log(run_survey(small_plan, seed=9))
    assert a == dumps_log(run_survey(small_plan, seed=9))
    assert a != dumps_log(run_survey(small_plan, seed=10))


def test_battery_exhaustion_truncates(small_plan):
    res = simulate_survey(small_plan, battery=BatteryModel(1.0, 70.0), seed=0)
    assert res.truth.elapsed_s < 60
    assert any("battery" in m.text for m in res.log.of(MsgRecord))


def test_out_of_range_depth_is_dropout(small_plan):
    log = run_survey(small_plan, seabed=SeabedModel.plane(60.0), waves=WaveModel.calm(),
                     noise=SensorNoise.none(), seed=0)
    assert all(r.depth is None for r in log.of(DpthRecord))


def test_spacing_below_accept_radius(small_plan):
    plan = plan_lawnmower(SurveyArea(EUROPA, 10, 30), 0.5, 1.0, 2.0)
    with pytest.raises(SimulationError):
        simulate_survey(plan, VehicleModel(waypoint_accept_radius=0.5))


def test_endurance():
    assert BatteryModel(296.0, 70.0).endurance_hours() == approx(4.229, abs=1e-3)
    assert BatteryModel.packs(2, 70.0).capacity == approx(296.0)


def test_vehicle_model_limits():
    with pytest.raises(ValueError):
        VehicleModel(max_speed=1.5)
    assert VehicleModel(max_speed=1.5, allow_fast=True).max_speed == 1.5
    with pytest.raises(ValueError):
        VehicleModel(cruise_speed=1.3)


def test_stable_at_waypoint():
    m = VehicleModel()
    s = VehicleState(0.0, 1.0, 1.0, 0.3, 0.0)
    for _ in range(20):
        s = step_vehicle(s, (1.2, 1.1), 0.1, m)
    assert (s.east, s.north, s.speed) == approx((1.0, 1.0, 0.0))


def test_heading_error_halves():
    m = VehicleModel()
    s = VehicleState(0.0, 0.0, 0.0, 0.0, 0.0)
    t_half = math.pi / m.turn_rate_max / 2
    for _ in range(int(round(t_half / 0.1))):
        s = step_vehicle(s, (0.0, -1000.0), 0.1, m)
    err = abs(math.remainder(math.pi - s.heading, 2 * math.pi))
    assert err == approx(math.pi / 2, abs=0.06)


def test_straight_transit_time():
    m = VehicleModel()
    s = VehicleState(0.0, 0.0, 0.0, 0.0, 1.0)
    steps = 0
    while not reached(s, (0.0, 100.0), m):
        s = step_vehicle(s, (0.0, 100.0), 0.1, m)
        steps += 1
    assert steps * 0.1 == approx(100.0, abs=1.5)


@given(st.floats(0, 2 * math.pi), st.floats(0, 1.2), st.floats(-50, 50), st.floats(-50, 50),
       st.floats(0.01, 1.0))
def test_step_bounds(h, v, tx, ty, dt):
    m = VehicleModel()
    s = VehicleState(0.0, 0.0, 0.0, h, v)
    n = step_vehicle(s, (tx, ty), dt, m)
    assert 0 <= n.speed <= m.max_speed
    assert abs(math.remainder(n.heading - h, 2 * math.pi)) <= m.turn_rate_max * dt + 1e-12


def test_bad_dt():
    with pytest.raises(ValueError):
        step_vehicle(VehicleState(0, 0, 0), (1, 1), 1.5, VehicleModel())


def test_stationary_beacon():
    tr = beacon_profile(BeaconKind.STATIONARY, BeaconParams(duration=60))
    assert np.ptp(tr.east) == 0 and np.ptp(tr.north) == 0 and np.ptp(tr.up) == 0


def test_random_walk_path_length():
    tr = beacon_profile("RANDOM_WALK", BeaconParams(duration=3600), seed=1)
    assert tr.horizontal_path_length() == approx(2880, rel=0.10)


def test_dive_cycle_stays_under_offset():
    p = BeaconParams(duration=1500, surface_offset=0.5)
    tr = beacon_profile("DIVE_CYCLE", p, seed=2)
    assert tr.up.max() <= -0.5 + 1e-12
    assert tr.up.min() == approx(-p.dive_depth)


def test_beacon_params_validation():
    with pytest.raises(ValueError):
        BeaconParams(mean_speed=2.5)


def test_beacon_deterministic():
    a = beacon_profile("DIVE_CYCLE", seed=5)
    b = beacon_profile("DIVE_CYCLE", seed=5)
    assert np.array_equal(a.east, b.east) and np.array_equal(a.up, b.up)


def test_seabed_spec_round_trip():
    sb = SeabedModel.composite(5.0, (30, 60), seed=3)
    back = SeabedModel.from_dict(sb.to_dict())
    e, n = np.meshgrid(np.linspace(-30, 30, 7), np.linspace(-60, 60, 9))
    assert back.depth(e, n) == approx(sb.depth(e, n))
    gen = SeabedModel.from_dict({"kind": "composite", "mean_depth": 5.0,
                                 "generate": {"extent": [30, 60], "seed": 3}})
    assert gen.descriptor is SeabedKind.COMPOSITE
    assert gen.depth(e, n) == approx(sb.depth(e, n))


def test_composite_depth_in_sensor_range():
    sb = SeabedModel.composite(2.0, (25, 60), seed=0)
    e, n = np.meshgrid(np.linspace(-25, 25, 51), np.linspace(-60, 60, 121))
    d = sb.depth(e, n)
    assert d.min() > 0 and d.max() <= 50


def test_wave_gusts_exceed_threshold():
    t = np.arange(0, 3000, SIM_DT)
    roll, pitch, gust = WaveModel().series(t, np.random.default_rng(0))
    assert gust.any()
    big = np.maximum(np.abs(roll), np.abs(pitch)) > math.radians(10)
    assert np.array_equal(big, gust)
