import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx
from scipy import stats

from asvkit.geo import Attitude, EnuPoint, GeoDomainError, GeoPoint, Pose
from asvkit.sbl import (DEFAULT_SOUND_SPEED, AcousticNoiseModel, ConfigurationError,
                        FilteringError, ReceiverArray, SblFix, ToaSet, filter_track,
                        receiver_positions, simulate_toa, solve_fix)

from helpers import sample_geometry

ARRAY = ReceiverArray.square()
LEVEL = Pose(0.0, EnuPoint(0.0, 0.0, 0.0))
NOISELESS = AcousticNoiseModel.noiseless()


def _beneath(d):
    c = receiver_positions(LEVEL, ARRAY).mean(axis=0)
    return EnuPoint(c[0], c[1], c[2] - d)


def test_symmetric_toas_beneath_centroid():
    toa = simulate_toa(_beneath(10.0), LEVEL, ARRAY, NOISELESS, 0)
    expected = math.sqrt(10.0 ** 2 + 2 * 1.0 ** 2) / DEFAULT_SOUND_SPEED
    assert toa.arrival_times == approx((expected,) * 4, rel=1e-12)


def test_solution_beneath_centroid_is_straight_down():
    toa = simulate_toa(_beneath(10.0), LEVEL, ARRAY, NOISELESS, 0)
    fix = solve_fix(toa, LEVEL, ARRAY)
    # body frame is forward-starboard-down, so straight down is +z
    assert fix.rel_position == approx(tuple(ARRAY.centroid + [0, 0, 10.0]), abs=1e-9)
    assert fix.enu_position.as_array() == approx(_beneath(10.0).as_array(), abs=1e-9)
    assert fix.valid


def test_common_mode_range_noise_sigma():
    pose = LEVEL
    c = receiver_positions(pose, ARRAY).mean(axis=0)
    beacon = EnuPoint(c[0] + 99.0, c[1], c[2] - math.sqrt(100.0 ** 2 - 99.0 ** 2))
    rng = np.random.default_rng(1)
    noisy = AcousticNoiseModel(range_fraction_sigma=0.01, timing_jitter_sigma=0.0)
    true = np.linalg.norm(beacon.as_array() - receiver_positions(pose, ARRAY), axis=1)
    err = np.array([np.asarray(simulate_toa(beacon, pose, ARRAY, noisy, rng).arrival_times)
                    * DEFAULT_SOUND_SPEED - true for _ in range(4000)])
    assert err.std(axis=0) == approx([1.0] * 4, rel=0.05)


def test_surface_spike_rate_chi_square():
    p = 0.2
    noise = AcousticNoiseModel(surface_threshold=0.5, surface_spike_probability=p)
    rng = np.random.default_rng(2)
    beacon = EnuPoint(3.0, 4.0, -0.4)
    n = 10_000
    k = sum(simulate_toa(beacon, LEVEL, ARRAY, noise, rng).spiked for _ in range(n))
    chi2 = (k - n * p) ** 2 / (n * p) + ((n - k) - n * (1 - p)) ** 2 / (n * (1 - p))
    assert chi2 < stats.chi2.ppf(0.999, 1)


def test_no_spikes_below_threshold():
    noise = AcousticNoiseModel(surface_threshold=0.5, surface_spike_probability=1.0)
    assert not simulate_toa(EnuPoint(3.0, 4.0, -3.0), LEVEL, ARRAY, noise, 0).spiked


def test_beacon_above_surface_rejected():
    with pytest.raises(GeoDomainError):
        simulate_toa(EnuPoint(0, 0, 0.1), LEVEL, ARRAY, NOISELESS, 0)


def test_dropout_beyond_twice_range():
    assert simulate_toa(EnuPoint(250.0, 0.0, -5.0), LEVEL, ARRAY, NOISELESS, 0) is None


def test_same_seed_same_toas():
    b = EnuPoint(10.0, -3.0, -4.0)
    a = simulate_toa(b, LEVEL, ARRAY, AcousticNoiseModel(), 42)
    assert a == simulate_toa(b, LEVEL, ARRAY, AcousticNoiseModel(), 42)


def test_noise_free_exact_on_random_geometries():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(300):
        pose, beacon, _ = sample_geometry(rng, ARRAY)
        fix = solve_fix(simulate_toa(beacon, pose, ARRAY, NOISELESS, rng), pose, ARRAY)
        assert fix.valid
        worst = max(worst, np.linalg.norm(fix.enu_position.as_array() - beacon.as_array()))
    assert worst < 1e-3


def _median_error(fraction, seed=5, n=300):
    rng = np.random.default_rng(seed)
    noise = AcousticNoiseModel(range_fraction_sigma=fraction, timing_jitter_sigma=0.0)
    errs = []
    for _ in range(n):
        pose, beacon, _ = sample_geometry(rng, ARRAY)
        fix = solve_fix(simulate_toa(beacon, pose, ARRAY, noise, rng), pose, ARRAY)
        errs.append(np.linalg.norm(fix.enu_position.as_array() - beacon.as_array()))
    return float(np.median(errs))


def test_error_scales_linearly_with_noise():
    small, large = _median_error(0.001), _median_error(0.01)
    assert large / small == approx(10.0, rel=0.15)


def test_out_of_range_fix_invalid():
    pose = LEVEL
    c = receiver_positions(pose, ARRAY).mean(axis=0)
    beacon = EnuPoint(c[0] + 120.0, c[1], -20.0)
    fix = solve_fix(simulate_toa(beacon, pose, ARRAY, NOISELESS, 0), pose, ARRAY)
    assert not fix.valid


def test_inconsistent_ranges_invalid():
    toa = ToaSet(0.0, (0.005, 0.005, 0.005, 0.03))
    assert not solve_fix(toa, LEVEL, ARRAY).valid


def test_geolocated_fix():
    origin = GeoPoint(43.0, 5.0, 0.0)
    fix = solve_fix(simulate_toa(_beneath(6.0), LEVEL, ARRAY, NOISELESS, 0), LEVEL, ARRAY,
                    origin=origin)
    assert fix.geo_position.latitude == approx(43.0, abs=1e-9)
    assert fix.depth == approx(7.0, abs=1e-9)


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_yaw_frame_consistency(yaw_a, yaw_b):
    beacon = EnuPoint(12.0, -7.0, -6.0)
    fixes = []
    for yaw in (yaw_a, yaw_b):
        pose = Pose(0.0, EnuPoint(1.0, 2.0, 0.0), Attitude(0.0, 0.0, yaw))
        fixes.append(solve_fix(simulate_toa(beacon, pose, ARRAY, NOISELESS, 0), pose, ARRAY))
    a, b = fixes
    assert a.enu_position.as_array() == approx(b.enu_position.as_array(), abs=1e-6)
    # the body-frame solution is counter-rotated by the yaw difference
    d = yaw_b - yaw_a
    rot = np.array([[math.cos(d), math.sin(d), 0], [-math.sin(d), math.cos(d), 0], [0, 0, 1]])
    ra = np.asarray(a.rel_position)
    rb = np.asarray(b.rel_position)
    assert rot @ ra == approx(rb, abs=1e-6)


def test_array_validation():
    with pytest.raises(ConfigurationError):
        ReceiverArray(((0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0)))
    with pytest.raises(ConfigurationError):
        ReceiverArray(((0, 0, 0), (1, 0, 0), (0, 1, 0)))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        ReceiverArray.square(spacing=5.0)
    assert w


def test_toa_validation():
    with pytest.raises(ConfigurationError):
        ToaSet(0.0, (0.01, 0.01, 0.01))
    with pytest.raises(ConfigurationError):
        ToaSet(0.0, (0.01,) * 4, sound_speed=1000.0)


def _fix(t, e, std, valid=True):
    return SblFix(t, (0.0, 0.0, 0.0), EnuPoint(e, 0.0, -2.0), std, valid)


def test_filter_passthrough():
    fixes = [_fix(t, t, 0.5) for t in range(5)]
    assert filter_track(fixes) == fixes


def test_filter_midpoint():
    out = filter_track([_fix(0, 0.0, 0.5), _fix(1, 99.0, 5.0), _fix(2, 4.0, 0.5)])
    assert out[1].enu_position.as_array() == approx([2.0, 0.0, -2.0])
    assert out[1].interpolated and out[1].valid
    assert out[1].timestamp == 1


def test_filter_holds_edges_and_flags():
    out = filter_track([_fix(0, 50.0, 9.0), _fix(1, 1.0, 0.5), _fix(2, 2.0, 0.5),
                        _fix(3, 7.0, 0.5, valid=False)])
    assert out[0].enu_position.east == approx(1.0)
    assert out[3].enu_position.east == approx(2.0)
    assert all(f.interpolated for f in out if f.std > 3.0 or not f.valid)


def test_filter_needs_two_good():
    with pytest.raises(FilteringError):
        filter_track([_fix(0, 0.0, 9.0), _fix(1, 1.0, 0.5)])


@given(st.lists(st.tuples(st.floats(0.0, 10.0), st.booleans()), min_size=2, max_size=40))
def test_filter_never_leaks_bad_fixes(spec):
    fixes = [_fix(float(i), float(i), std, ok) for i, (std, ok) in enumerate(spec)]
    good = sum(1 for std, ok in spec if ok and std <= 3.0)
    if good < 2:
        with pytest.raises(FilteringError):
            filter_track(fixes)
        return
    out = filter_track(fixes)
    assert len(out) == len(fixes)
    for f in out:
        assert f.interpolated or (f.valid and f.std <= 3.0)
