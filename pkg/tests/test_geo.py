import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx

from asvkit.geo import (Attitude, EnuPoint, GeoDomainError, GeoPoint, LeverArm, Pose,
                        apply_lever_arm, body_to_enu_matrices, body_to_enu_matrix,
                        enu_to_geo, enu_to_geo_array, geo_to_enu, geo_to_enu_array,
                        rotate_body_to_enu, rotate_enu_to_body)

ARCSEC = 1.0 / 3600.0
# meridian and prime-vertical radii of curvature at the equator, times one arcsecond
M_EQ = 6378137.0 * (1 - 0.0066943799901413165) * math.radians(ARCSEC)
N_EQ = 6378137.0 * math.radians(ARCSEC)
EUROPA = GeoPoint(-22.340984, 40.337634)

angles = st.floats(-math.pi, math.pi, allow_nan=False)


def test_origin_maps_to_zero():
    p = geo_to_enu(EUROPA, EUROPA)
    assert (p.east, p.north, p.up) == approx((0, 0, 0), abs=1e-9)
    g = enu_to_geo(EnuPoint(0, 0, 0), EUROPA)
    assert (g.latitude, g.longitude, g.ellipsoidal_height) == approx(
        (EUROPA.latitude, EUROPA.longitude, 0.0), abs=1e-9)


def test_one_arcsecond_north_at_equator():
    o = GeoPoint(0.0, 0.0)
    p = geo_to_enu(GeoPoint(ARCSEC, 0.0), o)
    assert p.north == approx(M_EQ, abs=1e-3)
    assert p.north == approx(30.715, abs=1e-3)
    assert abs(p.east) < 1e-9


def test_one_arcsecond_east_at_equator():
    o = GeoPoint(0.0, 0.0)
    p = geo_to_enu(GeoPoint(0.0, ARCSEC), o)
    assert p.east == approx(N_EQ, abs=1e-3)
    assert p.east == approx(30.92, abs=0.01)


def test_inverse_arcsecond():
    o = GeoPoint(0.0, 0.0)
    g = enu_to_geo(EnuPoint(0.0, M_EQ, 0.0), o)
    assert g.latitude == approx(ARCSEC, abs=1e-10)
    assert g.longitude == approx(0.0, abs=1e-12)


def test_europa_rectangle_offsets():
    # corners 24.5 m and 57.5 m from the centre along east and north
    corners = [enu_to_geo(EnuPoint(se * 24.5, sn * 57.5, 0.0), EUROPA)
               for se, sn in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
    enu = np.array([geo_to_enu(c, EUROPA).as_array() for c in corners])
    sides = np.linalg.norm(np.diff(np.vstack([enu, enu[:1]]), axis=0), axis=1)
    assert sides == approx([49.0, 115.0, 49.0, 115.0], abs=1e-3)


def test_far_points_rejected():
    with pytest.raises(GeoDomainError):
        geo_to_enu(GeoPoint(1.0, 0.0), GeoPoint(0.0, 0.0))
    with pytest.raises(GeoDomainError):
        enu_to_geo(EnuPoint(60_000.0, 0.0, 0.0), GeoPoint(0.0, 0.0))


@pytest.mark.parametrize("lat,lon", [(91, 0), (-90.5, 0), (0, 181), (float("nan"), 0)])
def test_geopoint_validation(lat, lon):
    with pytest.raises(GeoDomainError):
        GeoPoint(lat, lon)


def test_round_trip_ten_thousand_points():
    rng = np.random.default_rng(7)
    for origin in (GeoPoint(43.0, 5.0, 12.0), EUROPA, GeoPoint(-70.0, 179.9)):
        enu = rng.uniform(-7000, 7000, (10_000, 3))
        enu[:, 2] = rng.uniform(-100, 100, 10_000)
        lat, lon, h = enu_to_geo_array(enu, origin)
        back = geo_to_enu_array(lat, lon, h, origin)
        assert np.max(np.abs(back - enu)) < 1e-3


@given(st.floats(-80, 80), st.floats(-179, 179), st.floats(-7e3, 7e3), st.floats(-7e3, 7e3),
       st.floats(-50, 50))
def test_round_trip_property(lat, lon, e, n, u):
    o = GeoPoint(lat, lon, 0.0)
    back = geo_to_enu(enu_to_geo(EnuPoint(e, n, u), o), o)
    assert math.dist(back.as_array(), (e, n, u)) < 1e-3


def test_zero_attitude_relabels_axes():
    r = body_to_enu_matrix(Attitude())
    assert r @ [1, 0, 0] == approx([0, 1, 0])
    assert r @ [0, 1, 0] == approx([1, 0, 0])
    assert r @ [0, 0, 1] == approx([0, 0, -1])


def test_roll_tilts_down_ray():
    v = rotate_body_to_enu([0, 0, 1], Attitude.from_degrees(roll=10))
    assert math.hypot(v[0], v[1]) == approx(math.sin(math.radians(10)), abs=1e-12)
    assert v[2] == approx(-math.cos(math.radians(10)), abs=1e-12)
    # positive roll lowers starboard, so the down axis swings to port (west at yaw 0)
    assert v[0] < 0


def test_bow_up_pitch_swings_down_ray_forward():
    v = rotate_body_to_enu([0, 0, 1], Attitude.from_degrees(pitch=10))
    assert v[1] == approx(math.sin(math.radians(10)), abs=1e-12)
    assert rotate_body_to_enu([1, 0, 0], Attitude.from_degrees(pitch=10))[2] > 0


def test_yaw_is_clockwise_from_north():
    v = rotate_body_to_enu([1, 0, 0], Attitude.from_degrees(yaw=90))
    assert v == approx([1, 0, 0], abs=1e-12)


@given(angles, angles, angles, st.lists(st.floats(-100, 100), min_size=3, max_size=3))
def test_rotation_preserves_norm_and_inverts(r, p, y, v):
    a = Attitude(r, p, y)
    w = rotate_body_to_enu(v, a)
    assert np.linalg.norm(w) == approx(np.linalg.norm(v), rel=1e-12, abs=1e-12)
    assert rotate_enu_to_body(w, a) == approx(v, abs=1e-9)


def test_rotation_inverse_on_1000_vectors():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        a = Attitude(*rng.uniform(-math.pi, math.pi, 3))
        v = rng.normal(size=3)
        assert np.allclose(rotate_enu_to_body(rotate_body_to_enu(v, a), a), v, atol=1e-12)


def test_vectorised_matrices_match_scalar():
    rng = np.random.default_rng(5)
    r, p, y = rng.uniform(-3, 3, (3, 50))
    stack = body_to_enu_matrices(r, p, y)
    for k in range(50):
        assert np.allclose(stack[k], body_to_enu_matrix(Attitude(r[k], p[k], y[k])))


def test_lever_arm_cases():
    pose = Pose(0.0, EnuPoint(3.0, 4.0, 1.0))
    assert apply_lever_arm(pose, LeverArm()) == pose.position
    s = apply_lever_arm(pose, LeverArm((1.0, 0.0, 0.5)))
    assert s.as_array() == approx([3.0, 5.0, 0.5])
    tilted = Pose(0.0, EnuPoint(0, 0, 0), Attitude.from_degrees(pitch=10))
    s = apply_lever_arm(tilted, LeverArm((0.0, 0.0, 0.5)))
    assert math.hypot(s.east, s.north) == approx(0.5 * math.sin(math.radians(10)), abs=1e-12)
    assert math.hypot(s.east, s.north) == approx(0.087, abs=5e-4)


def test_lever_arm_limit():
    with pytest.raises(GeoDomainError):
        LeverArm((5.0, 0.0, 0.0))


def test_attitude_normalised():
    a = Attitude(3 * math.pi, 0.0, -math.pi / 2)
    assert a.roll == approx(math.pi)
    assert a.yaw == approx(1.5 * math.pi)
