"""
Geodetic and local-frame geometry shared by every other module.

Frames
------
- Geodetic: WGS84 latitude/longitude in degrees, ellipsoidal height in meters.
- Local: East-North-Up tangent plane anchored at a per-survey origin.
- Body: forward, starboard, down (FRD), aerospace convention.

Attitude is applied as intrinsic yaw -> pitch -> roll (Z-Y-X). Yaw is the
heading, clockwise from true north. Positive roll lowers the starboard side,
positive pitch raises the bow. With zero attitude, forward maps to north,
starboard to east and down to -up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# WGS84
WGS84_A = 6378137.0
WGS84_F = 1.0 / 298.257223563
WGS84_B = WGS84_A * (1.0 - WGS84_F)
WGS84_E2 = WGS84_F * (2.0 - WGS84_F)

MAX_LOCAL_DISTANCE = 50_000.0
MAX_LEVER_ARM = 5.0


class GeoDomainError(ValueError):
    """Coordinates outside their valid domain."""


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float
    ellipsoidal_height: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.latitude) and -90.0 <= self.latitude <= 90.0):
            raise GeoDomainError(f"latitude out of range: {self.latitude}")
        if not (math.isfinite(self.longitude) and -180.0 <= self.longitude <= 180.0):
            raise GeoDomainError(f"longitude out of range: {self.longitude}")
        if not math.isfinite(self.ellipsoidal_height):
            raise GeoDomainError("ellipsoidal height must be finite")


@dataclass(frozen=True)
class EnuPoint:
    east: float
    north: float
    up: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.east, self.north, self.up)):
            raise GeoDomainError(f"non-finite ENU point: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.east, self.north, self.up])

    @classmethod
    def from_array(cls, v) -> "EnuPoint":
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def horizontal_distance(self, other: "EnuPoint") -> float:
        return math.hypot(self.east - other.east, self.north - other.north)


def wrap_pi(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.remainder(angle, 2.0 * math.pi)
    return math.pi if a == -math.pi else a


def wrap_2pi(angle: float) -> float:
    """Wrap an angle to [0, 2 pi)."""
    a = math.fmod(angle, 2.0 * math.pi)
    if a < 0.0:
        a += 2.0 * math.pi
    return 0.0 if a >= 2.0 * math.pi else a


@dataclass(frozen=True)
class Attitude:
    """Roll, pitch and yaw in radians. Angles are normalised on construction."""

    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.roll, self.pitch, self.yaw)):
            raise GeoDomainError("attitude angles must be finite")
        object.__setattr__(self, "roll", wrap_pi(self.roll))
        object.__setattr__(self, "pitch", wrap_pi(self.pitch))
        object.__setattr__(self, "yaw", wrap_2pi(self.yaw))

    @classmethod
    def from_degrees(cls, roll=0.0, pitch=0.0, yaw=0.0) -> "Attitude":
        return cls(math.radians(roll), math.radians(pitch), math.radians(yaw))


@dataclass(frozen=True)
class Pose:
    timestamp: float
    position: EnuPoint
    attitude: Attitude = field(default_factory=Attitude)


@dataclass(frozen=True)
class LeverArm:
    """Body-frame offset (forward, starboard, down) in meters."""

    offset: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        v = tuple(float(x) for x in self.offset)
        if len(v) != 3 or not all(math.isfinite(x) for x in v):
            raise GeoDomainError(f"lever arm must be a finite 3-vector: {self.offset}")
        if math.sqrt(sum(x * x for x in v)) >= MAX_LEVER_ARM:
            raise GeoDomainError(f"lever arm magnitude >= {MAX_LEVER_ARM} m: {v}")
        object.__setattr__(self, "offset", v)


# ---------------------------------------------------------------------------
# geodetic <-> ECEF <-> ENU


def geodetic_to_ecef(lat_deg, lon_deg, h):
    lat = np.radians(lat_deg)
    lon = np.radians(lon_deg)
    s, c = np.sin(lat), np.cos(lat)
    n = WGS84_A / np.sqrt(1.0 - WGS84_E2 * s * s)
    x = (n + h) * c * np.cos(lon)
    y = (n + h) * c * np.sin(lon)
    z = (n * (1.0 - WGS84_E2) + h) * s
    return x, y, z


def ecef_to_geodetic(x, y, z):
    """Closed-form Bowring-style start refined by a few fixed-point steps."""
    lon = np.arctan2(y, x)
    p = np.hypot(x, y)
    lat = np.arctan2(z, p * (1.0 - WGS84_E2))
    for _ in range(5):
        s = np.sin(lat)
        n = WGS84_A / np.sqrt(1.0 - WGS84_E2 * s * s)
        h = p / np.cos(lat) - n
        lat = np.arctan2(z, p * (1.0 - WGS84_E2 * n / (n + h)))
    s = np.sin(lat)
    n = WGS84_A / np.sqrt(1.0 - WGS84_E2 * s * s)
    h = p / np.cos(lat) - n
    return np.degrees(lat), np.degrees(lon), h


def _enu_basis(lat_deg, lon_deg):
    lat = math.radians(lat_deg)
    lon = math.radians(lon_deg)
    sl, cl = math.sin(lat), math.cos(lat)
    so, co = math.sin(lon), math.cos(lon)
    # rows: east, north, up in ECEF
    return np.array([
        [-so, co, 0.0],
        [-sl * co, -sl * so, cl],
        [cl * co, cl * so, sl],
    ])


def geo_to_enu_array(lat, lon, h, origin: GeoPoint) -> np.ndarray:
    """Vectorised conversion; returns an (N, 3) array of east, north, up."""
    x, y, z = geodetic_to_ecef(np.asarray(lat, float), np.asarray(lon, float),
                               np.asarray(h, float))
    x0, y0, z0 = geodetic_to_ecef(origin.latitude, origin.longitude,
                                  origin.ellipsoidal_height)
    d = np.stack([np.atleast_1d(x - x0), np.atleast_1d(y - y0), np.atleast_1d(z - z0)])
    return (_enu_basis(origin.latitude, origin.longitude) @ d).T


def enu_to_geo_array(enu, origin: GeoPoint):
    """Inverse of :func:`geo_to_enu_array`; returns (lat, lon, h) arrays."""
    enu = np.atleast_2d(np.asarray(enu, float))
    x0, y0, z0 = geodetic_to_ecef(origin.latitude, origin.longitude,
                                  origin.ellipsoidal_height)
    d = _enu_basis(origin.latitude, origin.longitude).T @ enu.T
    return ecef_to_geodetic(d[0] + x0, d[1] + y0, d[2] + z0)


def geo_to_enu(p: GeoPoint, origin: GeoPoint) -> EnuPoint:
    enu = geo_to_enu_array(p.latitude, p.longitude, p.ellipsoidal_height, origin)[0]
    if math.hypot(enu[0], enu[1]) > MAX_LOCAL_DISTANCE:
        raise GeoDomainError("point is more than 50 km from the local origin")
    return EnuPoint.from_array(enu)


def enu_to_geo(p: EnuPoint, origin: GeoPoint) -> GeoPoint:
    if math.sqrt(p.east ** 2 + p.north ** 2 + p.up ** 2) > MAX_LOCAL_DISTANCE:
        raise GeoDomainError("ENU point is more than 50 km from the origin")
    lat, lon, h = enu_to_geo_array(p.as_array(), origin)
    lon = float((lon[0] + 180.0) % 360.0 - 180.0)
    return GeoPoint(float(lat[0]), lon, float(h[0]))


# ---------------------------------------------------------------------------
# rotations

# NED -> ENU axis swap
_NED_TO_ENU = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


def body_to_ned_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


def body_to_enu_matrix(a: Attitude) -> np.ndarray:
    return _NED_TO_ENU @ body_to_ned_matrix(a.roll, a.pitch, a.yaw)


def rotate_body_to_enu(v, a: Attitude) -> np.ndarray:
    """Rotate a body-frame (forward, starboard, down) vector into ENU."""
    return body_to_enu_matrix(a) @ np.asarray(v, dtype=float)


def rotate_enu_to_body(v, a: Attitude) -> np.ndarray:
    return body_to_enu_matrix(a).T @ np.asarray(v, dtype=float)


def apply_lever_arm(antenna_pose: Pose, arm: LeverArm) -> EnuPoint:
    """ENU position of a sensor mounted at ``arm`` relative to the GPS antenna."""
    offset = rotate_body_to_enu(arm.offset, antenna_pose.attitude)
    return EnuPoint.from_array(antenna_pose.position.as_array() + offset)


def body_to_enu_matrices(roll, pitch, yaw) -> np.ndarray:
    """Stack of body->ENU rotation matrices, shape (N, 3, 3)."""
    roll, pitch, yaw = (np.atleast_1d(np.asarray(x, float)) for x in (roll, pitch, yaw))
    cr, sr = np.cos(roll), np.sin(roll)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    ned = np.empty(roll.shape + (3, 3))
    ned[:, 0, 0] = cy * cp
    ned[:, 0, 1] = cy * sp * sr - sy * cr
    ned[:, 0, 2] = cy * sp * cr + sy * sr
    ned[:, 1, 0] = sy * cp
    ned[:, 1, 1] = sy * sp * sr + cy * cr
    ned[:, 1, 2] = sy * sp * cr - cy * sr
    ned[:, 2, 0] = -sp
    ned[:, 2, 1] = cp * sr
    ned[:, 2, 2] = cp * cr
    return _NED_TO_ENU @ ned
