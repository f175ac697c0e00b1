"""
Lawnmower survey planning over a rectangular area, sampling geometry and
IHO total-vertical-uncertainty checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .geo import EnuPoint, GeoPoint, enu_to_geo, geo_to_enu

SPEED_RANGE = (0.5, 1.2)
# IHO S-44 order 1a defaults
ORDER_1A_TVU_A = 0.5
ORDER_1A_TVU_B = 0.013
ORDER_1A_MAX_DEPTH = 100.0


class PlanningError(ValueError):
    pass


@dataclass(frozen=True)
class SurveyArea:
    center: GeoPoint
    width: float
    length: float
    bearing_of_length_axis: float = 0.0

    def __post_init__(self):
        if not (self.width > 0 and self.length > 0):
            raise PlanningError("area width and length must be positive")
        if self.width * self.length > 1e6:
            raise PlanningError("area larger than 1 km^2")

    @property
    def long_axis_bearing(self) -> float:
        """Bearing (degrees) of the longest side."""
        b = self.bearing_of_length_axis if self.length >= self.width else self.bearing_of_length_axis + 90.0
        return b % 360.0

    def axes(self):
        """Unit vectors (along long axis, across) in local east/north."""
        b = math.radians(self.long_axis_bearing)
        along = np.array([math.sin(b), math.cos(b)])
        across = np.array([math.cos(b), -math.sin(b)])
        return along, across

    def corners_enu(self) -> np.ndarray:
        """The four corners, relative to the center, counter-clockwise."""
        along, across = self.axes()
        hl = max(self.width, self.length) / 2
        hs = min(self.width, self.length) / 2
        pts = [-hl * along - hs * across, hl * along - hs * across,
               hl * along + hs * across, -hl * along + hs * across]
        pts = np.array(pts)
        # orientation depends on bearing handedness; enforce CCW
        x, y = pts[:, 0], pts[:, 1]
        if np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) < 0:
            pts = pts[::-1]
        return pts

    def contains(self, e, n, tol: float = 0.0) -> bool:
        along, across = self.axes()
        p = np.array([e, n])
        return (abs(p @ along) <= max(self.width, self.length) / 2 + tol
                and abs(p @ across) <= min(self.width, self.length) / 2 + tol)


@dataclass(frozen=True)
class MissionPlan:
    """Serpentine transect plan. ``waypoints_enu`` is relative to ``origin``."""

    waypoints: tuple
    transect_spacing: float
    cruise_speed: float
    sample_rate: float
    transect_count: int
    origin: GeoPoint = None
    waypoints_enu: tuple = ()
    area: SurveyArea = None

    def path_length(self) -> float:
        w = np.asarray(self.waypoints_enu, float)
        if len(w) < 2:
            return 0.0
        return float(np.sum(np.hypot(*np.diff(w[:, :2], axis=0).T)))

    def transect_length(self) -> float:
        w = np.asarray(self.waypoints_enu, float)
        return float(np.hypot(*(w[1, :2] - w[0, :2])))


@dataclass(frozen=True)
class SamplingSpec:
    along_track_spacing: float
    cross_track_spacing: float
    beam_angle: float

    def footprint_diameter_at(self, depth):
        """Diameter of the ensonified disc (m) at a given depth."""
        return 2.0 * np.asarray(depth, float) * math.tan(math.radians(self.beam_angle) / 2.0)


def approx_label(meters: float) -> str:
    """Length rounded to one significant figure, e.g. 0.0873 -> '≈ 9 cm'."""
    if not meters > 0:
        return "0 cm"
    cm = float(f"{meters * 100:.1g}")
    if cm >= 100:
        return f"≈ {cm / 100:g} m"
    return f"≈ {cm:g} cm"


def plan_lawnmower(area: SurveyArea, spacing: float, speed: float, rate: float,
                   allow_speed_override: bool = False) -> MissionPlan:
    """Boustrophedon transects parallel to the longest side of ``area``.

    Transects are spaced ``spacing`` apart, the first one inset by
    ``spacing / 2`` from the edge, and there are ``floor(short / spacing)``
    of them. Waypoints alternate direction on every transect.
    """
    short = min(area.width, area.length)
    long_ = max(area.width, area.length)
    if not spacing > 0:
        raise PlanningError("spacing must be positive")
    if spacing > short:
        raise PlanningError(f"spacing {spacing} m exceeds the short dimension {short} m")
    if not (speed > 0 and rate > 0):
        raise PlanningError("speed and sample rate must be positive")
    if not allow_speed_override and not (SPEED_RANGE[0] <= speed <= SPEED_RANGE[1]):
        raise PlanningError(f"cruise speed {speed} m/s outside {SPEED_RANGE}")

    count = int(math.floor(short / spacing + 1e-9))
    along, across = area.axes()
    wps = []
    for i in range(count):
        off = -short / 2 + spacing / 2 + i * spacing
        a = -long_ / 2 * along + off * across
        b = long_ / 2 * along + off * across
        wps.extend([a, b] if i % 2 == 0 else [b, a])
    enu = tuple((float(p[0]), float(p[1]), 0.0) for p in wps)
    geo = tuple(enu_to_geo(EnuPoint(*p), area.center) for p in enu)
    return MissionPlan(geo, float(spacing), float(speed), float(rate), count,
                       area.center, enu, area)


def sampling_spec(plan: MissionPlan, beam_angle: float = 5.0) -> SamplingSpec:
    if not 0 < beam_angle < 90:
        raise PlanningError("beam angle must be in (0, 90) degrees")
    return SamplingSpec(plan.cruise_speed / plan.sample_rate, plan.transect_spacing, beam_angle)


@dataclass
class IhoDepthCheck:
    depth: float
    allowed_tvu: float
    tvu_ok: bool


@dataclass
class IhoReport:
    checks: list
    depth_limit_ok: bool
    sensor_sigma: float
    max_depth: float = ORDER_1A_MAX_DEPTH

    @property
    def passed(self) -> bool:
        return self.depth_limit_ok and all(c.tvu_ok for c in self.checks)


def allowed_tvu(depth, a: float = ORDER_1A_TVU_A, b: float = ORDER_1A_TVU_B):
    return np.sqrt(a * a + (b * np.asarray(depth, float)) ** 2)


def check_iho_category(spec: SamplingSpec, depth_range, tvu_a: float = ORDER_1A_TVU_A,
                       tvu_b: float = ORDER_1A_TVU_B, sensor_sigma: float = 0.0,
                       max_depth: float = ORDER_1A_MAX_DEPTH) -> IhoReport:
    """Compare a sensor's vertical sigma with the allowed TVU at both depth bounds."""
    if tvu_a <= 0 or tvu_b <= 0:
        raise PlanningError("TVU coefficients must be positive")
    if sensor_sigma < 0:
        raise PlanningError("sensor sigma must be non-negative")
    lo, hi = float(depth_range[0]), float(depth_range[1])
    if not 0 < lo <= hi:
        raise PlanningError("depth range must satisfy 0 < min <= max")
    checks = []
    for d in (lo, hi):
        tvu = float(allowed_tvu(d, tvu_a, tvu_b))
        checks.append(IhoDepthCheck(d, tvu, sensor_sigma <= tvu))
    return IhoReport(checks, hi <= max_depth, sensor_sigma, max_depth)


def estimate_duration(plan: MissionPlan, turn_time: float = 10.0) -> float:
    """Seconds to fly the plan: path length / speed + one turn per transect."""
    return plan.path_length() / plan.cruise_speed + plan.transect_count * turn_time


# ---------------------------------------------------------------------------
# GeoJSON


def plan_parameters(plan: MissionPlan, beam_angle: float = 5.0) -> dict:
    spec = sampling_spec(plan, beam_angle)
    params = {
        "transect_count": plan.transect_count,
        "transect_spacing": plan.transect_spacing,
        "cruise_speed": plan.cruise_speed,
        "sample_rate": plan.sample_rate,
        "along_track_spacing": spec.along_track_spacing,
        "transect_length": plan.transect_length(),
        "path_length": plan.path_length(),
        "origin": [plan.origin.latitude, plan.origin.longitude, plan.origin.ellipsoidal_height],
    }
    if plan.area is not None:
        params["area"] = {
            "width": plan.area.width,
            "length": plan.area.length,
            "bearing_of_length_axis": plan.area.bearing_of_length_axis,
        }
    return params


def plan_to_geojson(plan: MissionPlan, turn_time: float = 10.0) -> dict:
    params = plan_parameters(plan)
    params["estimated_duration_s"] = estimate_duration(plan, turn_time)
    return {
        "type": "FeatureCollection",
        "features": [{
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [[p.longitude, p.latitude] for p in plan.waypoints],
            },
            "properties": {"name": "lawnmower"},
        }],
        "parameters": params,
    }


def plan_from_geojson(obj: dict) -> MissionPlan:
    params = obj["parameters"]
    origin = GeoPoint(*params["origin"])
    coords = obj["features"][0]["geometry"]["coordinates"]
    geo = tuple(GeoPoint(lat, lon, origin.ellipsoidal_height) for lon, lat in coords)
    enu = tuple(tuple(float(x) for x in geo_to_enu(p, origin).as_array()[:2]) + (0.0,)
                for p in geo)
    area = None
    if "area" in params:
        area = SurveyArea(origin, **params["area"])
    return MissionPlan(geo, params["transect_spacing"], params["cruise_speed"],
                       params["sample_rate"], params["transect_count"], origin, enu, area)


def save_plan(plan: MissionPlan, path, turn_time: float = 10.0):
    with open(path, "w") as fh:
        json.dump(plan_to_geojson(plan, turn_time), fh, indent=1)


def load_plan(path) -> MissionPlan:
    with open(path) as fh:
        return plan_from_geojson(json.load(fh))
