"""
Deterministic vehicle and environment simulator.

The vehicle is kinematic: a first-order speed lag plus a bounded turn rate,
steered by line-of-sight guidance along the active waypoint leg. Wave motion
is a pair of sinusoids with occasional gust spikes. Everything random comes
from a single ``numpy.random.Generator`` seeded by the caller, and is drawn
in a fixed order, so identical seeds give byte-identical logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .geo import (Attitude, EnuPoint, GeoPoint, LeverArm, body_to_enu_matrix,
                  enu_to_geo_array, wrap_2pi, wrap_pi)
from .logfmt import (AttRecord, BatRecord, DpthRecord, FixType, GpsRecord, LogHeader,
                     MsgRecord, SurveyLog, MAX_DEPTH)
from .mission import MissionPlan

SIM_DT = 0.1
DEFAULT_STARTED_AT = "2020-11-01T06:00:00Z"


class SimulationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class VehicleModel:
    max_speed: float = 1.2
    cruise_speed: float = 1.0
    turn_rate_max: float = 0.5
    speed_time_constant: float = 1.0
    waypoint_accept_radius: float = 0.5
    lookahead: float = 3.0
    drift: tuple = (0.0, 0.0)
    allow_fast: bool = False

    def __post_init__(self):
        if not 0 < self.cruise_speed <= self.max_speed:
            raise ValueError("need 0 < cruise_speed <= max_speed")
        if self.max_speed > 1.2 and not self.allow_fast:
            raise ValueError("max_speed above 1.2 m/s requires allow_fast=True")
        if self.turn_rate_max <= 0 or self.speed_time_constant <= 0:
            raise ValueError("turn rate and speed time constant must be positive")


@dataclass(frozen=True)
class VehicleState:
    t: float
    east: float
    north: float
    heading: float = 0.0
    speed: float = 0.0


def _command(state: VehicleState, target, model: VehicleModel, track_from=None):
    """Commanded (heading, speed) toward ``target``; speed 0 inside the accept radius."""
    if target is None:
        return state.heading, 0.0
    dx, dy = target[0] - state.east, target[1] - state.north
    dist = math.hypot(dx, dy)
    if dist <= model.waypoint_accept_radius:
        return state.heading, 0.0
    aim = target
    if track_from is not None:
        ax, ay = track_from[0], track_from[1]
        sx, sy = target[0] - ax, target[1] - ay
        seg = math.hypot(sx, sy)
        if seg > 1e-9:
            ux, uy = sx / seg, sy / seg
            along = (state.east - ax) * ux + (state.north - ay) * uy
            ahead = min(max(along, 0.0) + model.lookahead, seg)
            aim = (ax + ahead * ux, ay + ahead * uy)
    bearing = math.atan2(aim[0] - state.east, aim[1] - state.north)
    err = wrap_pi(bearing - state.heading)
    speed = model.cruise_speed * max(math.cos(err), 0.2)
    return bearing, speed


def step_vehicle(state: VehicleState, target_waypoint, dt: float, model: VehicleModel,
                 track_from=None) -> VehicleState:
    """Advance the kinematic vehicle by ``dt`` seconds toward a waypoint.

    ``target_waypoint`` is an (east, north) pair or ``None`` to hold
    position. ``track_from`` is the start of the active leg; when given,
    the vehicle steers onto the leg line instead of straight at the target.
    """
    if not 0 < dt <= 1.0:
        raise ValueError("dt must be in (0, 1] s")
    bearing, v_cmd = _command(state, target_waypoint, model, track_from)
    err = wrap_pi(bearing - state.heading)
    max_turn = model.turn_rate_max * dt
    heading = wrap_2pi(state.heading + max(-max_turn, min(max_turn, err)))
    speed = state.speed + (v_cmd - state.speed) * (1.0 - math.exp(-dt / model.speed_time_constant))
    speed = min(max(speed, 0.0), model.max_speed)
    if speed < 1e-9 and v_cmd == 0.0:
        speed = 0.0
    east = state.east + (speed * math.sin(heading) + model.drift[0]) * dt
    north = state.north + (speed * math.cos(heading) + model.drift[1]) * dt
    return VehicleState(round(state.t + dt, 6), east, north, heading, speed)


def reached(state: VehicleState, target, model: VehicleModel) -> bool:
    return math.hypot(target[0] - state.east, target[1] - state.north) <= model.waypoint_accept_radius


@dataclass(frozen=True)
class WaveModel:
    roll_amplitude: float = math.radians(3.0)
    pitch_amplitude: float = math.radians(2.0)
    period: float = 4.0
    gust_spike_probability: float = 0.002
    gust_magnitude: tuple = (math.radians(12.0), math.radians(20.0))
    gust_duration: float = 0.3

    def __post_init__(self):
        if self.roll_amplitude < 0 or self.pitch_amplitude < 0:
            raise ValueError("wave amplitudes must be >= 0")
        if self.period <= 0:
            raise ValueError("wave period must be positive")
        if not 0 <= self.gust_spike_probability <= 1:
            raise ValueError("gust probability must be in [0, 1]")

    @classmethod
    def calm(cls) -> "WaveModel":
        return cls(0.0, 0.0, 4.0, 0.0)

    def series(self, t: np.ndarray, rng: np.random.Generator):
        """Roll, pitch and a gust mask sampled at times ``t`` (fixed SIM_DT grid)."""
        phase_r, phase_p = rng.uniform(0, 2 * np.pi, 2)
        w = 2 * np.pi / self.period
        roll = self.roll_amplitude * np.sin(w * t + phase_r)
        pitch = self.pitch_amplitude * np.sin(w * t * 0.93 + phase_p)
        starts = rng.random(len(t)) < self.gust_spike_probability
        mags = rng.uniform(*self.gust_magnitude, size=len(t))
        signs = np.where(rng.random(len(t)) < 0.5, -1.0, 1.0)
        axis = rng.random(len(t)) < 0.5
        gust = np.zeros(len(t), bool)
        n_steps = max(1, int(round(self.gust_duration / SIM_DT)))
        for i in np.flatnonzero(starts):
            sl = slice(i, min(i + n_steps, len(t)))
            gust[sl] = True
            if axis[i]:
                roll[sl] = signs[i] * mags[i]
            else:
                pitch[sl] = signs[i] * mags[i]
        return roll, pitch, gust


class SeabedKind(str, Enum):
    PLANE = "PLANE"
    SLOPE = "SLOPE"
    ROCKS = "ROCKS"
    SAND_RIFT = "SAND_RIFT"
    COMPOSITE = "COMPOSITE"


@dataclass(frozen=True)
class SeabedModel:
    """Seabed depth below the water surface (positive down) over local ENU.

    ``rocks`` holds (east, north, height, radius) Gaussian mounds that make
    the water shallower; ``rifts`` holds (east, north, bearing_deg, depth,
    width) Gaussian trenches along an infinite line.
    """

    descriptor: SeabedKind = SeabedKind.PLANE
    mean_depth: float = 5.0
    slope: tuple = (0.0, 0.0)
    rocks: tuple = ()
    rifts: tuple = ()

    def depth(self, east, north):
        e = np.asarray(east, float)
        n = np.asarray(north, float)
        d = self.mean_depth + self.slope[0] * e + self.slope[1] * n
        for re, rn, h, r in self.rocks:
            d = d - h * np.exp(-((e - re) ** 2 + (n - rn) ** 2) / (2.0 * r * r))
        for fe, fn, bearing, depth, width in self.rifts:
            b = math.radians(bearing)
            off = (e - fe) * math.cos(b) - (n - fn) * math.sin(b)
            d = d + depth * np.exp(-off ** 2 / (2.0 * width * width))
        return d

    @classmethod
    def plane(cls, depth: float) -> "SeabedModel":
        return cls(SeabedKind.PLANE, depth)

    @classmethod
    def sloped(cls, depth: float, grad_east: float, grad_north: float = 0.0) -> "SeabedModel":
        return cls(SeabedKind.SLOPE, depth, (grad_east, grad_north))

    @classmethod
    def composite(cls, depth: float, extent: tuple, slope=(0.01, 0.005), n_rocks: int = 25,
                  rock_height: float = 1.0, rock_radius=(1.5, 3.0), n_rifts: int = 1,
                  rift_depth: float = 0.5, rift_width: float = 2.0, seed=0) -> "SeabedModel":
        """Tilted plane plus random rocks and sand rifts inside ``extent`` = (half_e, half_n)."""
        rng = np.random.default_rng(seed)
        he, hn = extent
        rocks = tuple(
            (float(rng.uniform(-he, he)), float(rng.uniform(-hn, hn)),
             float(rock_height), float(rng.uniform(*rock_radius)))
            for _ in range(n_rocks))
        rifts = tuple(
            (float(rng.uniform(-he, he)), float(rng.uniform(-hn, hn)),
             float(rng.uniform(0, 180)), float(rift_depth), float(rift_width))
            for _ in range(n_rifts))
        return cls(SeabedKind.COMPOSITE, depth, tuple(slope), rocks, rifts)

    def to_dict(self) -> dict:
        return {"kind": self.descriptor.value, "mean_depth": self.mean_depth,
                "slope": list(self.slope), "rocks": [list(r) for r in self.rocks],
                "rifts": [list(r) for r in self.rifts]}

    @classmethod
    def from_dict(cls, d: dict) -> "SeabedModel":
        """Build from a declarative spec (see README for the schema)."""
        kind = SeabedKind(d.get("kind", "PLANE").upper())
        depth = float(d["mean_depth"])
        if "generate" in d:
            g = dict(d["generate"])
            g.setdefault("extent", (60.0, 60.0))
            model = cls.composite(depth, tuple(g.pop("extent")), **g)
            return cls(kind, depth, model.slope, model.rocks, model.rifts)
        return cls(kind, depth, tuple(d.get("slope", (0.0, 0.0))),
                   tuple(tuple(map(float, r)) for r in d.get("rocks", ())),
                   tuple(tuple(map(float, r)) for r in d.get("rifts", ())))


@dataclass(frozen=True)
class BatteryModel:
    """Constant-power battery. Default: two 4S 10 Ah packs (2 x 148 Wh)."""

    capacity: float = 296.0
    avg_power_draw: float = 70.0
    voltage_curve: tuple = ((0.0, 13.2), (0.1, 14.4), (0.5, 15.2), (0.9, 16.2), (1.0, 16.8))

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError("battery capacity must be positive")
        if self.avg_power_draw < 0:
            raise ValueError("power draw must be non-negative")

    @classmethod
    def packs(cls, n: int, draw: float, pack_voltage: float = 14.8, pack_ah: float = 10.0):
        return cls(n * pack_voltage * pack_ah, draw)

    def endurance_hours(self) -> float:
        return math.inf if self.avg_power_draw == 0 else self.capacity / self.avg_power_draw

    def energy_used(self, elapsed_s: float) -> float:
        """Watt-hours consumed after ``elapsed_s`` seconds."""
        return self.avg_power_draw * elapsed_s / 3600.0

    def state_of_charge(self, elapsed_s: float) -> float:
        return max(0.0, 1.0 - self.energy_used(elapsed_s) / self.capacity)

    def voltage(self, soc: float) -> float:
        s, v = zip(*self.voltage_curve)
        return float(np.interp(soc, s, v))


@dataclass(frozen=True)
class SensorNoise:
    gps_horizontal_sigma: float = 0.02
    gps_vertical_sigma: float = 0.03
    attitude_sigma: float = math.radians(0.05)
    depth_sigma: float = 0.02
    depth_sigma_fraction: float = 0.002
    depth_spike_probability: float = 0.01
    depth_spike_range: tuple = (2.0, 8.0)
    min_range: float = 0.3

    @classmethod
    def none(cls) -> "SensorNoise":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


DEFAULT_SOUNDER_ARM = LeverArm((0.3, 0.0, 1.1))
ANTENNA_HEIGHT = 1.0


@dataclass
class SurveyTruth:
    """Ground truth kept alongside a simulated log, one entry per DPTH sample."""

    t: np.ndarray
    true_depth: np.ndarray        # seabed depth at the beam footprint
    ground_east: np.ndarray
    ground_north: np.ndarray
    gust: np.ndarray              # attitude beyond the gust threshold at sample time
    spike: np.ndarray             # injected echo spike
    on_transect: np.ndarray
    roll: np.ndarray
    pitch: np.ndarray
    energy_wh: float = 0.0
    elapsed_s: float = 0.0


@dataclass
class SimResult:
    log: SurveyLog
    truth: SurveyTruth
    warnings: list = field(default_factory=list)


def slant_range(sounder: np.ndarray, ray: np.ndarray, seabed: SeabedModel,
                iterations: int = 50) -> float:
    """Distance along ``ray`` from ``sounder`` (ENU, up relative to the surface) to the seabed."""
    if ray[2] >= -1e-9:
        return math.inf
    lam = (seabed.depth(sounder[0], sounder[1]) + sounder[2]) / -ray[2]
    for _ in range(iterations):
        p = sounder + lam * ray
        new = (float(seabed.depth(p[0], p[1])) + sounder[2]) / -ray[2]
        if abs(new - lam) < 1e-10:
            return new
        lam = 0.5 * (lam + new) if abs(new - lam) > 1.0 else new
    return lam


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def simulate_survey(plan: MissionPlan, vehicle: VehicleModel = VehicleModel(),
                    seabed: SeabedModel = SeabedModel(), waves: WaveModel = WaveModel(),
                    battery: BatteryModel = BatteryModel(),
                    lever_arms: Optional[dict] = None, noise: SensorNoise = SensorNoise(),
                    seed=0, survey_id: str = "sim", started_at: str = DEFAULT_STARTED_AT,
                    log_turns: bool = False, max_duration: float = 6 * 3600.0) -> SimResult:
    """Fly ``plan`` and return the survey log together with ground truth.

    The echo sounder logs only along transect legs unless ``log_turns``.
    GPS and ATT are logged at 10 Hz, BAT at 1 Hz.
    """
    rng = _rng(seed)
    if plan.cruise_speed != vehicle.cruise_speed:
        vehicle = replace(vehicle, cruise_speed=min(plan.cruise_speed, vehicle.max_speed))
    arms = dict(lever_arms or {"sounder": DEFAULT_SOUNDER_ARM})
    sounder_arm = arms["sounder"]
    wps = [tuple(p[:2]) for p in plan.waypoints_enu]
    if len(wps) < 2:
        raise SimulationError("plan needs at least two waypoints")
    if plan.transect_spacing < 2.0 * vehicle.waypoint_accept_radius:
        raise SimulationError("transect spacing below the waypoint accept radius")

    # kinematics
    first = wps[0]
    h0 = math.atan2(wps[1][0] - first[0], wps[1][1] - first[1])
    state = VehicleState(0.0, first[0], first[1], wrap_2pi(h0), 0.0)
    target_i = 1
    ts, es, ns, hs, legs = [0.0], [state.east], [state.north], [state.heading], [0]
    max_turn_seen = 0.0
    max_steps = int(max_duration / SIM_DT)
    warnings = []
    exhausted_at = None
    while target_i < len(wps):
        if len(ts) > max_steps:
            warnings.append("maximum duration reached before plan completion")
            break
        if battery.state_of_charge(state.t + SIM_DT) <= 0.0:
            exhausted_at = state.t
            warnings.append("battery exhausted; log truncated")
            break
        prev = state
        state = step_vehicle(state, wps[target_i], SIM_DT, vehicle, wps[target_i - 1])
        max_turn_seen = max(max_turn_seen, abs(wrap_pi(state.heading - prev.heading)) / SIM_DT)
        leg = target_i - 1
        if reached(state, wps[target_i], vehicle):
            target_i += 1
        ts.append(round(len(ts) * SIM_DT, 3))
        es.append(state.east)
        ns.append(state.north)
        hs.append(state.heading)
        legs.append(leg)
    assert max_turn_seen <= vehicle.turn_rate_max + 1e-9

    t = np.array(ts)
    east, north, heading = np.array(es), np.array(ns), np.array(hs)
    legs = np.array(legs)
    n = len(t)

    roll, pitch, gust = waves.series(t, rng)
    # random draws in fixed order
    gps_noise = rng.standard_normal((n, 3))
    att_noise = rng.standard_normal((n, 3))

    up = np.full(n, ANTENNA_HEIGHT)
    gps_enu = np.stack([east + gps_noise[:, 0] * noise.gps_horizontal_sigma,
                        north + gps_noise[:, 1] * noise.gps_horizontal_sigma,
                        up + gps_noise[:, 2] * noise.gps_vertical_sigma], axis=1)
    origin = GeoPoint(plan.origin.latitude, plan.origin.longitude, 0.0)
    lat, lon, hgt = enu_to_geo_array(gps_enu, origin)
    att_r = roll + att_noise[:, 0] * noise.attitude_sigma
    att_p = pitch + att_noise[:, 1] * noise.attitude_sigma
    att_y = np.mod(heading + att_noise[:, 2] * noise.attitude_sigma, 2 * np.pi)

    # echo sounder
    stride = max(1, int(round(1.0 / (plan.sample_rate * SIM_DT))))
    idx = np.arange(0, n, stride)
    on_transect = (legs[idx] % 2 == 0)
    if not log_turns:
        idx = idx[on_transect]
        on_transect = on_transect[on_transect]
    m = len(idx)
    depth_noise = rng.standard_normal(m)
    spike_u = rng.random(m)
    spike_mag = rng.uniform(*noise.depth_spike_range, size=m) if m else np.zeros(0)
    spike_sign = np.where(rng.random(m) < 0.5, -1.0, 1.0)
    arm = np.asarray(sounder_arm.offset)
    raw = np.empty(m)
    true_depth = np.empty(m)
    ge = np.empty(m)
    gn = np.empty(m)
    spike = np.zeros(m, bool)
    for k, i in enumerate(idx):
        a = Attitude(roll[i], pitch[i], heading[i])
        rot = body_to_enu_matrix(a)
        sounder = np.array([east[i], north[i], up[i]]) + rot @ arm
        ray = rot @ np.array([0.0, 0.0, 1.0])
        lam = slant_range(sounder, ray, seabed)
        ground = sounder + lam * ray
        ge[k], gn[k] = ground[0], ground[1]
        true_depth[k] = -ground[2]
        r = lam + depth_noise[k] * math.hypot(noise.depth_sigma, noise.depth_sigma_fraction * lam)
        if spike_u[k] < noise.depth_spike_probability:
            spike[k] = True
            r = r + spike_sign[k] * spike_mag[k]
            if r < noise.min_range:
                r = lam + spike_mag[k]
        raw[k] = r

    records = []
    for i in range(n):
        ti = float(t[i])
        records.append(AttRecord(ti, float(att_r[i]), float(att_p[i]), float(att_y[i])))
        records.append(GpsRecord(ti, float(lat[i]), float(lon[i]), float(hgt[i]),
                                 FixType.RTK_FIXED, 0.8))
    for k, i in enumerate(idx):
        r = float(raw[k])
        valid = math.isfinite(r) and noise.min_range <= r <= MAX_DEPTH
        records.append(DpthRecord(float(t[i]), r if valid else None))
    for i in range(0, n, int(round(1.0 / SIM_DT))):
        soc = battery.state_of_charge(float(t[i]))
        v = battery.voltage(soc)
        records.append(BatRecord(float(t[i]), round(v, 3), round(battery.avg_power_draw / v, 3)))
    end_t = float(t[-1])
    for w in warnings:
        records.append(MsgRecord(end_t, "WARNING", w))
    order = {"ATT": 0, "GPS": 1, "DPTH": 2, "BAT": 3, "MSG": 4}
    records.sort(key=lambda r: (r.t, order[r.TAG]))

    header = LogHeader(survey_id, origin, arms, started_at)
    log = SurveyLog(header, records)
    truth = SurveyTruth(t[idx], true_depth, ge, gn, gust[idx], spike, on_transect,
                        roll[idx], pitch[idx], battery.energy_used(end_t), end_t)
    if exhausted_at is not None:
        truth.elapsed_s = exhausted_at
    return SimResult(log, truth, warnings)


def run_survey(plan: MissionPlan, vehicle: VehicleModel = VehicleModel(),
               seabed: SeabedModel = SeabedModel(), waves: WaveModel = WaveModel(),
               battery: BatteryModel = BatteryModel(), lever_arms: Optional[dict] = None,
               noise: SensorNoise = SensorNoise(), seed=0, **kwargs) -> SurveyLog:
    return simulate_survey(plan, vehicle, seabed, waves, battery, lever_arms, noise,
                           seed, **kwargs).log


# ---------------------------------------------------------------------------
# beacon motion


class BeaconKind(str, Enum):
    STATIONARY = "STATIONARY"
    RANDOM_WALK = "RANDOM_WALK"
    DIVE_CYCLE = "DIVE_CYCLE"


@dataclass(frozen=True)
class BeaconParams:
    duration: float = 1500.0
    dt: float = 0.5
    start: tuple = (0.0, 0.0, -2.0)
    mean_speed: float = 0.8
    speed_jitter: float = 0.2
    heading_sigma: float = 0.15
    surface_offset: float = 0.5
    dive_depth: float = 6.0
    surface_interval: float = 60.0
    bottom_interval: float = 90.0
    vertical_speed: float = 0.4

    def __post_init__(self):
        if not 0 <= self.mean_speed <= 2.0:
            raise ValueError("beacon mean speed must be in [0, 2] m/s")
        if self.dt <= 0 or self.duration <= 0:
            raise ValueError("duration and dt must be positive")
        if self.start[2] >= 0:
            raise ValueError("beacon must start below the surface")
        if self.dive_depth < self.surface_offset:
            raise ValueError("dive depth shallower than the surface offset")


@dataclass(frozen=True)
class BeaconTrack:
    t: np.ndarray
    east: np.ndarray
    north: np.ndarray
    up: np.ndarray

    def at(self, t: float) -> EnuPoint:
        return EnuPoint(float(np.interp(t, self.t, self.east)),
                        float(np.interp(t, self.t, self.north)),
                        float(np.interp(t, self.t, self.up)))

    def horizontal_path_length(self) -> float:
        return float(np.sum(np.hypot(np.diff(self.east), np.diff(self.north))))

    def max_horizontal_speed(self) -> float:
        if len(self.t) < 2:
            return 0.0
        return float(np.max(np.hypot(np.diff(self.east), np.diff(self.north)) / np.diff(self.t)))

    def sustained_speed(self, window: float = 5.0) -> float:
        """Largest mean horizontal speed over any ``window``-second span."""
        if len(self.t) < 2:
            return 0.0
        j = np.searchsorted(self.t, self.t + window)
        j = np.minimum(j, len(self.t) - 1)
        ok = j > np.arange(len(self.t))
        i = np.flatnonzero(ok)
        dist = np.hypot(self.east[j[ok]] - self.east[i], self.north[j[ok]] - self.north[i])
        return float(np.max(dist / (self.t[j[ok]] - self.t[i])))

    @classmethod
    def from_points(cls, points) -> "BeaconTrack":
        a = np.asarray(points, float)
        return cls(a[:, 0], a[:, 1], a[:, 2], a[:, 3])


def _dive_depth_profile(t: np.ndarray, p: BeaconParams) -> np.ndarray:
    travel = (p.dive_depth - p.surface_offset) / p.vertical_speed
    cycle = p.surface_interval + 2 * travel + p.bottom_interval
    phase = np.mod(t, cycle)
    d = np.full_like(t, p.surface_offset)
    down = (phase >= p.surface_interval) & (phase < p.surface_interval + travel)
    d[down] = p.surface_offset + (phase[down] - p.surface_interval) * p.vertical_speed
    bottom = (phase >= p.surface_interval + travel) & (phase < p.surface_interval + travel + p.bottom_interval)
    d[bottom] = p.dive_depth
    upw = phase >= p.surface_interval + travel + p.bottom_interval
    d[upw] = p.dive_depth - (phase[upw] - p.surface_interval - travel - p.bottom_interval) * p.vertical_speed
    return d


def beacon_profile(kind, params: BeaconParams = BeaconParams(), seed=0) -> BeaconTrack:
    """Timestamped beacon positions (ENU, up negative underwater)."""
    kind = BeaconKind(kind)
    rng = _rng(seed)
    n = int(round(params.duration / params.dt)) + 1
    t = np.round(np.arange(n) * params.dt, 6)
    e0, n0, u0 = params.start
    if kind is BeaconKind.STATIONARY:
        return BeaconTrack(t, np.full(n, e0), np.full(n, n0), np.full(n, u0))
    heading = rng.uniform(0, 2 * np.pi) + np.cumsum(
        rng.standard_normal(n) * params.heading_sigma * math.sqrt(params.dt))
    speed = np.clip(params.mean_speed * (1 + params.speed_jitter * rng.standard_normal(n)), 0.0, 2.0)
    step = speed * params.dt
    de = np.concatenate([[0.0], (step * np.sin(heading))[:-1]])
    dn = np.concatenate([[0.0], (step * np.cos(heading))[:-1]])
    east = e0 + np.cumsum(de)
    north = n0 + np.cumsum(dn)
    if kind is BeaconKind.RANDOM_WALK:
        up = np.full(n, u0)
    else:
        up = -_dive_depth_profile(t, params)
    return BeaconTrack(t, east, north, up)
