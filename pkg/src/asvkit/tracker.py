"""
Follow/hold controller that keeps the vehicle within acoustic range of a
tracked beacon, and a closed-loop simulation of a tracking session.

Once per loop period the controller takes the latest beacon fix. Close to
the beacon (horizontal distance at most ``follow_threshold``) it holds
position; further away it sends a waypoint at the beacon's horizontal
position. Without a usable fix for longer than ``lost_timeout`` it holds
and reports LOST.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from .geo import Attitude, EnuPoint, GeoPoint, LeverArm, Pose, enu_to_geo_array
from .logfmt import (AttRecord, BatRecord, FixType, GpsRecord, LogHeader, ModeRecord,
                     MsgRecord, SblRawRecord, SblRecord, SurveyLog, TruthRecord)
from .sbl import (DEFAULT_SOUND_SPEED, AcousticNoiseModel, ReceiverArray, SblFix,
                  SolverSettings, simulate_toa, solve_fix)
from .sim import (ANTENNA_HEIGHT, DEFAULT_STARTED_AT, SIM_DT, BatteryModel, BeaconTrack,
                  SensorNoise, VehicleModel, VehicleState, WaveModel, step_vehicle)

BEACON_SPEED_WARNING = 1.2


class TrackerMode(str, Enum):
    HOLD = "HOLD"
    FOLLOW = "FOLLOW"
    LOST = "LOST"


class CommandKind(str, Enum):
    HOLD = "HOLD"
    SET_WAYPOINT = "SET_WAYPOINT"
    NONE = "NONE"       # keep executing the previous command


@dataclass(frozen=True)
class TrackerConfig:
    follow_threshold: float = 5.0
    loop_period: float = 1.0
    max_range_abort: float = 100.0
    lost_timeout: float = 10.0
    max_fix_std: float = 3.0
    range_warning: float = 50.0

    def __post_init__(self):
        if not 0.0 < self.follow_threshold < self.max_range_abort:
            raise ValueError("need 0 < follow_threshold < max_range_abort")
        if not self.loop_period > 0 or not self.lost_timeout > 0:
            raise ValueError("loop period and lost timeout must be positive")


@dataclass(frozen=True)
class TrackerState:
    mode: TrackerMode = TrackerMode.HOLD
    current_waypoint: Optional[EnuPoint] = None
    last_fix_age: float = 0.0
    waypoint_geo: Optional[GeoPoint] = None

    def __post_init__(self):
        if self.mode is TrackerMode.FOLLOW and self.current_waypoint is None:
            raise ValueError("FOLLOW needs a waypoint")


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    waypoint: Optional[EnuPoint] = None
    waypoint_geo: Optional[GeoPoint] = None


def horizontal_distance(a: EnuPoint, b: EnuPoint) -> float:
    return math.hypot(a.east - b.east, a.north - b.north)


def _usable(fix: Optional[SblFix], cfg: TrackerConfig) -> bool:
    return fix is not None and fix.valid and fix.std <= cfg.max_fix_std


def step(state: TrackerState, vehicle: Pose, fix: Optional[SblFix],
         cfg: TrackerConfig = TrackerConfig()):
    """One controller update. Returns ``(new_state, command)``."""
    if not _usable(fix, cfg):
        age = state.last_fix_age + cfg.loop_period
        if age > cfg.lost_timeout:
            return TrackerState(TrackerMode.LOST, None, age), Command(CommandKind.HOLD)
        return replace(state, last_fix_age=age), Command(CommandKind.NONE)
    b = fix.enu_position
    d = horizontal_distance(b, vehicle.position)
    if d <= cfg.follow_threshold:
        return TrackerState(TrackerMode.HOLD, None, 0.0), Command(CommandKind.HOLD)
    wp = EnuPoint(b.east, b.north, 0.0)
    geo = None
    if fix.geo_position is not None:
        geo = GeoPoint(fix.geo_position.latitude, fix.geo_position.longitude, 0.0)
    return (TrackerState(TrackerMode.FOLLOW, wp, 0.0, geo),
            Command(CommandKind.SET_WAYPOINT, wp, geo))


# ---------------------------------------------------------------------------
# closed-loop session


DEFAULT_ORIGIN = GeoPoint(43.0, 5.0, 0.0)
TRACKING_DRAW_W = 55.0


def array_lever_arms(array: ReceiverArray) -> dict:
    return {f"sbl_rx{i}": LeverArm(tuple(float(x) for x in row))
            for i, row in enumerate(array.as_array())}


def array_from_lever_arms(arms: dict) -> ReceiverArray:
    keys = [f"sbl_rx{i}" for i in range(4)]
    if not all(k in arms for k in keys):
        raise KeyError("header lacks sbl_rx0..sbl_rx3 lever arms")
    return ReceiverArray(tuple(tuple(arms[k].offset) for k in keys))


def track_session(beacon_track: BeaconTrack, vehicle_model: VehicleModel = VehicleModel(),
                  cfg: TrackerConfig = TrackerConfig(), seed=0,
                  start: tuple = (0.0, -20.0), array: Optional[ReceiverArray] = None,
                  noise: AcousticNoiseModel = AcousticNoiseModel(),
                  sensors: SensorNoise = SensorNoise(), waves: WaveModel = WaveModel(),
                  battery: Optional[BatteryModel] = None, origin: GeoPoint = DEFAULT_ORIGIN,
                  survey_id: str = "track", started_at: str = DEFAULT_STARTED_AT,
                  sound_speed: float = DEFAULT_SOUND_SPEED) -> SurveyLog:
    """Simulate the vehicle following ``beacon_track``.

    The vehicle is integrated every 0.1 s; the controller runs every
    ``cfg.loop_period``. Fixes are solved from the GPS/IMU pose as logged
    (with sensor noise), while arrival times come from the true pose.
    The log holds GPS and ATT at 10 Hz, and SBLR, SBL, TRUE and BAT at every
    controller update; MODE on transitions and MSG for warnings.
    """
    rng = np.random.default_rng(seed)
    array = array or ReceiverArray.square()
    battery = battery or BatteryModel.packs(4, TRACKING_DRAW_W)
    t0, t_end = float(beacon_track.t[0]), float(beacon_track.t[-1])
    n = int(math.floor((t_end - t0) / SIM_DT + 1e-9)) + 1
    t = np.round(t0 + np.arange(n) * SIM_DT, 6)
    every = max(1, int(round(cfg.loop_period / SIM_DT)))

    roll, pitch, _ = waves.series(t - t0, rng)
    gps_noise = rng.standard_normal((n, 3))
    att_noise = rng.standard_normal((n, 3))

    records = []
    warned = set()

    def warn(ti, text):
        if text not in warned:
            warned.add(text)
            records.append(MsgRecord(ti, "WARNING", text))

    if beacon_track.sustained_speed() > BEACON_SPEED_WARNING:
        warn(t0, f"beacon speed above {BEACON_SPEED_WARNING} m/s")

    b0 = beacon_track.at(t0)
    h0 = math.atan2(b0.east - start[0], b0.north - start[1])
    vs = VehicleState(t0, float(start[0]), float(start[1]), h0 % (2 * math.pi), 0.0)
    state = TrackerState()
    target = None
    prior = None
    settings = SolverSettings(max_range=cfg.max_range_abort)
    records.append(ModeRecord(t0, state.mode.value))
    enu = np.empty((n, 3))
    yaw = np.empty(n)

    for i in range(n):
        ti = float(t[i])
        if i > 0:
            vs = step_vehicle(vs, target, SIM_DT, vehicle_model)
            vs = replace(vs, t=ti)
        enu[i] = (vs.east, vs.north, ANTENNA_HEIGHT)
        yaw[i] = vs.heading
        if i % every:
            continue
        true_pose = Pose(ti, EnuPoint(vs.east, vs.north, ANTENNA_HEIGHT),
                         Attitude(roll[i], pitch[i], vs.heading))
        meas_pose = Pose(ti, EnuPoint(vs.east + gps_noise[i, 0] * sensors.gps_horizontal_sigma,
                                      vs.north + gps_noise[i, 1] * sensors.gps_horizontal_sigma,
                                      ANTENNA_HEIGHT + gps_noise[i, 2] * sensors.gps_vertical_sigma),
                         Attitude(roll[i] + att_noise[i, 0] * sensors.attitude_sigma,
                                  pitch[i] + att_noise[i, 1] * sensors.attitude_sigma,
                                  vs.heading + att_noise[i, 2] * sensors.attitude_sigma))
        beacon = beacon_track.at(ti)
        toa = simulate_toa(beacon, true_pose, array, noise, rng, sound_speed)
        fix = None
        if toa is not None:
            records.append(SblRawRecord(ti, toa.arrival_times, toa.sound_speed))
            fix = solve_fix(toa, meas_pose, array, prior, origin, settings)
            std = fix.std if math.isfinite(fix.std) else 1e9
            records.append(SblRecord(ti, *fix.rel_position, round(std, 6), fix.valid))
            if _usable(fix, cfg):
                prior = fix.enu_position
        records.append(TruthRecord(ti, (beacon.east, beacon.north, beacon.up),
                                   (vs.east, vs.north, ANTENNA_HEIGHT)))
        prev_mode = state.mode
        state, cmd = step(state, meas_pose, fix, cfg)
        if cmd.kind is CommandKind.HOLD:
            target = None
        elif cmd.kind is CommandKind.SET_WAYPOINT:
            target = (cmd.waypoint.east, cmd.waypoint.north)
        if state.mode is not prev_mode:
            records.append(ModeRecord(ti, state.mode.value))
        rng_true = float(np.linalg.norm(beacon.as_array() - true_pose.position.as_array()))
        if rng_true > cfg.range_warning:
            warn(ti, f"beacon range exceeded {cfg.range_warning:g} m")
        if rng_true > cfg.max_range_abort:
            warn(ti, f"beacon beyond acoustic range {cfg.max_range_abort:g} m")
        if state.mode is TrackerMode.LOST:
            warn(ti, "beacon lost")
        soc = battery.state_of_charge(ti - t0)
        if soc <= 0:
            warn(ti, "battery exhausted")
        v = battery.voltage(max(soc, 0.0))
        records.append(BatRecord(ti, round(v, 3), round(battery.avg_power_draw / v, 3)))

    gps_enu = enu + gps_noise * np.array([sensors.gps_horizontal_sigma,
                                          sensors.gps_horizontal_sigma,
                                          sensors.gps_vertical_sigma])
    lat, lon, hgt = enu_to_geo_array(gps_enu, origin)
    for i in range(n):
        ti = float(t[i])
        records.append(AttRecord(ti, float(roll[i] + att_noise[i, 0] * sensors.attitude_sigma),
                                 float(pitch[i] + att_noise[i, 1] * sensors.attitude_sigma),
                                 float(np.mod(yaw[i] + att_noise[i, 2] * sensors.attitude_sigma,
                                              2 * np.pi))))
        records.append(GpsRecord(ti, float(lat[i]), float(lon[i]), float(hgt[i]),
                                 FixType.RTK_FIXED, 0.8))
    order = {"ATT": 0, "GPS": 1, "SBLR": 2, "SBL": 3, "TRUE": 4, "MODE": 5, "BAT": 6, "MSG": 7}
    records.sort(key=lambda r: (r.t, order[r.TAG]))
    header = LogHeader(survey_id, origin, array_lever_arms(array), started_at)
    return SurveyLog(header, tuple(records))


# ---------------------------------------------------------------------------
# session statistics


@dataclass
class SessionStats:
    t: np.ndarray
    horizontal: np.ndarray      # beacon-vehicle horizontal distance per controller step
    slant: np.ndarray           # 3D beacon-vehicle range per controller step
    modes: dict                 # mode -> seconds spent
    warnings: list
    converged_at: Optional[float]

    @property
    def duration_min(self) -> float:
        return float(self.t[-1] - self.t[0]) / 60.0 if len(self.t) else 0.0

    def fraction_within(self, limit: float, horizontal: bool = False, after_convergence=False) -> float:
        d = self.horizontal if horizontal else self.slant
        if after_convergence:
            if self.converged_at is None:
                return 0.0
            d = d[self.t >= self.converged_at]
        return float(np.mean(d < limit)) if len(d) else 0.0

    def fraction_at_most(self, limit: float, after_convergence: bool = True) -> float:
        d = self.horizontal
        if after_convergence:
            if self.converged_at is None:
                return 0.0
            d = d[self.t >= self.converged_at]
        return float(np.mean(d <= limit)) if len(d) else 0.0

    def summary(self) -> dict:
        return {
            "duration_min": self.duration_min,
            "steps": int(len(self.t)),
            "max_range_m": float(self.slant.max()) if len(self.slant) else 0.0,
            "within_100m": self.fraction_within(100.0),
            "converged_at_s": self.converged_at,
            "mode_seconds": self.modes,
            "warnings": list(self.warnings),
        }


def session_stats(log: SurveyLog, converge_within: float = 7.0) -> SessionStats:
    """Ranges from TRUE records and time spent in each mode."""
    truth = log.of(TruthRecord)
    t = np.array([r.t for r in truth])
    b = np.array([r.beacon for r in truth]).reshape(-1, 3)
    v = np.array([r.vehicle for r in truth]).reshape(-1, 3)
    horiz = np.hypot(b[:, 0] - v[:, 0], b[:, 1] - v[:, 1])
    slant = np.linalg.norm(b - v, axis=1)
    hit = np.flatnonzero(horiz <= converge_within)
    conv = float(t[hit[0]]) if len(hit) else None
    modes = {}
    changes = log.of(ModeRecord)
    end = float(t[-1]) if len(t) else 0.0
    for a, nxt in zip(changes, list(changes[1:]) + [None]):
        stop = nxt.t if nxt is not None else end
        modes[a.mode] = modes.get(a.mode, 0.0) + max(stop - a.t, 0.0)
    warnings = [m.text for m in log.of(MsgRecord) if m.level == "WARNING"]
    return SessionStats(t, horiz, slant, modes, warnings, conv)
