"""Shared fixture builders for the test suite."""

import numpy as np

from asvkit.geo import GeoPoint, LeverArm
from asvkit.logfmt import (AttRecord, BatRecord, DpthRecord, FixType, GpsRecord, LogHeader,
                           ModeRecord, MsgRecord, OpaqueRecord, SblRawRecord, SblRecord,
                           SurveyLog, TruthRecord)

_TEXT = "abcdefghijklmnopqrstuvwxyz ÄéΩ漢-_.:/"


def _word(rng, k=8):
    return "".join(rng.choice(list(_TEXT), size=rng.integers(0, k + 1)))


def random_record(rng, t):
    kind = rng.integers(0, 11)
    u = lambda a, b: float(rng.uniform(a, b))  # noqa: E731
    if kind == 0:
        return AttRecord(t, u(-1, 1), u(-1, 1), u(0, 6.28))
    if kind == 1:
        return GpsRecord(t, u(-89, 89), u(-179, 179), u(-50, 50),
                         list(FixType)[rng.integers(0, 4)], u(0.5, 5))
    if kind == 2:
        return DpthRecord(t, None if rng.random() < 0.1 else u(0.3, 50))
    if kind == 3:
        return SblRecord(t, u(-99, 99), u(-99, 99), u(0, 99), u(0, 10), bool(rng.random() < 0.8))
    if kind == 4:
        return SblRawRecord(t, tuple(u(1e-3, 0.07) for _ in range(4)), u(1450, 1560))
    if kind == 5:
        return BatRecord(t, u(10, 17), u(0, 10))
    if kind == 6:
        return ModeRecord(t, ["HOLD", "FOLLOW", "LOST"][rng.integers(0, 3)])
    if kind == 7:
        return TruthRecord(t, (u(-50, 50), u(-50, 50), u(-10, -0.1)), (u(-50, 50), u(-50, 50), 1.0))
    if kind == 8:
        return MsgRecord(t, "INFO", _word(rng, 20))
    if kind == 9:
        return OpaqueRecord(t, "X" + _word(rng, 3).upper().replace(" ", ""),
                            {"a": int(rng.integers(-5, 5)), "b": [u(0, 1)], "c": _word(rng)})
    return AttRecord(t, 0.0, 0.0, 0.0)


def random_log(rng, max_records=30) -> SurveyLog:
    n = int(rng.integers(0, max_records + 1))
    t = np.sort(np.round(rng.uniform(0, 1000, n), 3))
    arms = {f"arm{i}": LeverArm(tuple(float(x) for x in rng.uniform(-2, 2, 3)))
            for i in range(rng.integers(0, 3))}
    header = LogHeader(_word(rng) or "s", GeoPoint(float(rng.uniform(-80, 80)),
                                                   float(rng.uniform(-170, 170)),
                                                   float(rng.uniform(-30, 30))),
                       arms, "2020-11-01T06:00:00Z")
    return SurveyLog(header, [random_record(rng, float(ti)) for ti in t])


def sample_geometry(rng, array, r_min=5.0, r_max=100.0, tilt_sigma=0.03,
                    min_depression_deg=2.0, max_depth=50.0):
    """Random vehicle pose and a non-degenerate beacon position.

    Non-degenerate means the beacon sits at least ``min_depression_deg`` below
    the receiver plane (and at least 1 m below it), where the two mirror
    solutions of a planar array separate cleanly.
    """
    while True:
        pose, beacon, r = _geometry(rng, array, r_min, r_max, tilt_sigma, min_depression_deg,
                                    max_depth)
        if beacon.up < -0.5:
            return pose, beacon, r


def _geometry(rng, array, r_min, r_max, tilt_sigma, min_depression_deg, max_depth):
    import math

    from asvkit.geo import Attitude, EnuPoint, Pose, body_to_enu_matrix

    r = float(rng.uniform(r_min, r_max))
    lo = max(1.0, r * math.sin(math.radians(min_depression_deg)))
    hi = min(max_depth, 0.95 * r)
    depth = float(rng.uniform(lo, hi))
    el = math.asin(depth / r)
    az = float(rng.uniform(0, 2 * math.pi))
    att = Attitude(float(rng.normal(0, tilt_sigma)), float(rng.normal(0, tilt_sigma)),
                   float(rng.uniform(0, 2 * math.pi)))
    pose = Pose(0.0, EnuPoint(float(rng.uniform(-50, 50)), float(rng.uniform(-50, 50)), 0.0), att)
    body = array.centroid + r * np.array([math.cos(el) * math.cos(az),
                                          math.cos(el) * math.sin(az), math.sin(el)])
    beacon = pose.position.as_array() + body_to_enu_matrix(att) @ body
    return pose, EnuPoint.from_array(beacon), r


def ideal_log(waypoints, speed=0.8, rate=10.0, origin=None):
    """Level-attitude GPS/ATT log along a polyline of ENU waypoints at constant speed."""
    from asvkit.geo import GeoPoint, enu_to_geo_array
    from asvkit.logfmt import AttRecord, GpsRecord, LogHeader, SurveyLog

    origin = origin or GeoPoint(-22.340984, 40.337634)
    wp = np.asarray(waypoints, float)
    seg = np.diff(wp, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    t = np.arange(0.0, cum[-1] / speed + 1e-9, 1.0 / rate)
    s = t * speed
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    frac = (s - cum[k]) / seg_len[k]
    e = wp[k, 0] + frac * seg[k, 0]
    n = wp[k, 1] + frac * seg[k, 1]
    yaw = np.mod(np.arctan2(seg[k, 0], seg[k, 1]), 2 * np.pi)
    lat, lon, h = enu_to_geo_array(np.column_stack([e, n, np.zeros_like(e)]), origin)
    recs = []
    for i in range(len(t)):
        ti = round(float(t[i]), 6)
        recs.append(GpsRecord(ti, float(lat[i]), float(lon[i]), float(h[i])))
        recs.append(AttRecord(ti, 0.0, 0.0, float(yaw[i])))
    return SurveyLog(LogHeader("ideal", origin), recs)


def lawnmower_waypoints(n_lines, spacing, length):
    wp = []
    for i in range(n_lines):
        x = i * spacing
        ys = (0.0, length) if i % 2 == 0 else (length, 0.0)
        wp += [(x, ys[0]), (x, ys[1])]
    return wp


def _mutate_json_line(rng, line: bytes) -> bytes:
    import json
    try:
        obj = json.loads(line)
    except ValueError:
        return line
    if not isinstance(obj, dict) or not obj:
        return line
    key = list(obj)[int(rng.integers(len(obj)))]
    choices = [None, -1, 0, 1e308, -1e308, "x", [], {}, [1, 2], True, 2 ** 70, "NaN", 51.0]
    if rng.random() < 0.2:
        del obj[key]
    else:
        obj[key] = choices[int(rng.integers(len(choices)))]
    return json.dumps(obj).encode()


def fuzz_inputs(rng, n, seeds=None):
    """Yield ``n`` byte strings: raw noise, byte-level and field-level mutations of valid logs."""
    from asvkit.logfmt import dumps_log

    seeds = seeds or [dumps_log(random_log(np.random.default_rng(k), 8)) for k in range(64)]
    for _ in range(n):
        base = seeds[int(rng.integers(len(seeds)))]
        kind = int(rng.integers(5))
        if kind == 0:
            yield rng.integers(0, 256, int(rng.integers(0, 200)), dtype=np.uint8).tobytes()
        elif kind == 1:
            b = bytearray(base)
            for _ in range(int(rng.integers(1, 6))):
                if b:
                    b[int(rng.integers(len(b)))] = int(rng.integers(256))
            yield bytes(b)
        elif kind == 2:
            yield base[:int(rng.integers(len(base) + 1))]
        elif kind == 3:
            lines = base.split(b"\n")
            i = int(rng.integers(len(lines)))
            lines[i] = _mutate_json_line(rng, lines[i])
            yield b"\n".join(lines)
        else:
            lines = base.split(b"\n")
            rng.shuffle(lines)
            yield b"\n".join(lines[:int(rng.integers(len(lines) + 1))])


def fuzz_parser(n, seed=0):
    """Feed ``n`` fuzzed inputs to the parser. Returns (accepted, rejected) counts;
    any exception other than LogError propagates."""
    from asvkit.logfmt import LogError, read_log

    ok = bad = 0
    for data in fuzz_inputs(np.random.default_rng(seed), n):
        try:
            read_log(data)
            ok += 1
        except LogError:
            bad += 1
    return ok, bad
