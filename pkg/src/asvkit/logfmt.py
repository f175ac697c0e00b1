"""
Survey log record stream (``.svlog``).

A log is UTF-8 JSON-lines: one header object first, then one record per line
in non-decreasing timestamp order. Every object has a ``tag`` key.

Known record tags
-----------------
HDR   header: schema_version, survey_id, origin{lat, lon, h}, lever_arms{name: [f, s, d]}, started_at
ATT   t, roll, pitch, yaw (radians)
GPS   t, lat, lon, h, fix (NONE | 3D | RTK_FLOAT | RTK_FIXED), hdop
DPTH  t, depth (meters positive-down, null for a dropout)
SBL   t, rel_x, rel_y, rel_z (body FRD, meters), std, valid
SBLR  t, toa[4] (seconds), c (sound speed, m/s)
BAT   t, voltage, current
MODE  t, mode (tracker mode transition)
TRUE  t, beacon[e, n, u], vehicle[e, n, u] (simulation truth, ENU)
MSG   t, level, text

Any other tag is kept verbatim as an :class:`OpaqueRecord`.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import MISSING, dataclass, field, fields
from enum import Enum
from typing import IO, Iterable, Optional, Union

from .geo import GeoDomainError, GeoPoint, LeverArm

SCHEMA_VERSION = 1
MAX_DEPTH = 50.0


class LogError(ValueError):
    """Base class for structured log errors."""


class LogParseError(LogError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class LogValidationError(LogError):
    def __init__(self, message: str, offending: Iterable[int] = ()):
        self.offending = list(offending)
        if self.offending:
            message = f"{message} (lines {', '.join(map(str, self.offending[:20]))})"
        super().__init__(message)


class FixType(str, Enum):
    NONE = "NONE"
    FIX_3D = "3D"
    RTK_FLOAT = "RTK_FLOAT"
    RTK_FIXED = "RTK_FIXED"


def _finite(*vals):
    return all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
               for v in vals)


@dataclass(frozen=True)
class AttRecord:
    t: float
    roll: float
    pitch: float
    yaw: float
    TAG = "ATT"

    def validate(self):
        if not _finite(self.roll, self.pitch, self.yaw):
            raise ValueError("ATT angles must be finite numbers")


@dataclass(frozen=True)
class GpsRecord:
    t: float
    lat: float
    lon: float
    h: float
    fix: FixType = FixType.RTK_FIXED
    hdop: float = 1.0
    TAG = "GPS"

    def validate(self):
        if not _finite(self.lat, self.lon, self.h, self.hdop):
            raise ValueError("GPS fields must be finite numbers")
        GeoPoint(self.lat, self.lon, self.h)
        if self.hdop < 0:
            raise ValueError("GPS hdop must be >= 0")

    @property
    def point(self) -> GeoPoint:
        return GeoPoint(self.lat, self.lon, self.h)


@dataclass(frozen=True)
class DpthRecord:
    t: float
    depth: Optional[float]
    TAG = "DPTH"

    def validate(self):
        if self.depth is None:
            return
        if not _finite(self.depth) or not (0.0 < self.depth <= MAX_DEPTH):
            raise ValueError(f"DPTH depth {self.depth!r} outside (0, {MAX_DEPTH}]")


@dataclass(frozen=True)
class SblRecord:
    t: float
    rel_x: float
    rel_y: float
    rel_z: float
    std: float
    valid: bool = True
    TAG = "SBL"

    def validate(self):
        if not _finite(self.rel_x, self.rel_y, self.rel_z):
            raise ValueError("SBL position must be finite")
        if not (_finite(self.std) and self.std >= 0):
            raise ValueError("SBL std must be a finite non-negative number")
        if not isinstance(self.valid, bool):
            raise ValueError("SBL valid must be a boolean")


@dataclass(frozen=True)
class SblRawRecord:
    t: float
    toa: tuple
    c: float
    TAG = "SBLR"

    def validate(self):
        if len(self.toa) != 4 or not _finite(*self.toa) or min(self.toa) <= 0:
            raise ValueError("SBLR needs 4 positive arrival times")
        if not _finite(self.c) or not 1400.0 <= self.c <= 1600.0:
            raise ValueError("SBLR sound speed outside [1400, 1600]")


@dataclass(frozen=True)
class BatRecord:
    t: float
    voltage: float
    current: float
    TAG = "BAT"

    def validate(self):
        if not _finite(self.voltage, self.current) or not 0.0 < self.voltage < 30.0:
            raise ValueError(f"BAT voltage {self.voltage!r} outside (0, 30)")


@dataclass(frozen=True)
class ModeRecord:
    t: float
    mode: str
    TAG = "MODE"

    def validate(self):
        if not isinstance(self.mode, str):
            raise ValueError("MODE mode must be a string")


@dataclass(frozen=True)
class TruthRecord:
    t: float
    beacon: tuple
    vehicle: tuple
    TAG = "TRUE"

    def validate(self):
        if len(self.beacon) != 3 or len(self.vehicle) != 3 or not _finite(*self.beacon, *self.vehicle):
            raise ValueError("TRUE positions must be finite 3-vectors")


@dataclass(frozen=True)
class MsgRecord:
    t: float
    level: str
    text: str
    TAG = "MSG"

    def validate(self):
        if not isinstance(self.level, str) or not isinstance(self.text, str):
            raise ValueError("MSG level and text must be strings")


@dataclass(frozen=True)
class OpaqueRecord:
    """A record with a tag this library does not interpret."""

    t: float
    tag: str
    data: dict = field(default_factory=dict, compare=True)

    def validate(self):
        pass


LogRecord = Union[AttRecord, GpsRecord, DpthRecord, SblRecord, SblRawRecord, BatRecord,
                  ModeRecord, TruthRecord, MsgRecord, OpaqueRecord]

RECORD_TYPES = {cls.TAG: cls for cls in (AttRecord, GpsRecord, DpthRecord, SblRecord,
                                         SblRawRecord, BatRecord, ModeRecord, TruthRecord,
                                         MsgRecord)}
_TUPLE_FIELDS = {"toa", "beacon", "vehicle"}


def record_tag(rec) -> str:
    return rec.tag if isinstance(rec, OpaqueRecord) else rec.TAG


@dataclass(frozen=True)
class LogHeader:
    survey_id: str
    origin: GeoPoint
    lever_arms: dict = field(default_factory=dict)
    started_at: str = "1970-01-01T00:00:00Z"
    schema_version: int = SCHEMA_VERSION


@dataclass(frozen=True)
class SurveyLog:
    header: LogHeader
    records: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def of(self, *types) -> list:
        return [r for r in self.records if isinstance(r, types)]

    def span(self) -> tuple:
        if not self.records:
            return (0.0, 0.0)
        return (self.records[0].t, self.records[-1].t)

    def validate(self) -> "SurveyLog":
        bad = []
        for i, r in enumerate(self.records):
            if not _finite(r.t) or r.t < 0:
                bad.append(i + 2)
        if bad:
            raise LogValidationError("records with invalid timestamps", bad)
        unordered = [i + 2 for i in range(1, len(self.records))
                     if self.records[i].t < self.records[i - 1].t]
        if unordered:
            raise LogValidationError("records out of timestamp order", unordered)
        for i, r in enumerate(self.records):
            try:
                r.validate()
            except (ValueError, TypeError) as exc:
                raise LogValidationError(f"{record_tag(r)} record invalid: {exc}", [i + 2]) from None
        return self


# ---------------------------------------------------------------------------
# serialisation


def _header_obj(h: LogHeader) -> dict:
    return {
        "tag": "HDR",
        "schema_version": h.schema_version,
        "survey_id": h.survey_id,
        "origin": {"lat": h.origin.latitude, "lon": h.origin.longitude,
                   "h": h.origin.ellipsoidal_height},
        "lever_arms": {k: list(v.offset) for k, v in sorted(h.lever_arms.items())},
        "started_at": h.started_at,
    }


def record_to_obj(rec) -> dict:
    if isinstance(rec, OpaqueRecord):
        obj = {"tag": rec.tag, "t": rec.t}
        obj.update({k: v for k, v in rec.data.items() if k not in ("tag", "t")})
        return obj
    obj = {"tag": rec.TAG}
    for f in fields(rec):
        v = getattr(rec, f.name)
        if isinstance(v, Enum):
            v = v.value
        elif isinstance(v, tuple):
            v = list(v)
        obj[f.name] = v
    return obj


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def write_log(log: SurveyLog, sink: IO[bytes]) -> int:
    """Write ``log`` as JSON-lines to a binary sink and return the byte count."""
    log.validate()
    n = 0
    for obj in [_header_obj(log.header)] + [record_to_obj(r) for r in log.records]:
        data = (_dumps(obj) + "\n").encode("utf-8")
        sink.write(data)
        n += len(data)
    return n


def dumps_log(log: SurveyLog) -> bytes:
    buf = io.BytesIO()
    write_log(log, buf)
    return buf.getvalue()


def save_log(log: SurveyLog, path) -> int:
    with open(path, "wb") as fh:
        return write_log(log, fh)


def _parse_header(obj: dict, line: int) -> LogHeader:
    try:
        o = obj["origin"]
        origin = GeoPoint(_num(o["lat"]), _num(o["lon"]), _num(o["h"]))
        arms = obj.get("lever_arms", {})
        if not isinstance(arms, dict):
            raise TypeError("lever_arms must be an object")
        lever_arms = {str(k): LeverArm(tuple(_num(x) for x in _seq(v))) for k, v in arms.items()}
        sid = obj["survey_id"]
        started = obj.get("started_at", "1970-01-01T00:00:00Z")
        version = obj["schema_version"]
        if not isinstance(sid, str) or not isinstance(started, str):
            raise TypeError("survey_id and started_at must be strings")
        if not isinstance(version, int) or isinstance(version, bool):
            raise TypeError("schema_version must be an integer")
    except (KeyError, TypeError, ValueError, GeoDomainError) as exc:
        raise LogParseError(line, f"bad header: {exc!r}") from None
    if version > SCHEMA_VERSION:
        raise LogParseError(line, f"unsupported schema_version {version}")
    return LogHeader(sid, origin, lever_arms, started, version)


def _num(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError(f"expected a number, got {type(v).__name__}")
    return float(v)


def _seq(v):
    if not isinstance(v, list):
        raise TypeError("expected a list")
    return v


def _parse_record(obj: dict, line: int):
    tag = obj.get("tag")
    if not isinstance(tag, str) or tag == "HDR":
        raise LogParseError(line, f"invalid record tag {tag!r}")
    try:
        t = _num(obj["t"])
    except (KeyError, TypeError):
        raise LogParseError(line, "record without numeric timestamp 't'") from None
    cls = RECORD_TYPES.get(tag)
    if cls is None:
        return OpaqueRecord(t, tag, {k: v for k, v in obj.items() if k not in ("tag", "t")})
    kwargs = {"t": t}
    try:
        for f in fields(cls):
            if f.name == "t":
                continue
            if f.name not in obj:
                if f.default is not MISSING:
                    continue
                raise KeyError(f.name)
            v = obj[f.name]
            if f.name in _TUPLE_FIELDS:
                v = tuple(_num(x) for x in _seq(v))
            elif f.name == "fix":
                v = FixType(v)
            elif f.name in ("mode", "level", "text"):
                if not isinstance(v, str):
                    raise TypeError(f"{f.name} must be a string")
            elif f.name == "valid":
                if not isinstance(v, bool):
                    raise TypeError("valid must be a boolean")
            elif f.name == "depth" and v is None:
                pass
            else:
                v = _num(v)
            kwargs[f.name] = v
        return cls(**kwargs)
    except KeyError as exc:
        raise LogParseError(line, f"{tag} record missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise LogParseError(line, f"{tag} record malformed: {exc}") from None


def read_log(source: Union[IO[bytes], bytes]) -> SurveyLog:
    """Parse and validate a log. Raises :class:`LogError` on any defect."""
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    try:
        text = bytes(data).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LogParseError(1, f"not UTF-8: {exc.reason}") from None
    header = None
    records = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw, parse_constant=_reject_constant)
        except (ValueError, RecursionError) as exc:
            raise LogParseError(lineno, f"invalid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise LogParseError(lineno, "record is not a JSON object")
        if header is None:
            if obj.get("tag") != "HDR":
                raise LogValidationError("missing header: first record must be HDR", [lineno])
            header = _parse_header(obj, lineno)
            continue
        if obj.get("tag") == "HDR":
            raise LogValidationError("duplicate header", [lineno])
        records.append(_parse_record(obj, lineno))
    if header is None:
        raise LogValidationError("missing header")
    return SurveyLog(header, records).validate()


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name}")


def load_log(path) -> SurveyLog:
    with open(path, "rb") as fh:
        return read_log(fh)


def extract_channel(log: SurveyLog, tag, window: Optional[tuple] = None) -> list:
    """Records of kind ``tag`` (a tag string or record class) with t in [t0, t1]."""
    if window is not None and window[0] > window[1]:
        raise ValueError("window start must not exceed window end")
    if isinstance(tag, str):
        match = lambda r: record_tag(r) == tag  # noqa: E731
    else:
        match = lambda r: isinstance(r, tag)  # noqa: E731
    out = [r for r in log.records if match(r)]
    if window is not None:
        t0, t1 = window
        out = [r for r in out if t0 <= r.t <= t1]
    return out
