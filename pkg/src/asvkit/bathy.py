"""
Single-beam bathymetry processing.

Stages, each a pure transformation that only ever adds flags:

1. :func:`soundings_from_log` - keep echo-sounder, GPS and IMU data and
   interpolate the vehicle pose at every depth sample.
2. :func:`attitude_filter` - flag samples taken with roll or pitch beyond a
   threshold.
3. :func:`median_filter` - flag depths far from a sliding median.
4. :func:`georeference` - lever-arm, beam-tilt and vertical-datum corrections
   giving the seafloor position and depth of every sample.
5. :func:`grid` / :func:`asvkit.tin.triangulate` - depth products.

Flagged samples are kept so exports can show what was rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntFlag
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.spatial import cKDTree

from .geo import GeoPoint, LeverArm, body_to_enu_matrices, geo_to_enu_array
from .logfmt import AttRecord, DpthRecord, GpsRecord, SurveyLog


class Quality(IntFlag):
    OK = 0
    ATTITUDE_REJECT = 1
    MEDIAN_REJECT = 2
    INTERPOLATED = 4
    DROPOUT = 8


REJECT = Quality.ATTITUDE_REJECT | Quality.MEDIAN_REJECT | Quality.DROPOUT


class BathyError(ValueError):
    pass


@dataclass
class Soundings:
    """Raw depth samples with the antenna pose interpolated at each one."""

    t: np.ndarray
    east: np.ndarray
    north: np.ndarray
    up: np.ndarray
    roll: np.ndarray
    pitch: np.ndarray
    yaw: np.ndarray
    raw_depth: np.ndarray
    flags: np.ndarray

    def __len__(self):
        return len(self.t)

    @classmethod
    def from_poses(cls, poses, depths) -> "Soundings":
        poses = list(poses)
        depths = np.asarray(depths, float)
        flags = np.where(np.isfinite(depths), 0, int(Quality.DROPOUT)).astype(np.int64)
        return cls(np.array([p.timestamp for p in poses]),
                   np.array([p.position.east for p in poses]),
                   np.array([p.position.north for p in poses]),
                   np.array([p.position.up for p in poses]),
                   np.array([p.attitude.roll for p in poses]),
                   np.array([p.attitude.pitch for p in poses]),
                   np.array([p.attitude.yaw for p in poses]),
                   depths, flags)

    def with_flags(self, flags) -> "Soundings":
        return replace(self, flags=np.asarray(flags, np.int64))

    def rejected(self) -> np.ndarray:
        return (self.flags & int(REJECT)) != 0


@dataclass
class DepthPoints:
    """Georeferenced seafloor samples in the log's local ENU frame."""

    t: np.ndarray
    east: np.ndarray
    north: np.ndarray
    depth: np.ndarray
    flags: np.ndarray
    origin: Optional[GeoPoint] = None

    def __len__(self):
        return len(self.t)

    def usable(self) -> np.ndarray:
        return ((self.flags & int(REJECT)) == 0) & np.isfinite(self.depth)

    def subset(self, mask) -> "DepthPoints":
        return DepthPoints(self.t[mask], self.east[mask], self.north[mask],
                           self.depth[mask], self.flags[mask], self.origin)


def soundings_from_log(log: SurveyLog, window: Optional[tuple] = None) -> Soundings:
    """Depth samples from ``log`` with the antenna pose interpolated at each sample time."""
    gps = log.of(GpsRecord)
    att = log.of(AttRecord)
    dpth = log.of(DpthRecord)
    if len(gps) < 2 or len(att) < 2:
        raise BathyError("log needs at least two GPS and two ATT records")
    if window is not None:
        dpth = [r for r in dpth if window[0] <= r.t <= window[1]]
    tg = np.array([r.t for r in gps])
    enu = geo_to_enu_array([r.lat for r in gps], [r.lon for r in gps], [r.h for r in gps],
                           log.header.origin)
    ta = np.array([r.t for r in att])
    roll = np.array([r.roll for r in att])
    pitch = np.array([r.pitch for r in att])
    yaw = np.unwrap(np.array([r.yaw for r in att]))
    td = np.array([r.t for r in dpth])
    raw = np.array([np.nan if r.depth is None else r.depth for r in dpth], float)
    inside = (td >= max(tg[0], ta[0])) & (td <= min(tg[-1], ta[-1]))
    td, raw = td[inside], raw[inside]
    flags = np.where(np.isfinite(raw), 0, int(Quality.DROPOUT)).astype(np.int64)
    return Soundings(
        td,
        np.interp(td, tg, enu[:, 0]), np.interp(td, tg, enu[:, 1]), np.interp(td, tg, enu[:, 2]),
        np.interp(td, ta, roll), np.interp(td, ta, pitch),
        np.mod(np.interp(td, ta, yaw), 2 * np.pi),
        raw, flags)


def attitude_filter(samples: Soundings, max_angle: float = 10.0) -> Soundings:
    """Flag samples whose |roll| or |pitch| strictly exceeds ``max_angle`` degrees."""
    lim = math.radians(max_angle)
    bad = (np.abs(samples.roll) > lim) | (np.abs(samples.pitch) > lim)
    return samples.with_flags(samples.flags | np.where(bad, int(Quality.ATTITUDE_REJECT), 0))


def _segments(t: np.ndarray, gap: float):
    if len(t) == 0:
        return []
    breaks = np.flatnonzero(np.diff(t) > gap) + 1
    edges = np.concatenate([[0], breaks, [len(t)]])
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def centred_median(x: np.ndarray, window: int) -> np.ndarray:
    """Sliding median with a centred window that shrinks symmetrically at the ends."""
    n = len(x)
    half = window // 2
    out = np.empty(n)
    if n == 0:
        return out
    if n >= window:
        out[half:n - half] = np.median(sliding_window_view(x, window), axis=1)
        edge = list(range(half)) + list(range(n - half, n))
    else:
        edge = range(n)
    for i in edge:
        h = min(i, n - 1 - i, half)
        out[i] = np.median(x[i - h:i + h + 1])
    return out


def robust_sigma(x: np.ndarray) -> float:
    x = x[np.isfinite(x)]
    if len(x) == 0:
        return 0.0
    return 1.4826 * float(np.median(np.abs(x - np.median(x))))


def median_filter(samples: Soundings, window: int = 9, band: Optional[float] = None,
                  band_sigmas: float = 3.0, min_band: float = 0.5,
                  max_gap: float = 5.0) -> Soundings:
    """Flag depths further than ``band`` from the sliding median of their neighbours.

    Already-rejected samples are skipped when computing medians. The window
    does not span time gaps longer than ``max_gap`` seconds. When ``band``
    is None it is ``max(min_band, band_sigmas * MAD-sigma)`` of the
    residuals about the median.
    """
    if window < 3 or window % 2 == 0:
        raise BathyError("median window must be odd and >= 3")
    live = np.flatnonzero(~samples.rejected())
    x = samples.raw_depth[live]
    med = np.empty(len(live))
    for a, b in _segments(samples.t[live], max_gap):
        med[a:b] = centred_median(x[a:b], window)
    resid = x - med
    if band is None:
        band = max(min_band, band_sigmas * robust_sigma(resid))
    bad = np.zeros(len(samples), bool)
    bad[live[np.abs(resid) > band]] = True
    return samples.with_flags(samples.flags | np.where(bad, int(Quality.MEDIAN_REJECT), 0))


class VerticalReference(str, Enum):
    GPS = "gps"
    IMMERSION = "immersion"


def georeference(samples: Soundings, lever_arm: LeverArm, datum_offset: float = 0.0,
                 geoid_undulation: float = 0.0, vertical_reference="gps",
                 immersion: float = 0.1, surface_height: float = 0.0,
                 origin: Optional[GeoPoint] = None) -> DepthPoints:
    """Seafloor position and corrected depth of every sample.

    The sounder position is the antenna position plus the attitude-rotated
    lever arm, and the beam follows the body down axis. Depths are given
    below a chart datum whose ellipsoidal height is
    ``geoid_undulation + datum_offset``.

    ``vertical_reference="gps"`` takes the sounder height from the GPS
    antenna height (ENU up is relative to the origin's ellipsoidal height).
    ``"immersion"`` ignores GPS heights and puts the sounder ``immersion``
    meters below a water surface at ellipsoidal height ``surface_height``.

    Rejected samples are processed too and keep their flags.
    """
    ref = VerticalReference(vertical_reference)
    rot = body_to_enu_matrices(samples.roll, samples.pitch, samples.yaw)
    antenna = np.stack([samples.east, samples.north, samples.up], axis=1)
    sounder = antenna + rot @ np.asarray(lever_arm.offset)
    ray = rot[:, :, 2]
    vec = samples.raw_depth[:, None] * ray
    ground_e = sounder[:, 0] + vec[:, 0]
    ground_n = sounder[:, 1] + vec[:, 1]
    datum_h = geoid_undulation + datum_offset
    origin_h = origin.ellipsoidal_height if origin is not None else 0.0
    if ref is VerticalReference.GPS:
        depth = datum_h - (origin_h + sounder[:, 2] + vec[:, 2])
    else:
        depth = datum_h - (surface_height - immersion + vec[:, 2])
    return DepthPoints(samples.t.copy(), ground_e, ground_n, depth, samples.flags.copy(), origin)


# ---------------------------------------------------------------------------
# gridding


class GridMethod(str, Enum):
    MEAN = "mean"
    IDW = "idw"


@dataclass
class DepthGrid:
    """Regular grid in local ENU; row 0 is the southern edge.

    Unpopulated cells hold NaN in ``depth`` and ``sigma`` and 0 in ``count``.
    """

    origin: Optional[GeoPoint]
    x0: float
    y0: float
    cell_size: float
    depth: np.ndarray
    count: np.ndarray
    sigma: np.ndarray
    nodata: float = -9999.0

    @property
    def rows(self) -> int:
        return self.depth.shape[0]

    @property
    def cols(self) -> int:
        return self.depth.shape[1]

    def populated(self) -> np.ndarray:
        return self.count > 0

    def cell_centers(self):
        e = self.x0 + (np.arange(self.cols) + 0.5) * self.cell_size
        n = self.y0 + (np.arange(self.rows) + 0.5) * self.cell_size
        return np.meshgrid(e, n)

    def coverage(self) -> float:
        return float(self.populated().mean()) if self.depth.size else 0.0


def _grid_frame(east, north, cell, bounds):
    if bounds is None:
        x0 = math.floor(east.min() / cell) * cell
        y0 = math.floor(north.min() / cell) * cell
        x1 = math.floor(east.max() / cell) * cell + cell
        y1 = math.floor(north.max() / cell) * cell + cell
    else:
        x0, y0, x1, y1 = bounds
    cols = max(1, int(round((x1 - x0) / cell)))
    rows = max(1, int(round((y1 - y0) / cell)))
    return x0, y0, rows, cols


def grid(points: DepthPoints, cell_size: float = 0.5, method="mean",
         radius: Optional[float] = None, bounds: Optional[tuple] = None) -> DepthGrid:
    """Grid usable depth points.

    ``mean`` averages the points falling in each cell and reports their
    standard deviation. ``idw`` weights every point within ``radius``
    (default two cells) of a cell centre by inverse squared distance.
    """
    if cell_size <= 0:
        raise BathyError("cell size must be positive")
    method = GridMethod(method)
    ok = points.usable()
    e, n, d = points.east[ok], points.north[ok], points.depth[ok]
    if len(d) == 0:
        raise BathyError("no usable depth points to grid")
    x0, y0, rows, cols = _grid_frame(e, n, cell_size, bounds)
    if method is GridMethod.MEAN:
        ci = np.floor((e - x0) / cell_size).astype(int)
        ri = np.floor((n - y0) / cell_size).astype(int)
        inside = (ci >= 0) & (ci < cols) & (ri >= 0) & (ri < rows)
        flat = ri[inside] * cols + ci[inside]
        cnt = np.bincount(flat, minlength=rows * cols)
        s1 = np.bincount(flat, weights=d[inside], minlength=rows * cols)
        s2 = np.bincount(flat, weights=d[inside] ** 2, minlength=rows * cols)
        with np.errstate(invalid="ignore", divide="ignore"):
            mean = s1 / cnt
            var = np.maximum(s2 / cnt - mean ** 2, 0.0)
        mean[cnt == 0] = np.nan
        var[cnt == 0] = np.nan
        return DepthGrid(points.origin, x0, y0, cell_size, mean.reshape(rows, cols),
                         cnt.reshape(rows, cols), np.sqrt(var).reshape(rows, cols))

    radius = 2.0 * cell_size if radius is None else radius
    tree = cKDTree(np.column_stack([e, n]))
    ce, cn = np.meshgrid(x0 + (np.arange(cols) + 0.5) * cell_size,
                         y0 + (np.arange(rows) + 0.5) * cell_size)
    centres = np.column_stack([ce.ravel(), cn.ravel()])
    depth = np.full(rows * cols, np.nan)
    sigma = np.full(rows * cols, np.nan)
    count = np.zeros(rows * cols, int)
    for k, idx in enumerate(tree.query_ball_point(centres, radius)):
        if not idx:
            continue
        idx = np.asarray(idx)
        dist2 = (e[idx] - centres[k, 0]) ** 2 + (n[idx] - centres[k, 1]) ** 2
        if np.any(dist2 < 1e-12):
            w = (dist2 < 1e-12).astype(float)
        else:
            w = 1.0 / dist2
        w = w / w.sum()
        depth[k] = w @ d[idx]
        sigma[k] = math.sqrt(max(w @ (d[idx] - depth[k]) ** 2, 0.0))
        count[k] = len(idx)
    return DepthGrid(points.origin, x0, y0, cell_size, depth.reshape(rows, cols),
                     count.reshape(rows, cols), sigma.reshape(rows, cols))


# ---------------------------------------------------------------------------
# full pipeline


@dataclass(frozen=True)
class BathyConfig:
    max_angle: float = 10.0
    median_window: int = 9
    median_band: Optional[float] = None
    min_band: float = 0.5
    datum_offset: float = 0.0
    geoid_undulation: float = 0.0
    vertical_reference: str = "gps"
    immersion: float = 0.1
    cell_size: float = 0.5
    method: str = "mean"
    idw_radius: Optional[float] = None
    lever_arm_name: str = "sounder"


@dataclass
class BathyResult:
    soundings: Soundings
    points: DepthPoints
    grid: DepthGrid
    stats: dict = field(default_factory=dict)


def process_log(log: SurveyLog, cfg: BathyConfig = BathyConfig()) -> BathyResult:
    """Run every stage on a survey log."""
    arm = log.header.lever_arms.get(cfg.lever_arm_name, LeverArm())
    s = soundings_from_log(log)
    if len(s) == 0:
        raise BathyError("log has no depth samples")
    s = attitude_filter(s, cfg.max_angle)
    s = median_filter(s, cfg.median_window, cfg.median_band, min_band=cfg.min_band)
    pts = georeference(s, arm, cfg.datum_offset, cfg.geoid_undulation, cfg.vertical_reference,
                       cfg.immersion, surface_height=log.header.origin.ellipsoidal_height,
                       origin=log.header.origin)
    g = grid(pts, cfg.cell_size, cfg.method, cfg.idw_radius)
    f = s.flags
    stats = {
        "samples": int(len(s)),
        "dropouts": int(np.count_nonzero(f & Quality.DROPOUT)),
        "attitude_rejects": int(np.count_nonzero(f & Quality.ATTITUDE_REJECT)),
        "median_rejects": int(np.count_nonzero(f & Quality.MEDIAN_REJECT)),
        "usable": int(np.count_nonzero(pts.usable())),
        "grid_rows": g.rows,
        "grid_cols": g.cols,
        "grid_coverage": g.coverage(),
        "depth_min": float(np.nanmin(g.depth)),
        "depth_max": float(np.nanmax(g.depth)),
    }
    stats["reject_fraction"] = 1.0 - stats["usable"] / max(stats["samples"], 1)
    return BathyResult(s, pts, g, stats)


def grid_rmse(g: DepthGrid, truth_depth) -> float:
    """RMSE of populated cells against a truth function of (east, north) at cell centres."""
    ce, cn = g.cell_centers()
    m = g.populated()
    err = g.depth[m] - np.asarray(truth_depth(ce[m], cn[m]))
    return float(np.sqrt(np.mean(err ** 2)))
