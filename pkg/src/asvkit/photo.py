"""
Camera geometry for photogrammetric surveys: seabed footprints, transect
spacing for a target overlap, and coverage checks over a survey log.

Camera frame: the optical axis is the body down axis pitched forward by
``tilt``. The horizontal field of view spans across-track (starboard), the
vertical one along-track (forward).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import ndimage
from shapely import contains_xy
from shapely.geometry import Polygon, box
from shapely.ops import unary_union

from .bathy import DepthGrid
from .geo import (Attitude, EnuPoint, GeoPoint, LeverArm, Pose, body_to_enu_matrices,
                  enu_to_geo_array, geo_to_enu_array)
from .logfmt import AttRecord, GpsRecord, SurveyLog

WATER_REFRACTIVE_INDEX = 1.33
# nominal wide-mode in-air field of view of the action camera used in the field trials
ACTION_CAM_AIR_HFOV = 118.2
ACTION_CAM_AIR_VFOV = 69.5


class GeometryError(ValueError):
    pass


def in_water_fov(fov_air_deg: float, n: float = WATER_REFRACTIVE_INDEX) -> float:
    """Flat-port approximation: tan(theta_w / 2) = tan(theta_a / 2) / n."""
    return math.degrees(2.0 * math.atan(math.tan(math.radians(fov_air_deg) / 2.0) / n))


@dataclass(frozen=True)
class CameraModel:
    hfov_water: float = 90.0    # degrees, across-track
    vfov_water: float = 60.0    # degrees, along-track
    frame_interval: float = 0.5
    tilt: float = 0.0           # degrees forward of nadir

    def __post_init__(self):
        for name in ("hfov_water", "vfov_water"):
            v = getattr(self, name)
            if not (0.0 < v < 180.0):
                raise GeometryError(f"{name} must be in (0, 180): {v}")
        if not self.frame_interval > 0:
            raise GeometryError("frame_interval must be positive")
        if not (-90.0 < self.tilt < 90.0):
            raise GeometryError("tilt must be in (-90, 90)")

    @classmethod
    def from_in_air(cls, hfov_air: float, vfov_air: float, **kw) -> "CameraModel":
        return cls(in_water_fov(hfov_air), in_water_fov(vfov_air), **kw)

    def corner_rays(self) -> np.ndarray:
        """Unit-free body-frame rays through the four image corners, (4, 3)."""
        th = math.tan(math.radians(self.hfov_water) / 2.0)
        tv = math.tan(math.radians(self.vfov_water) / 2.0)
        # order: aft-port, fore-port, fore-starboard, aft-starboard
        rays = np.array([[-tv, -th, 1.0], [tv, -th, 1.0], [tv, th, 1.0], [-tv, th, 1.0]])
        c, s = math.cos(math.radians(self.tilt)), math.sin(math.radians(self.tilt))
        rot = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
        return rays @ rot.T


@dataclass(frozen=True)
class Footprint:
    corners: np.ndarray     # (4, 2) east, north on the seabed plane
    depth: float

    def polygon(self) -> Polygon:
        return Polygon(self.corners)

    @property
    def area(self) -> float:
        x, y = self.corners[:, 0], self.corners[:, 1]
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


_MIN_DOWN = 1e-6


def _project(pos: np.ndarray, rot: np.ndarray, rays: np.ndarray, depth: np.ndarray) -> np.ndarray:
    """Corners for N poses: pos (N, 3), rot (N, 3, 3), depth (N,) -> (N, 4, 2)."""
    world = np.einsum("nij,kj->nki", rot, rays)
    down = -world[:, :, 2]
    if np.any(down <= _MIN_DOWN):
        raise GeometryError("a corner ray does not reach the seabed")
    scale = depth[:, None] / down
    return pos[:, None, :2] + world[:, :, :2] * scale[:, :, None]


def footprint(pose: Pose, camera: CameraModel, depth: float,
              lever_arm: Optional[LeverArm] = None) -> Footprint:
    """Seabed footprint on the horizontal plane ``depth`` meters below the camera."""
    if not depth > 0:
        raise GeometryError("depth must be positive")
    a = pose.attitude
    rot = body_to_enu_matrices(a.roll, a.pitch, a.yaw)
    pos = pose.position.as_array()[None, :]
    if lever_arm is not None:
        pos = pos + rot[0] @ np.asarray(lever_arm.offset)
    c = _project(pos, rot, camera.corner_rays(), np.array([float(depth)]))
    return Footprint(c[0], float(depth))


def _min_depth(depth) -> float:
    if np.ndim(depth) == 0:
        d = float(depth)
    else:
        d = float(min(depth))
    if not d > 0:
        raise GeometryError("depth must be positive")
    return d


def swath_width(camera: CameraModel, depth) -> float:
    """Across-track footprint width at the shallowest of ``depth`` for a nadir camera."""
    return 2.0 * _min_depth(depth) * math.tan(math.radians(camera.hfov_water) / 2.0)


def spacing_for_overlap(camera: CameraModel, depth, target_overlap: float = 0.7) -> float:
    """Transect spacing giving ``target_overlap`` side-lap at the shallowest depth.

    ``depth`` is a scalar or a (min, max) range; the minimum is used since
    footprints shrink in shallow water.
    """
    if not (0.0 <= target_overlap < 1.0):
        raise GeometryError("target overlap must be in [0, 1)")
    return (1.0 - target_overlap) * swath_width(camera, depth)


def required_fov_for_spacing(spacing: float, depth, target_overlap: float = 0.7) -> float:
    """In-water across-track FOV (degrees) needed for ``spacing`` at the shallowest depth."""
    d = _min_depth(depth)
    half_width = spacing / (1.0 - target_overlap) / 2.0
    return math.degrees(2.0 * math.atan(half_width / d))


def frame_interval_for_overlap(camera: CameraModel, depth, speed: float,
                               target_overlap: float = 0.7) -> float:
    """Longest frame interval keeping forward overlap at ``target_overlap``."""
    along = 2.0 * _min_depth(depth) * math.tan(math.radians(camera.vfov_water) / 2.0)
    return (1.0 - target_overlap) * along / speed


# ---------------------------------------------------------------------------
# coverage over a log


@dataclass
class FramePoses:
    t: np.ndarray
    position: np.ndarray    # (N, 3) ENU
    roll: np.ndarray
    pitch: np.ndarray
    yaw: np.ndarray

    def __len__(self):
        return len(self.t)

    def pose(self, i: int) -> Pose:
        return Pose(float(self.t[i]), EnuPoint.from_array(self.position[i]),
                    Attitude(float(self.roll[i]), float(self.pitch[i]), float(self.yaw[i])))


def frame_poses(log: SurveyLog, interval: float, window: Optional[tuple] = None) -> FramePoses:
    """Vehicle poses interpolated at every ``interval`` seconds over the GPS/ATT overlap."""
    gps, att = log.of(GpsRecord), log.of(AttRecord)
    if len(gps) < 2 or len(att) < 2:
        raise GeometryError("log needs at least two GPS and two ATT records")
    tg = np.array([r.t for r in gps])
    ta = np.array([r.t for r in att])
    t0, t1 = max(tg[0], ta[0]), min(tg[-1], ta[-1])
    if window is not None:
        t0, t1 = max(t0, window[0]), min(t1, window[1])
    if t1 < t0:
        raise GeometryError("no frames in window")
    t = t0 + interval * np.arange(int(math.floor((t1 - t0) / interval + 1e-9)) + 1)
    enu = geo_to_enu_array([r.lat for r in gps], [r.lon for r in gps], [r.h for r in gps],
                           log.header.origin)
    pos = np.column_stack([np.interp(t, tg, enu[:, k]) for k in range(3)])
    yaw = np.mod(np.interp(t, ta, np.unwrap([r.yaw for r in att])), 2 * np.pi)
    return FramePoses(t, pos, np.interp(t, ta, [r.roll for r in att]),
                      np.interp(t, ta, [r.pitch for r in att]), yaw)


def frame_footprints(frames: FramePoses, camera: CameraModel, seabed_depth,
                     lever_arm: Optional[LeverArm] = None) -> np.ndarray:
    """Footprint corners for every frame, (N, 4, 2).

    ``seabed_depth`` is a constant or a function of (east, north) giving depth
    below the water surface; the plane sits that far below the camera.
    """
    rot = body_to_enu_matrices(frames.roll, frames.pitch, frames.yaw)
    pos = frames.position.copy()
    if lever_arm is not None:
        pos = pos + rot @ np.asarray(lever_arm.offset)
    if callable(seabed_depth):
        depth = np.asarray(seabed_depth(pos[:, 0], pos[:, 1]), float)
    else:
        depth = np.full(len(frames), float(seabed_depth))
    if np.any(~(depth > 0)):
        raise GeometryError("depth must be positive")
    return _project(pos, rot, camera.corner_rays(), depth)


def rasterize_counts(corners: np.ndarray, x0: float, y0: float, rows: int, cols: int,
                     cell: float) -> np.ndarray:
    """Per-cell count of convex quads covering each cell centre."""
    counts = np.zeros((rows, cols), np.int32)
    for q in corners:
        lo = np.floor((q.min(axis=0) - (x0, y0)) / cell).astype(int)
        hi = np.ceil((q.max(axis=0) - (x0, y0)) / cell).astype(int)
        c0, r0 = max(lo[0], 0), max(lo[1], 0)
        c1, r1 = min(hi[0], cols), min(hi[1], rows)
        if c1 <= c0 or r1 <= r0:
            continue
        ex = x0 + (np.arange(c0, c1) + 0.5) * cell
        ny = y0 + (np.arange(r0, r1) + 0.5) * cell
        E, N = np.meshgrid(ex, ny)
        # orientation-agnostic inside test: all edge cross products share a sign
        sgn = []
        for k in range(4):
            a, b = q[k], q[(k + 1) % 4]
            sgn.append((b[0] - a[0]) * (N - a[1]) - (b[1] - a[1]) * (E - a[0]))
        sgn = np.stack(sgn)
        inside = np.all(sgn >= 0, axis=0) | np.all(sgn <= 0, axis=0)
        counts[r0:r1, c0:c1] += inside
    return counts


def _straight_runs(yaw: np.ndarray, max_turn_deg: float, min_frames: int):
    """Index ranges of frames with steady heading."""
    d = np.abs(np.angle(np.exp(1j * np.diff(yaw))))
    breaks = np.flatnonzero(d > math.radians(max_turn_deg)) + 1
    edges = np.concatenate([[0], breaks, [len(yaw)]])
    runs = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a < min_frames:
            continue
        ref = np.angle(np.mean(np.exp(1j * yaw[a:b])))
        steady = np.abs(np.angle(np.exp(1j * (yaw[a:b] - ref)))) <= math.radians(max_turn_deg)
        idx = a + np.flatnonzero(steady)
        if len(idx) >= min_frames:
            runs.append((int(idx[0]), int(idx[-1]) + 1))
    return runs


def _gap_polygons(mask: np.ndarray, x0, y0, cell) -> list:
    labels, n = ndimage.label(mask)
    polys = []
    for k in range(1, n + 1):
        boxes = []
        rr, cc = np.nonzero(labels == k)
        for r in np.unique(rr):
            cols = np.sort(cc[rr == r])
            starts = np.concatenate([[0], np.flatnonzero(np.diff(cols) > 1) + 1])
            ends = np.concatenate([starts[1:], [len(cols)]])
            for s, e in zip(starts, ends):
                boxes.append(box(x0 + cols[s] * cell, y0 + r * cell,
                                 x0 + (cols[e - 1] + 1) * cell, y0 + (r + 1) * cell))
        polys.append(unary_union(boxes))
    return polys


@dataclass
class CoverageReport:
    x0: float
    y0: float
    cell: float
    counts: np.ndarray
    region: np.ndarray               # cells that count toward the statistics
    frames: int
    covered_fraction: float
    forward_overlaps: np.ndarray     # consecutive frames on straight runs
    side_overlaps: list              # adjacent strip pairs
    target_overlap: float
    gaps: list = field(default_factory=list)
    origin: Optional[GeoPoint] = None

    @property
    def mean_forward_overlap(self) -> float:
        return float(np.mean(self.forward_overlaps)) if len(self.forward_overlaps) else float("nan")

    @property
    def min_forward_overlap(self) -> float:
        return float(np.min(self.forward_overlaps)) if len(self.forward_overlaps) else float("nan")

    @property
    def forward_fraction_ok(self) -> float:
        if not len(self.forward_overlaps):
            return 0.0
        return float(np.mean(self.forward_overlaps >= self.target_overlap - 1e-9))

    @property
    def min_side_overlap(self) -> float:
        return float(min(self.side_overlaps)) if self.side_overlaps else float("nan")

    @property
    def meets_target(self) -> bool:
        fwd = self.forward_fraction_ok == 1.0
        side = (not self.side_overlaps) or self.min_side_overlap >= self.target_overlap - 1e-9
        return bool(fwd and side)

    def as_grid(self) -> DepthGrid:
        c = np.where(self.region, self.counts, 0)
        vals = np.where(self.region, self.counts.astype(float), np.nan)
        return DepthGrid(self.origin, self.x0, self.y0, self.cell, vals, c,
                         np.full(c.shape, np.nan))

    def summary(self) -> dict:
        return {
            "frames": self.frames,
            "covered_fraction": self.covered_fraction,
            "mean_forward_overlap": self.mean_forward_overlap,
            "min_forward_overlap": self.min_forward_overlap,
            "forward_fraction_ok": self.forward_fraction_ok,
            "min_side_overlap": self.min_side_overlap,
            "side_pairs": len(self.side_overlaps),
            "target_overlap": self.target_overlap,
            "meets_target": self.meets_target,
            "gap_count": len(self.gaps),
            "gap_area": float(sum(g.area for g in self.gaps)),
        }

    def gaps_geojson(self) -> dict:
        feats = []
        for g in self.gaps:
            parts = list(g.geoms) if hasattr(g, "geoms") else [g]
            for p in parts:
                ring = np.asarray(p.exterior.coords)
                if self.origin is not None:
                    lat, lon, _ = enu_to_geo_array(
                        np.column_stack([ring, np.zeros(len(ring))]), self.origin)
                    ring = np.column_stack([lon, lat])
                feats.append({"type": "Feature",
                              "geometry": {"type": "Polygon", "coordinates": [ring.tolist()]},
                              "properties": {"area_m2": float(p.area)}})
        return {"type": "FeatureCollection", "features": feats}


def _side_overlaps(corners: np.ndarray, runs, yaw, max_turn_deg: float = 10.0) -> list:
    if len(runs) < 2:
        return []
    # transects share the axis of the longest run; cross legs are ignored
    a0, b0 = max(runs, key=lambda r: r[1] - r[0])
    axis = np.angle(np.mean(np.exp(2j * yaw[a0:b0]))) / 2.0
    tol = math.radians(max_turn_deg)
    runs = [(a, b) for a, b in runs
            if abs(np.angle(np.mean(np.exp(2j * (yaw[a:b] - axis))))) / 2.0 <= tol]
    if len(runs) < 2:
        return []
    heading = np.angle(np.mean(np.exp(2j * np.concatenate([yaw[a:b] for a, b in runs])))) / 2.0
    along = np.array([math.sin(heading), math.cos(heading)])
    across = np.array([along[1], -along[0]])
    strips = []
    for a, b in runs:
        pts = corners[a:b].reshape(-1, 2)
        poly = unary_union([Polygon(q) for q in corners[a:b]])
        strips.append((float(np.mean(pts @ across)), pts @ along, poly))
    strips.sort(key=lambda s: s[0])
    out = []
    for (ca, pa, A), (cb, pb, B) in zip(strips[:-1], strips[1:]):
        lo, hi = max(pa.min(), pb.min()), min(pa.max(), pb.max())
        if hi <= lo:
            continue
        big = 1e4
        corners_clip = [lo * along - big * across, hi * along - big * across,
                        hi * along + big * across, lo * along + big * across]
        clip = Polygon(corners_clip)
        Ac, Bc = A.intersection(clip), B.intersection(clip)
        denom = min(Ac.area, Bc.area)
        if denom <= 0:
            continue
        out.append(float(Ac.intersection(Bc).area / denom))
    return out


def coverage_report(log: SurveyLog, camera: CameraModel,
                    seabed_depth: Union[float, Callable],
                    area=None, target_overlap: float = 0.7, cell: float = 0.1,
                    lever_arm: Optional[LeverArm] = None, window: Optional[tuple] = None,
                    max_turn_deg: float = 10.0, min_strip_frames: int = 5) -> CoverageReport:
    """Rasterised photo coverage of a survey log.

    ``area`` restricts the statistics: a shapely polygon, an (N, 2) ENU ring
    or an object with ``corners_enu()``. Without it the convex hull of all
    footprints is used. Forward overlap is measured between consecutive
    frames on straight runs, side overlap between neighbouring straight strips
    over their common along-track extent.
    """
    frames = frame_poses(log, camera.frame_interval, window)
    if len(frames) == 0:
        raise GeometryError("no frames in window")
    corners = frame_footprints(frames, camera, seabed_depth, lever_arm)

    if area is None:
        region_poly = unary_union([Polygon(q) for q in corners]).convex_hull
    elif isinstance(area, Polygon):
        region_poly = area
    elif hasattr(area, "corners_enu"):
        region_poly = Polygon(area.corners_enu())
    else:
        region_poly = Polygon(np.asarray(area, float))
    bx0, by0, bx1, by1 = region_poly.bounds
    x0 = math.floor(bx0 / cell) * cell
    y0 = math.floor(by0 / cell) * cell
    cols = max(1, int(math.ceil((bx1 - x0) / cell)))
    rows = max(1, int(math.ceil((by1 - y0) / cell)))
    counts = rasterize_counts(corners, x0, y0, rows, cols, cell)
    region = _region_mask(region_poly, x0, y0, rows, cols, cell)
    covered = float(np.mean(counts[region] > 0)) if region.any() else 0.0

    runs = _straight_runs(frames.yaw, max_turn_deg, min_strip_frames)
    fwd = []
    for a, b in runs:
        for i in range(a, b - 1):
            p, q = Polygon(corners[i]), Polygon(corners[i + 1])
            fwd.append(p.intersection(q).area / min(p.area, q.area))
    side = _side_overlaps(corners, runs, frames.yaw, max_turn_deg)
    gaps = _gap_polygons(region & (counts == 0), x0, y0, cell)
    return CoverageReport(x0, y0, cell, counts, region, len(frames), covered,
                          np.asarray(fwd), side, target_overlap, gaps, log.header.origin)


def _region_mask(poly: Polygon, x0, y0, rows, cols, cell) -> np.ndarray:
    ex = x0 + (np.arange(cols) + 0.5) * cell
    ny = y0 + (np.arange(rows) + 0.5) * cell
    E, N = np.meshgrid(ex, ny)
    return contains_xy(poly, E, N)
