"""
File exports for depth products: ESRI ASCII grids, XYZ text and GeoJSON of
rejected samples. Grid coordinates stay in the survey's local ENU frame; the
geodetic origin travels in a sidecar comment or property.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .bathy import DepthGrid, DepthPoints, Quality
from .geo import enu_to_geo_array


def asc_text(g: DepthGrid, values: str = "depth") -> str:
    """ESRI ASCII raster text. Rows run north to south as the format requires."""
    arr = getattr(g, values).astype(float)
    if values == "count":
        arr = np.where(arr > 0, arr, np.nan)
    out = np.where(np.isfinite(arr), arr, g.nodata)[::-1]
    buf = io.StringIO()
    buf.write(f"ncols {g.cols}\nnrows {g.rows}\n")
    buf.write(f"xllcorner {g.x0:.4f}\nyllcorner {g.y0:.4f}\n")
    buf.write(f"cellsize {g.cell_size:.4f}\nNODATA_value {g.nodata:g}\n")
    np.savetxt(buf, out, fmt="%.3f")
    return buf.getvalue()


def write_asc(g: DepthGrid, path, values: str = "depth") -> None:
    Path(path).write_text(asc_text(g, values))


def read_asc(path) -> DepthGrid:
    """Inverse of :func:`write_asc` for depth rasters (count is 1 where populated)."""
    header = {}
    with open(path) as fh:
        for _ in range(6):
            k, v = fh.readline().split()
            header[k.lower()] = float(v)
        data = np.loadtxt(fh, ndmin=2)
    nodata = header.get("nodata_value", -9999.0)
    data = data[::-1]
    depth = np.where(data == nodata, np.nan, data)
    populated = np.isfinite(depth)
    return DepthGrid(None, header["xllcorner"], header["yllcorner"], header["cellsize"],
                     depth, populated.astype(int), np.where(populated, 0.0, np.nan), nodata)


def write_xyz(points: DepthPoints, path, include_rejected: bool = False) -> int:
    """CSV of t, east, north, depth, flags. Returns the number of rows written."""
    mask = np.ones(len(points), bool) if include_rejected else points.usable()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "east", "north", "depth", "flags"])
        for t, e, n, d, f in zip(points.t[mask], points.east[mask], points.north[mask],
                                 points.depth[mask], points.flags[mask]):
            w.writerow([f"{t:.3f}", f"{e:.3f}", f"{n:.3f}", f"{d:.3f}", int(f)])
    return int(mask.sum())


def _flag_names(f: int):
    return [q.name for q in Quality if q.value and f & q.value]


def rejected_geojson(points: DepthPoints) -> dict:
    """Point features for every rejected sample, in lon/lat when an origin is known."""
    bad = ~points.usable()
    feats = []
    if np.any(bad):
        e, n = points.east[bad], points.north[bad]
        e = np.where(np.isfinite(e), e, 0.0)
        n = np.where(np.isfinite(n), n, 0.0)
        if points.origin is not None:
            lat, lon, _ = enu_to_geo_array(np.column_stack([e, n, np.zeros_like(e)]), points.origin)
            xy = np.column_stack([np.atleast_1d(lon), np.atleast_1d(lat)])
        else:
            xy = np.column_stack([e, n])
        for (x, y), t, f, d in zip(xy, points.t[bad], points.flags[bad], points.depth[bad]):
            feats.append({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [float(x), float(y)]},
                "properties": {"t": float(t), "flags": _flag_names(int(f)),
                               "depth": float(d) if np.isfinite(d) else None},
            })
    return {"type": "FeatureCollection", "features": feats}


def save_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True))
