"""
Incremental Bowyer-Watson Delaunay triangulation of the horizontal projection
of depth points, with PLY export.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TriangulationError(ValueError):
    pass


@dataclass
class Tin:
    vertices: np.ndarray      # (N, 3) east, north, depth
    triangles: np.ndarray     # (M, 3) vertex indices, counter-clockwise in plan view

    def __len__(self):
        return len(self.triangles)


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _incircle(ax, ay, bx, by, cx, cy, px, py):
    """Positive when p lies strictly inside the circumcircle of CCW (a, b, c)."""
    adx, ady = ax - px, ay - py
    bdx, bdy = bx - px, by - py
    cdx, cdy = cx - px, cy - py
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    return (adx * (bdy * cd - bd * cdy)
            - ady * (bdx * cd - bd * cdx)
            + ad * (bdx * cdy - bdy * cdx))


class _Mesh:
    def __init__(self, xy):
        self.xy = xy
        self.tris = []           # [a, b, c] or None once deleted
        self.edge = {}           # directed edge (u, v) -> triangle id
        cap = 2 * len(xy) + 16
        self.ta = np.zeros(cap, np.int64)
        self.tb = np.zeros(cap, np.int64)
        self.tc = np.zeros(cap, np.int64)
        self.alive = np.zeros(cap, bool)

    def add(self, a, b, c):
        k = len(self.tris)
        if k >= len(self.alive):
            grow = len(self.alive)
            self.ta = np.concatenate([self.ta, np.zeros(grow, np.int64)])
            self.tb = np.concatenate([self.tb, np.zeros(grow, np.int64)])
            self.tc = np.concatenate([self.tc, np.zeros(grow, np.int64)])
            self.alive = np.concatenate([self.alive, np.zeros(grow, bool)])
        self.tris.append((a, b, c))
        self.ta[k], self.tb[k], self.tc[k] = a, b, c
        self.alive[k] = True
        for u, v in ((a, b), (b, c), (c, a)):
            self.edge[(u, v)] = k
        return k

    def remove(self, k):
        a, b, c = self.tris[k]
        for u, v in ((a, b), (b, c), (c, a)):
            if self.edge.get((u, v)) == k:
                del self.edge[(u, v)]
        self.tris[k] = None
        self.alive[k] = False

    def locate(self, px, py):
        """Index of a live triangle containing (px, py), boundary inclusive."""
        n = len(self.tris)
        idx = np.flatnonzero(self.alive[:n])
        x, y = self.xy[:, 0], self.xy[:, 1]
        a, b, c = self.ta[idx], self.tb[idx], self.tc[idx]
        o1 = _orient(x[a], y[a], x[b], y[b], px, py)
        o2 = _orient(x[b], y[b], x[c], y[c], px, py)
        o3 = _orient(x[c], y[c], x[a], y[a], px, py)
        score = np.minimum(np.minimum(o1, o2), o3)
        return int(idx[np.argmax(score)])

    def incircle(self, k, px, py):
        a, b, c = self.tris[k]
        x, y = self.xy[:, 0], self.xy[:, 1]
        return _incircle(x[a], y[a], x[b], y[b], x[c], y[c], px, py)


def _bowyer_watson(xy: np.ndarray, order) -> np.ndarray:
    n = len(xy)
    span = max(np.ptp(xy[:, 0]), np.ptp(xy[:, 1]), 1.0)
    cx, cy = xy[:, 0].mean(), xy[:, 1].mean()
    big = 50.0 * span
    sup = np.array([[cx - 2 * big, cy - big], [cx + 2 * big, cy - big], [cx, cy + 2 * big]])
    pts = np.vstack([xy, sup])
    mesh = _Mesh(pts)
    mesh.add(n, n + 1, n + 2)
    x, y = pts[:, 0], pts[:, 1]
    eps = 1e-12 * span * span

    for p in order:
        px, py = x[p], y[p]
        start = mesh.locate(px, py)
        bad = {start}
        stack = [start]
        while stack:
            k = stack.pop()
            a, b, c = mesh.tris[k]
            for u, v in ((a, b), (b, c), (c, a)):
                nb = mesh.edge.get((v, u))
                if nb is not None and nb not in bad and mesh.incircle(nb, px, py) > 0:
                    bad.add(nb)
                    stack.append(nb)
        # grow the cavity until every new triangle is properly oriented
        while True:
            boundary = []
            for k in bad:
                a, b, c = mesh.tris[k]
                for u, v in ((a, b), (b, c), (c, a)):
                    nb = mesh.edge.get((v, u))
                    if nb is None or nb not in bad:
                        boundary.append((u, v, nb))
            flat = [(u, v, nb) for u, v, nb in boundary
                    if _orient(x[u], y[u], x[v], y[v], px, py) <= eps]
            if not flat:
                break
            grew = False
            for _, _, nb in flat:
                if nb is not None and nb not in bad:
                    bad.add(nb)
                    grew = True
            if not grew:
                raise TriangulationError("could not form a valid cavity")
        for k in bad:
            mesh.remove(k)
        for u, v, _ in boundary:
            mesh.add(u, v, p)

    real = [t for t in mesh.tris if t is not None and max(t) < n]
    return _close_hull(xy, real)


def _close_hull(xy: np.ndarray, tris) -> np.ndarray:
    """Fill boundary concavities left by the finite super-triangle, then restore
    the empty-circle property with edge flips."""
    mesh = _Mesh(xy)
    for t in tris:
        mesh.add(*t)
    x, y = xy[:, 0], xy[:, 1]
    eps = 1e-12

    changed = True
    while changed:
        changed = False
        nxt = {u: v for (u, v) in mesh.edge if (v, u) not in mesh.edge}
        for u, v in list(nxt.items()):
            w = nxt.get(v)
            if w is None or w == u or nxt.get(u) is None:
                continue
            if _orient(x[u], y[u], x[v], y[v], x[w], y[w]) >= -eps:
                continue
            others = [q for q in nxt if q not in (u, v, w)]
            q = np.array(others, dtype=np.int64)
            if len(q) and np.any(
                    (_orient(x[u], y[u], x[w], y[w], x[q], y[q]) > eps)
                    & (_orient(x[w], y[w], x[v], y[v], x[q], y[q]) > eps)
                    & (_orient(x[v], y[v], x[u], y[u], x[q], y[q]) > eps)):
                continue
            mesh.add(u, w, v)
            changed = True
            break

    stack = list(mesh.edge)
    while stack:
        u, v = stack.pop()
        k1, k2 = mesh.edge.get((u, v)), mesh.edge.get((v, u))
        if k1 is None or k2 is None:
            continue
        a = next(i for i in mesh.tris[k1] if i not in (u, v))
        b = next(i for i in mesh.tris[k2] if i not in (u, v))
        if mesh.incircle(k1, x[b], y[b]) <= eps:
            continue
        mesh.remove(k1)
        mesh.remove(k2)
        mesh.add(a, u, b)
        mesh.add(b, v, a)
        stack.extend([(u, b), (b, v), (v, a), (a, u)])

    out = np.array([t for t in mesh.tris if t is not None], dtype=np.int64)
    return out.reshape(-1, 3)


def triangulate(points, depths=None, seed: int = 0) -> Tin:
    """Delaunay triangulation of the (east, north) projection.

    ``points`` is either an (N, 2|3) array or a :class:`DepthPoints`; in the
    latter case only usable points are used. Duplicate plan positions keep
    their first occurrence.
    """
    if hasattr(points, "usable"):
        m = points.usable()
        xyz = np.column_stack([points.east[m], points.north[m], points.depth[m]])
    else:
        a = np.asarray(points, float)
        if a.ndim != 2 or a.shape[1] not in (2, 3):
            raise TriangulationError("points must be an (N, 2) or (N, 3) array")
        z = a[:, 2] if a.shape[1] == 3 else (np.zeros(len(a)) if depths is None else np.asarray(depths, float))
        xyz = np.column_stack([a[:, :2], z])
    _, first = np.unique(xyz[:, :2], axis=0, return_index=True)
    xyz = xyz[np.sort(first)]
    if len(xyz) < 3:
        raise TriangulationError("need at least 3 distinct points")
    centred = xyz[:, :2] - xyz[:, :2].mean(axis=0)
    scale = np.abs(centred).max()
    xy = centred / scale
    sv = np.linalg.svd(xy, compute_uv=False)
    if sv[1] < 1e-9 * max(sv[0], 1e-300):
        raise TriangulationError("all points are collinear")
    order = np.random.default_rng(seed).permutation(len(xy))
    tris = _bowyer_watson(xy, order)
    area = _orient(xy[tris[:, 0], 0], xy[tris[:, 0], 1], xy[tris[:, 1], 0], xy[tris[:, 1], 1],
                   xy[tris[:, 2], 0], xy[tris[:, 2], 1])
    tris = tris[area > 1e-14]
    return Tin(xyz, tris)


def circumcircle_violations(tin: Tin, tol: float = 1e-9) -> int:
    """Brute-force count of (triangle, vertex) pairs breaking the empty-circle rule."""
    xy = tin.vertices[:, :2]
    centred = xy - xy.mean(axis=0)
    scale = max(np.abs(centred).max(), 1e-300)
    xy = centred / scale
    bad = 0
    for a, b, c in tin.triangles:
        ax, ay = xy[a]
        bx, by = xy[b]
        cx, cy = xy[c]
        d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
        uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
        r2 = (ax - ux) ** 2 + (ay - uy) ** 2
        d2 = (xy[:, 0] - ux) ** 2 + (xy[:, 1] - uy) ** 2
        d2[[a, b, c]] = np.inf
        bad += int(np.count_nonzero(d2 < r2 - tol * max(r2, 1.0)))
    return bad


def write_ply(tin: Tin, path, up_positive: bool = False):
    """ASCII PLY mesh; z is -depth unless ``up_positive`` is False (then depth)."""
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(tin.vertices)}\n")
        fh.write("property double x\nproperty double y\nproperty double z\n")
        fh.write(f"element face {len(tin.triangles)}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        sign = -1.0 if up_positive else 1.0
        for x, y, z in tin.vertices:
            fh.write(f"{x:.4f} {y:.4f} {sign * z:.4f}\n")
        for a, b, c in tin.triangles:
            fh.write(f"3 {a} {b} {c}\n")
