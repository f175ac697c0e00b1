"""
Short-baseline acoustic positioning.

A beacon pings on a known schedule; four hydrophones on the hull measure
absolute arrival times, which give four slant ranges. The beacon position
relative to the vehicle is the least-squares fit of those ranges, solved by
damped Gauss-Newton with a line search. Relative positions are expressed
in the body frame (forward, starboard, down), so a beacon straight beneath the
array centroid at depth ``d`` below it sits at ``(0, 0, d)`` relative to the
centroid.

A planar array cannot tell a beacon below the array plane from its mirror
image above it. The solver always returns the solution below the plane.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .geo import (EnuPoint, GeoDomainError, GeoPoint, Pose, body_to_enu_matrix,
                  enu_to_geo)

DEFAULT_SOUND_SPEED = 1530.0
DEFAULT_MAX_RANGE = 100.0


class ConfigurationError(ValueError):
    pass


class FilteringError(ValueError):
    pass


@dataclass(frozen=True)
class ReceiverArray:
    """Four hydrophone offsets in the body frame, meters."""

    offsets: tuple

    def __post_init__(self):
        a = np.asarray(self.offsets, dtype=float)
        if a.shape != (4, 3) or not np.all(np.isfinite(a)):
            raise ConfigurationError("a receiver array needs exactly four finite 3-vectors")
        object.__setattr__(self, "offsets", tuple(tuple(float(x) for x in row) for row in a))
        centred = a - a.mean(axis=0)
        sv = np.linalg.svd(centred, compute_uv=False)
        if sv[1] < 1e-3:
            raise ConfigurationError("receivers are collinear")
        d = np.hypot(*(a[:, None, :2] - a[None, :, :2]).transpose(2, 0, 1))
        nearest = np.where(np.eye(4, dtype=bool), np.inf, d).min(axis=1)
        if nearest.min() < 1.5 or nearest.max() > 2.5:
            warnings.warn("receiver spacing outside the recommended 1.5-2.5 m", stacklevel=2)

    @classmethod
    def square(cls, spacing: float = 2.0, depth: float = 1.0) -> "ReceiverArray":
        h = spacing / 2.0
        return cls(((h, h, depth), (h, -h, depth), (-h, -h, depth), (-h, h, depth)))

    def as_array(self) -> np.ndarray:
        return np.array(self.offsets)

    @property
    def centroid(self) -> np.ndarray:
        return self.as_array().mean(axis=0)

    def plane_normal(self) -> Optional[np.ndarray]:
        """Downward unit normal if the receivers are coplanar, else None."""
        centred = self.as_array() - self.centroid
        _, sv, vt = np.linalg.svd(centred)
        if sv[2] > 1e-6 * max(sv[0], 1.0):
            return None
        n = vt[2]
        return n if n[2] >= 0 else -n


@dataclass(frozen=True)
class AcousticNoiseModel:
    """Measurement noise for simulated arrival times.

    ``range_fraction_sigma`` scales a range error common to all four
    receivers (sound-speed and clock uncertainty), so position error grows
    as a fraction of range. ``timing_jitter_sigma`` is independent per
    receiver. Spikes add independent per-receiver range errors and only
    happen while the beacon is shallower than ``surface_threshold``.
    """

    range_fraction_sigma: float = 0.01
    timing_jitter_sigma: float = 1e-6
    surface_threshold: float = 1.0
    surface_spike_probability: float = 0.0
    spike_magnitude_sigma: float = 5.0
    dropout_probability: float = 0.0
    max_range: float = DEFAULT_MAX_RANGE

    def __post_init__(self):
        for name in ("surface_spike_probability", "dropout_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"{name} must be in [0, 1]")
        if min(self.range_fraction_sigma, self.timing_jitter_sigma, self.spike_magnitude_sigma) < 0:
            raise ConfigurationError("noise sigmas must be non-negative")

    @classmethod
    def noiseless(cls, max_range: float = DEFAULT_MAX_RANGE) -> "AcousticNoiseModel":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, max_range)


@dataclass(frozen=True)
class ToaSet:
    timestamp: float
    arrival_times: tuple
    sound_speed: float = DEFAULT_SOUND_SPEED
    spiked: bool = False

    def __post_init__(self):
        t = tuple(float(x) for x in self.arrival_times)
        if len(t) != 4 or not all(math.isfinite(x) and x > 0 for x in t):
            raise ConfigurationError("need four positive arrival times")
        if not 1400.0 <= self.sound_speed <= 1600.0:
            raise ConfigurationError("sound speed outside [1400, 1600] m/s")
        object.__setattr__(self, "arrival_times", t)


@dataclass(frozen=True)
class SblFix:
    timestamp: float
    rel_position: tuple
    enu_position: EnuPoint
    std: float
    valid: bool
    geo_position: Optional[GeoPoint] = None
    interpolated: bool = False
    iterations: int = 0

    @property
    def depth(self) -> float:
        return -self.enu_position.up


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def receiver_positions(vehicle: Pose, array: ReceiverArray) -> np.ndarray:
    rot = body_to_enu_matrix(vehicle.attitude)
    return vehicle.position.as_array() + array.as_array() @ rot.T


def simulate_toa(beacon: EnuPoint, vehicle: Pose, array: ReceiverArray,
                 noise: AcousticNoiseModel, rng_seed=None,
                 sound_speed: float = DEFAULT_SOUND_SPEED) -> Optional[ToaSet]:
    """Arrival times at the four receivers, or ``None`` for a dropout.

    Each call consumes the same number of random draws whatever the
    outcome, so a shared generator stays aligned across runs.
    """
    if beacon.up >= 0:
        raise GeoDomainError("beacon must be below the surface (up < 0)")
    rng = _rng(rng_seed)
    u_drop, u_spike = rng.random(2)
    common, *jitter = rng.standard_normal(5)
    spikes = rng.standard_normal(4)

    rx = receiver_positions(vehicle, array)
    ranges = np.linalg.norm(beacon.as_array() - rx, axis=1)
    centre_range = float(np.linalg.norm(beacon.as_array() - rx.mean(axis=0)))
    if centre_range > 2.0 * noise.max_range or u_drop < noise.dropout_probability:
        return None

    perturbed = ranges + common * noise.range_fraction_sigma * centre_range
    perturbed += np.asarray(jitter) * noise.timing_jitter_sigma * sound_speed
    spiked = bool(-beacon.up < noise.surface_threshold and u_spike < noise.surface_spike_probability)
    if spiked:
        perturbed += spikes * noise.spike_magnitude_sigma
    times = np.maximum(perturbed, 1e-3) / sound_speed
    return ToaSet(vehicle.timestamp, tuple(times), sound_speed, spiked)


def _damped_gauss_newton(rx, ranges, p0, max_iter, tol):
    """Gauss-Newton with a halving line search on the sum of squared range residuals."""
    p = p0.copy()

    def residual(q):
        d = q - rx
        n = np.sqrt(np.einsum("ij,ij->i", d, d))
        return n - ranges, d, n

    r, d, n = residual(p)
    cost = r @ r
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        jac = d / np.maximum(n, 1e-12)[:, None]
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        alpha = 1.0
        while True:
            q = p + alpha * step
            r_new, d_new, n_new = residual(q)
            cost_new = r_new @ r_new
            if cost_new <= cost or alpha < 1e-8:
                break
            alpha *= 0.5
        if cost_new > cost:
            # no descent along the Gauss-Newton direction: stationary point
            converged = bool(np.linalg.norm(jac.T @ r) < 1e-8 * (1.0 + math.sqrt(cost)))
            break
        moved = np.linalg.norm(q - p)
        p, r, d, n, cost = q, r_new, d_new, n_new, cost_new
        if moved < tol * (1.0 + np.linalg.norm(p)):
            converged = True
            break
    if not converged and cost < 1e-20 * max(1.0, float(ranges @ ranges)):
        converged = True
    jac = d / np.maximum(n, 1e-12)[:, None]
    return p, r, jac, converged, it


@dataclass(frozen=True)
class SolverSettings:
    max_range: float = DEFAULT_MAX_RANGE
    max_iter: int = 100
    tol: float = 1e-10
    residual_threshold: float = 3.0
    initial_depth: float = 10.0
    nominal_fraction: float = 0.01


def solve_fix(toa: ToaSet, vehicle: Pose, array: ReceiverArray,
              prior: Optional[EnuPoint] = None, origin: Optional[GeoPoint] = None,
              settings: SolverSettings = SolverSettings()) -> SblFix:
    """Least-squares beacon position from one set of arrival times.

    Never raises on bad data: a fix that fails to converge, has a large
    residual or lies beyond ``settings.max_range`` comes back with
    ``valid=False``.

    The reported ``std`` combines the post-fit residual covariance with a
    nominal ``nominal_fraction * range`` floor, since a common-mode range
    error leaves no trace in the residuals.
    """
    rx = array.as_array()
    ranges = np.asarray(toa.arrival_times) * toa.sound_speed
    rot = body_to_enu_matrix(vehicle.attitude)
    if prior is not None:
        p0 = rot.T @ (prior.as_array() - vehicle.position.as_array())
    else:
        p0 = array.centroid + np.array([0.0, 0.0, settings.initial_depth])

    p, res, jac, converged, iters = _damped_gauss_newton(rx, ranges, p0, settings.max_iter, settings.tol)
    normal = array.plane_normal()
    if normal is not None:
        h = (p - array.centroid) @ normal
        mirror = p - 2.0 * h * normal
        world_up = vehicle.position.up + (rot @ p)[2]
        mirror_up = vehicle.position.up + (rot @ mirror)[2]
        # prefer the image below the array plane unless it is the one above water
        if (h < 0 and mirror_up < 0) or (world_up >= 0 and mirror_up < 0):
            p = mirror
            jac = (p - rx) / np.linalg.norm(p - rx, axis=1)[:, None]

    rng = float(np.linalg.norm(p - array.centroid))
    dof = max(len(ranges) - 3, 1)
    s2 = float(res @ res) / dof
    try:
        cov = s2 * np.linalg.inv(jac.T @ jac)
        spread = float(np.trace(cov))
    except np.linalg.LinAlgError:
        spread = math.inf
    std = math.sqrt(max(spread, 0.0) + (settings.nominal_fraction * rng) ** 2)
    rms = math.sqrt(float(res @ res) / len(res))
    finite = bool(np.all(np.isfinite(p))) and math.isfinite(std)
    valid = converged and finite and rms <= settings.residual_threshold and rng <= settings.max_range

    if not finite:
        p = np.zeros(3)
        std = math.inf
    enu = vehicle.position.as_array() + rot @ p
    enu_pt = EnuPoint.from_array(enu)
    geo = enu_to_geo(enu_pt, origin) if origin is not None and finite else None
    return SblFix(toa.timestamp, tuple(float(x) for x in p), enu_pt, std, bool(valid),
                  geo, False, iters)


def filter_track(fixes: Sequence[SblFix], std_threshold: float = 3.0,
                 origin: Optional[GeoPoint] = None) -> list:
    """Drop fixes with ``std > std_threshold`` or ``valid=False`` and refill
    them by linear interpolation in ENU at their own timestamps.

    The output has one fix per input fix. Refilled fixes carry
    ``interpolated=True``; before the first or after the last good fix the
    nearest good position is held.
    """
    fixes = list(fixes)
    good = [i for i, f in enumerate(fixes) if f.valid and f.std <= std_threshold]
    if len(good) < 2:
        raise FilteringError("need at least two good fixes to interpolate between")
    t = np.array([f.timestamp for f in fixes])
    if np.any(np.diff(t) < 0):
        raise FilteringError("fixes must be time-ordered")
    tg = t[good]
    pos = np.array([fixes[i].enu_position.as_array() for i in good])
    out = []
    good_set = set(good)
    for i, f in enumerate(fixes):
        if i in good_set:
            out.append(f)
            continue
        p = np.array([np.interp(f.timestamp, tg, pos[:, k]) for k in range(3)])
        enu = EnuPoint.from_array(p)
        geo = enu_to_geo(enu, origin) if origin is not None else f.geo_position
        out.append(replace(f, enu_position=enu, geo_position=geo, valid=True, interpolated=True))
    return out
