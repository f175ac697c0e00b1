"""Monte-Carlo SBL position error against range for several noise levels."""

import argparse
import json
import math
from pathlib import Path

import numpy as np

from asvkit.geo import Attitude, EnuPoint, Pose, body_to_enu_matrix
from asvkit.sbl import AcousticNoiseModel, ReceiverArray, simulate_toa, solve_fix


def random_geometry(rng, array, r):
    """Tilted vehicle and a beacon at slant range ``r``, at least 0.5 m below the surface."""
    while True:
        pose, beacon = _draw(rng, array, r)
        if beacon.up < -0.5:
            return pose, beacon


def _draw(rng, array, r):
    depth = float(rng.uniform(max(1.0, r * math.sin(math.radians(2))), min(50.0, 0.95 * r)))
    el, az = math.asin(depth / r), float(rng.uniform(0, 2 * math.pi))
    att = Attitude(rng.normal(0, 0.03), rng.normal(0, 0.03), rng.uniform(0, 2 * math.pi))
    pose = Pose(0.0, EnuPoint(0.0, 0.0, 0.0), att)
    body = array.centroid + r * np.array([math.cos(el) * math.cos(az),
                                          math.cos(el) * math.sin(az), math.sin(el)])
    return pose, EnuPoint.from_array(body_to_enu_matrix(att) @ body)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500, help="per range bin and noise level")
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.001, 0.005, 0.01, 0.02])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="out/sbl")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    array = ReceiverArray.square()
    bins = [5, 10, 20, 40, 60, 80, 100]
    rows = []
    for frac in args.fractions:
        noise = AcousticNoiseModel(range_fraction_sigma=frac, timing_jitter_sigma=0.0)
        for r in bins:
            errs, valid = [], 0
            for _ in range(args.trials):
                pose, beacon = random_geometry(rng, array, float(r))
                fix = solve_fix(simulate_toa(beacon, pose, array, noise, rng), pose, array)
                valid += fix.valid
                errs.append(np.linalg.norm(fix.enu_position.as_array() - beacon.as_array()))
            rows.append({"fraction": frac, "range": r, "median": float(np.median(errs)),
                         "p75": float(np.percentile(errs, 75)), "valid": valid / args.trials})
            print(f"sigma {100 * frac:4.1f} % range {r:4d} m: median {rows[-1]['median']:.3f} m, "
                  f"p75 {rows[-1]['p75']:.3f} m, valid {100 * rows[-1]['valid']:.0f} %")
    (out / "summary.json").write_text(json.dumps(rows, indent=1))


if __name__ == "__main__":
    main()
