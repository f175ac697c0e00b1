"""
Command-line entry point.

Every subcommand writes its artifacts and a ``manifest.json`` (arguments,
library versions, input and output hashes) into ``--out-dir``. Output file
names given on the command line are taken relative to that directory.
Diagnostics go to stderr; the exit code is 0 only when the command succeeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import html
import json
import logging
import math
import platform
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__

log = logging.getLogger("asvkit")

class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# plumbing


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _versions() -> dict:
    import scipy
    import shapely
    return {"asvkit": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__,
            "shapely": shapely.__version__, "pyyaml": yaml.__version__}


class Run:
    """Collects inputs and outputs of one invocation for the manifest."""

    def __init__(self, args):
        self.args = args
        self.out_dir = Path(args.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.inputs = {}
        self.outputs = []

    def input(self, path) -> Path:
        p = Path(path)
        if not p.is_file():
            raise CliError(f"input not found: {p}")
        self.inputs[str(p)] = _sha256(p)
        return p

    def output(self, name) -> Path:
        p = self.out_dir / Path(name).name
        self.outputs.append(p)
        return p

    def write_json(self, name, obj) -> Path:
        p = self.output(name)
        p.write_text(json.dumps(obj, indent=1, sort_keys=True, default=_json_default) + "\n")
        return p

    def finish(self):
        cfg = {k: v for k, v in sorted(vars(self.args).items()) if k != "func"}
        manifest = {
            "command": self.args.command,
            "config": cfg,
            "versions": _versions(),
            "inputs": self.inputs,
            "outputs": {p.name: _sha256(p) for p in self.outputs if p.exists()},
        }
        (self.out_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not JSON serialisable: {type(o)}")


def _finite_or_none(x):
    return x if isinstance(x, (int, float)) and math.isfinite(x) else None


def load_seabed(path):
    from .sim import SeabedModel
    with open(path) as fh:
        spec = yaml.safe_load(fh)
    if not isinstance(spec, dict):
        raise CliError(f"seabed spec must be a mapping: {path}")
    return SeabedModel.from_dict(spec)


# ---------------------------------------------------------------------------
# subcommands


def cmd_plan(args, run: Run):
    from .geo import GeoPoint
    from .mission import (SurveyArea, approx_label, check_iho_category, estimate_duration,
                          plan_lawnmower, plan_parameters, plan_to_geojson, sampling_spec)
    area = SurveyArea(GeoPoint(args.lat, args.lon, 0.0), args.width, args.length, args.bearing)
    plan = plan_lawnmower(area, args.spacing, args.speed, args.rate,
                          allow_speed_override=args.allow_speed_override)
    spec = sampling_spec(plan, args.beam_angle)
    iho = check_iho_category(spec, (args.min_depth, args.max_depth))
    gj = plan_to_geojson(plan, args.turn_time)
    run.write_json(args.out, gj)
    summary = plan_parameters(plan, args.beam_angle)
    summary.update({
        "kind": "plan",
        "estimated_duration_s": estimate_duration(plan, args.turn_time),
        "turn_time": args.turn_time,
        "depth_range": [args.min_depth, args.max_depth],
        "footprint_min_depth": float(spec.footprint_diameter_at(args.min_depth)),
        "footprint_max_depth": float(spec.footprint_diameter_at(args.max_depth)),
        "footprint_label": f"{approx_label(spec.footprint_diameter_at(args.min_depth))} / "
                           f"{approx_label(spec.footprint_diameter_at(args.max_depth))}",
        "iho_order_1a_passed": iho.passed,
    })
    run.write_json("plan_summary.json", summary)
    print(f"{plan.transect_count} transects, along-track spacing {spec.along_track_spacing:.3f} m, "
          f"estimated {summary['estimated_duration_s'] / 3600:.2f} h")


def cmd_simulate(args, run: Run):
    from .logfmt import save_log
    from .mission import load_plan
    from .sim import SensorNoise, SeabedModel, VehicleModel, WaveModel, simulate_survey
    plan = load_plan(run.input(args.plan))
    if args.seabed:
        seabed = load_seabed(run.input(args.seabed))
    else:
        seabed = SeabedModel.plane(args.depth)
    waves = WaveModel.calm() if args.calm else WaveModel()
    noise = SensorNoise.none() if args.no_noise else SensorNoise()
    vehicle = VehicleModel(cruise_speed=min(plan.cruise_speed, 1.2))
    res = simulate_survey(plan, vehicle, seabed, waves, noise=noise, seed=args.seed,
                          survey_id=args.survey_id, log_turns=args.log_turns)
    save_log(res.log, run.output(args.out))
    run.write_json("seabed.json", seabed.to_dict())
    tr = res.truth
    summary = {
        "kind": "simulate",
        "records": len(res.log.records),
        "depth_samples": int(len(tr.t)),
        "duration_s": float(tr.elapsed_s),
        "energy_wh": float(tr.energy_wh),
        "injected_gusts": int(np.count_nonzero(tr.gust)),
        "injected_spikes": int(np.count_nonzero(tr.spike)),
        "warnings": res.warnings,
    }
    run.write_json("simulate_summary.json", summary)
    for w in res.warnings:
        log.warning(w)
    print(f"simulated {summary['duration_s']:.0f} s, {summary['depth_samples']} depth samples")


def _beacon_track(args, run: Run):
    from .sim import BeaconKind, BeaconParams, BeaconTrack, beacon_profile
    prof = args.beacon_profile
    if prof.upper() in BeaconKind.__members__:
        params = BeaconParams(duration=args.duration, mean_speed=args.beacon_speed)
        return beacon_profile(prof.upper(), params, seed=args.seed)
    path = run.input(prof)
    with open(path) as fh:
        first = fh.readline()
    try:
        float(first.split(",")[0])
        header = 0
    except ValueError:
        header = 1
    try:
        rows = np.loadtxt(path, delimiter=",", ndmin=2, comments="#", skiprows=header)
    except ValueError as e:
        raise CliError(f"unreadable beacon profile {path}: {e}") from e
    if rows.shape[1] != 4:
        raise CliError("beacon profile file needs columns t, east, north, up")
    return BeaconTrack.from_points(rows)


def cmd_track_sim(args, run: Run):
    from .logfmt import save_log
    from .tracker import TrackerConfig, session_stats, track_session
    track = _beacon_track(args, run)
    cfg = TrackerConfig(follow_threshold=args.threshold, loop_period=args.loop_period,
                        lost_timeout=args.lost_timeout)
    slog = track_session(track, cfg=cfg, seed=args.seed, start=(args.start_east, args.start_north))
    save_log(slog, run.output(args.out))
    st = session_stats(slog, converge_within=args.threshold + 2.0)
    summary = st.summary()
    summary.update({
        "kind": "track",
        "within_threshold_after_convergence": st.fraction_at_most(args.threshold + 2.0),
        "threshold": args.threshold,
    })
    run.write_json("track_summary.json", summary)
    for w in st.warnings:
        log.warning(w)
    print(f"tracked {st.duration_min:.1f} minutes, {100 * st.fraction_within(100.0):.1f} % within 100 m")


def cmd_sbl_solve(args, run: Run):
    from .logfmt import GpsRecord, AttRecord, SblRawRecord, load_log
    from .geo import Attitude, EnuPoint, Pose, geo_to_enu_array
    from .sbl import SolverSettings, ToaSet, filter_track, solve_fix
    from .tracker import array_from_lever_arms
    slog = load_log(run.input(args.input))
    array = array_from_lever_arms(slog.header.lever_arms)
    gps, att, raw = slog.of(GpsRecord), slog.of(AttRecord), slog.of(SblRawRecord)
    if not raw:
        raise CliError("log has no SBLR records")
    if len(gps) < 2 or len(att) < 2:
        raise CliError("log needs GPS and ATT records")
    origin = slog.header.origin
    tg = np.array([r.t for r in gps])
    enu = geo_to_enu_array([r.lat for r in gps], [r.lon for r in gps], [r.h for r in gps], origin)
    ta = np.array([r.t for r in att])
    yaw_u = np.unwrap([r.yaw for r in att])
    settings = SolverSettings(max_range=args.max_range)
    fixes = []
    prior = None
    for r in raw:
        pose = Pose(r.t, EnuPoint(*(float(np.interp(r.t, tg, enu[:, k])) for k in range(3))),
                    Attitude(float(np.interp(r.t, ta, [a.roll for a in att])),
                             float(np.interp(r.t, ta, [a.pitch for a in att])),
                             float(np.interp(r.t, ta, yaw_u))))
        fix = solve_fix(ToaSet(r.t, r.toa, r.c), pose, array, prior, origin, settings)
        if fix.valid and fix.std <= args.std_threshold:
            prior = fix.enu_position
        fixes.append(fix)
    n_bad = sum(1 for f in fixes if not (f.valid and f.std <= args.std_threshold))
    if args.filter:
        fixes = filter_track(fixes, args.std_threshold, origin)
    path = run.output(args.out)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "lat", "lon", "depth", "std", "valid", "interpolated"])
        for f in fixes:
            g = f.geo_position
            w.writerow([f"{f.timestamp:.3f}", f"{g.latitude:.8f}" if g else "",
                        f"{g.longitude:.8f}" if g else "", f"{f.depth:.3f}",
                        f"{f.std:.4f}" if math.isfinite(f.std) else "inf",
                        int(f.valid), int(f.interpolated)])
    run.write_json("sbl_summary.json", {"kind": "sbl", "fixes": len(fixes), "rejected": n_bad,
                                        "filtered": bool(args.filter)})
    print(f"{len(fixes)} fixes, {n_bad} above {args.std_threshold} m std or invalid")


def cmd_process_bathy(args, run: Run):
    from .bathy import BathyConfig, grid_rmse, process_log
    from .export import rejected_geojson, write_asc, write_xyz
    from .logfmt import load_log
    from .mission import allowed_tvu
    from .tin import triangulate, write_ply
    slog = load_log(run.input(args.input))
    cfg = BathyConfig(max_angle=args.max_angle, median_window=args.window, median_band=args.band,
                      datum_offset=args.datum_offset, geoid_undulation=args.geoid,
                      vertical_reference=args.vertical_reference, immersion=args.immersion,
                      cell_size=args.cell, method=args.method, idw_radius=args.radius)
    res = process_log(slog, cfg)
    write_asc(res.grid, run.output(args.out))
    stats = dict(res.stats)
    stats["kind"] = "bathy"
    stats["cell_size"] = args.cell
    stats["method"] = args.method
    if args.xyz:
        write_xyz(res.points, run.output(args.xyz), include_rejected=args.include_rejected)
    if args.rejected:
        run.write_json(args.rejected, rejected_geojson(res.points))
    if args.ply:
        pts = res.points.subset(res.points.usable())
        write_ply(triangulate(pts, seed=args.seed), run.output(args.ply))
    if args.seabed:
        truth = load_seabed(run.input(args.seabed))
        rmse = grid_rmse(res.grid, truth.depth)
        stats["rmse_vs_truth"] = rmse
        stats["tvu_order_1a"] = float(allowed_tvu(truth.mean_depth))
    run.write_json("bathy_summary.json", stats)
    msg = f"{stats['usable']}/{stats['samples']} samples kept, grid {res.grid.rows}x{res.grid.cols}"
    if "rmse_vs_truth" in stats:
        msg += f", RMSE {stats['rmse_vs_truth']:.3f} m"
    print(msg)


def cmd_check_overlap(args, run: Run):
    from .export import write_asc
    from .logfmt import load_log
    from .photo import CameraModel, coverage_report
    slog = load_log(run.input(args.input))
    vfov = args.vfov_water if args.vfov_water is not None else args.fov_water
    cam = CameraModel(args.fov_water, vfov, args.interval, args.tilt)
    rep = coverage_report(slog, cam, args.depth, target_overlap=args.overlap, cell=args.cell)
    write_asc(rep.as_grid(), run.output(args.out))
    run.write_json("gaps.geojson", rep.gaps_geojson())
    summary = rep.summary()
    summary["kind"] = "coverage"
    summary["min_side_overlap"] = _finite_or_none(summary["min_side_overlap"])
    summary["mean_forward_overlap"] = _finite_or_none(summary["mean_forward_overlap"])
    summary["min_forward_overlap"] = _finite_or_none(summary["min_forward_overlap"])
    run.write_json("coverage_summary.json", summary)
    print(f"{100 * rep.covered_fraction:.1f} % covered, target {args.overlap:.0%} "
          f"{'met' if rep.meets_target else 'NOT met'}")


# ---------------------------------------------------------------------------
# report


def _describe_json(obj: dict, name: str) -> list:
    kind = obj.get("kind")
    if kind is None and obj.get("type") == "FeatureCollection" and "parameters" in obj:
        kind, obj = "plan", dict(obj["parameters"], kind="plan")
    lines = []
    if kind == "plan":
        lines.append(f"Mission plan ({name}): {obj['transect_count']} transects at "
                     f"{obj['transect_spacing']:g} m, along-track spacing "
                     f"{obj['along_track_spacing']:.3f} m")
        if "estimated_duration_s" in obj:
            lines.append(f"  estimated duration {obj['estimated_duration_s'] / 3600:.2f} h, "
                         f"path {obj['path_length']:.0f} m")
        if "footprint_label" in obj:
            lo, hi = obj["depth_range"]
            lines.append(f"  beam footprint {obj['footprint_label']} at {lo:g} / {hi:g} m depth")
    elif kind == "simulate":
        lines.append(f"Survey simulation ({name}): {obj['duration_s']:.0f} s, "
                     f"{obj['depth_samples']} depth samples")
    elif kind == "track":
        lines.append(f"Tracking ({name}): tracked {obj['duration_min']:.0f} minutes, "
                     f"{100 * obj['within_100m']:.0f} % within 100 m")
        modes = ", ".join(f"{k} {v:.0f} s" for k, v in sorted(obj.get("mode_seconds", {}).items()))
        lines.append(f"  modes: {modes}")
    elif kind == "sbl":
        lines.append(f"SBL fixes ({name}): {obj['fixes']} fixes, {obj['rejected']} rejected")
    elif kind == "bathy":
        lines.append(f"Bathymetry ({name}): {obj['usable']}/{obj['samples']} samples kept, "
                     f"attitude rejects {obj['attitude_rejects']}, median rejects "
                     f"{obj['median_rejects']}, grid coverage {100 * obj['grid_coverage']:.1f} %")
        if "rmse_vs_truth" in obj:
            lines.append(f"  RMSE vs truth {obj['rmse_vs_truth']:.3f} m "
                         f"(order 1a TVU {obj['tvu_order_1a']:.3f} m)")
    elif kind == "coverage":
        lines.append(f"Photo coverage ({name}): {100 * obj['covered_fraction']:.1f} % covered, "
                     f"target overlap {100 * obj['target_overlap']:.0f} % "
                     f"{'met' if obj['meets_target'] else 'not met'}")
    else:
        raise CliError(f"unknown artifact type: {name}")
    return lines


def _describe_log(path: Path) -> list:
    from .logfmt import DpthRecord, TruthRecord, load_log
    from .tracker import session_stats
    slog = load_log(path)
    if slog.of(TruthRecord):
        st = session_stats(slog)
        return [f"Tracking log ({path.name}): tracked {st.duration_min:.0f} minutes, "
                f"{100 * st.fraction_within(100.0):.0f} % within 100 m"]
    t0, t1 = slog.span()
    return [f"Survey log ({path.name}): {t1 - t0:.0f} s, {len(slog.of(DpthRecord))} depth samples, "
            f"{len(slog.records)} records"]


def _describe_grid(path: Path) -> list:
    from .export import read_asc
    g = read_asc(path)
    return [f"Grid ({path.name}): {g.rows}x{g.cols} cells, coverage {100 * g.coverage():.1f} %"]


def describe(path: Path) -> list:
    suffix = path.suffix.lower()
    if suffix == ".svlog":
        return _describe_log(path)
    if suffix == ".asc":
        return _describe_grid(path)
    if suffix in (".json", ".geojson"):
        try:
            obj = json.loads(path.read_text())
        except ValueError as e:
            raise CliError(f"unreadable artifact {path}: {e}") from e
        if not isinstance(obj, dict):
            raise CliError(f"unknown artifact type: {path.name}")
        return _describe_json(obj, path.name)
    raise CliError(f"unknown artifact type: {path.name}")


def cmd_report(args, run: Run):
    if not args.inputs:
        raise CliError("report needs at least one artifact")
    lines = []
    for p in args.inputs:
        lines.extend(describe(run.input(p)))
    text = "\n".join(lines) + "\n"
    run.output("report.txt").write_text(text)
    if args.html:
        body = "".join(f"<li>{html.escape(l)}</li>" for l in lines)
        run.output("report.html").write_text(
            f"<!doctype html><html><head><meta charset='utf-8'><title>asvkit report</title></head>"
            f"<body><h1>Survey report</h1><ul>{body}</ul></body></html>\n")
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# parser


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags without defaults so either position works
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=d(0))
    g.add_argument("--out-dir", default=d("out"))
    g.add_argument("--log-level", default=d("WARNING"),
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    g.add_argument("--config", default=d(None), help="YAML file of option defaults")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    p = argparse.ArgumentParser(prog="asvkit", description=__doc__.strip().splitlines()[0],
                                parents=[_global_flags(suppress=False)])
    p.add_argument("--version", action="version", version=f"asvkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("plan", parents=[common], help="lawnmower survey plan")
    s.add_argument("--lat", type=float, required=True, help="area centre latitude")
    s.add_argument("--lon", type=float, required=True, help="area centre longitude")
    s.add_argument("--width", type=float, required=True, help="short side, m")
    s.add_argument("--length", type=float, required=True, help="long side, m")
    s.add_argument("--bearing", type=float, default=0.0, help="bearing of the long side, deg")
    s.add_argument("--spacing", type=float, default=2.0)
    s.add_argument("--speed", type=float, default=1.0)
    s.add_argument("--rate", type=float, default=2.0, help="echo-sounder rate, Hz")
    s.add_argument("--turn-time", type=float, default=10.0)
    s.add_argument("--beam-angle", type=float, default=5.0)
    s.add_argument("--min-depth", type=float, default=1.0)
    s.add_argument("--max-depth", type=float, default=10.0)
    s.add_argument("--allow-speed-override", action="store_true")
    s.add_argument("--out", default="plan.geojson")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("simulate", parents=[common], help="simulate a bathymetric survey")
    s.add_argument("--plan", required=True)
    s.add_argument("--seabed", help="YAML seabed spec")
    s.add_argument("--depth", type=float, default=5.0, help="flat seabed depth without --seabed")
    s.add_argument("--calm", action="store_true", help="no waves or gusts")
    s.add_argument("--no-noise", action="store_true")
    s.add_argument("--log-turns", action="store_true")
    s.add_argument("--survey-id", default="sim")
    s.add_argument("--out", default="survey.svlog")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("track-sim", parents=[common], help="simulate beacon tracking")
    s.add_argument("--threshold", type=float, default=5.0)
    s.add_argument("--loop-period", type=float, default=1.0)
    s.add_argument("--lost-timeout", type=float, default=10.0)
    s.add_argument("--beacon-profile", default="DIVE_CYCLE",
                   help="STATIONARY, RANDOM_WALK, DIVE_CYCLE or a CSV of t,east,north,up")
    s.add_argument("--duration", type=float, default=1500.0)
    s.add_argument("--beacon-speed", type=float, default=0.8)
    s.add_argument("--start-east", type=float, default=0.0)
    s.add_argument("--start-north", type=float, default=-20.0)
    s.add_argument("--out", default="track.svlog")
    s.set_defaults(func=cmd_track_sim)

    s = sub.add_parser("sbl-solve", parents=[common], help="solve beacon fixes from a log")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--std-threshold", type=float, default=3.0)
    s.add_argument("--max-range", type=float, default=100.0)
    s.add_argument("--filter", action="store_true", help="interpolate over rejected fixes")
    s.add_argument("--out", default="fixes.csv")
    s.set_defaults(func=cmd_sbl_solve)

    s = sub.add_parser("process-bathy", parents=[common], help="depth grid from a survey log")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--cell", type=float, default=0.5)
    s.add_argument("--method", choices=["mean", "idw"], default="mean")
    s.add_argument("--radius", type=float, default=None, help="IDW search radius, m")
    s.add_argument("--max-angle", type=float, default=10.0)
    s.add_argument("--window", type=int, default=9)
    s.add_argument("--band", type=float, default=None, help="median band, m (default robust)")
    s.add_argument("--datum-offset", type=float, default=0.0)
    s.add_argument("--geoid", type=float, default=0.0, help="geoid undulation, m")
    s.add_argument("--vertical-reference", choices=["gps", "immersion"], default="gps")
    s.add_argument("--immersion", type=float, default=0.1)
    s.add_argument("--seabed", help="truth seabed spec for RMSE")
    s.add_argument("--xyz", help="also write an XYZ CSV")
    s.add_argument("--include-rejected", action="store_true")
    s.add_argument("--rejected", help="GeoJSON of rejected samples")
    s.add_argument("--ply", help="TIN mesh")
    s.add_argument("--out", default="grid.asc")
    s.set_defaults(func=cmd_process_bathy)

    s = sub.add_parser("check-overlap", parents=[common], help="photo coverage over a log")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--fov-water", type=float, required=True, help="across-track FOV, deg")
    s.add_argument("--vfov-water", type=float, default=None, help="along-track FOV, deg")
    s.add_argument("--interval", type=float, required=True, help="frame interval, s")
    s.add_argument("--depth", type=float, required=True)
    s.add_argument("--tilt", type=float, default=0.0)
    s.add_argument("--overlap", type=float, default=0.7)
    s.add_argument("--cell", type=float, default=0.1)
    s.add_argument("--out", default="coverage.asc")
    s.set_defaults(func=cmd_check_overlap)

    s = sub.add_parser("report", parents=[common], help="summarise artifacts")
    s.add_argument("inputs", nargs="*")
    s.add_argument("--html", action="store_true")
    s.set_defaults(func=cmd_report)
    return p


def _config_defaults(path, command) -> dict:
    with open(path) as fh:
        cfg = yaml.safe_load(fh) or {}
    if not isinstance(cfg, dict):
        raise CliError("config must be a mapping")
    out = {}
    for section in ("global", command):
        vals = cfg.get(section) or {}
        if not isinstance(vals, dict):
            raise CliError(f"config section {section!r} must be a mapping")
        out.update({k.replace("-", "_"): v for k, v in vals.items()})
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            defaults = _config_defaults(args.config, args.command)
            sub = parser._subparsers._group_actions[0].choices[args.command]
            known = {a.dest for a in sub._actions}
            unknown = set(defaults) - known
            if unknown:
                raise CliError(f"unknown config keys: {sorted(unknown)}")
            sub.set_defaults(**defaults)
            args = parser.parse_args(argv)
    except CliError as e:
        print(f"asvkit: error: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = Run(args)
        args.func(args, run)
        run.finish()
    except (CliError, ValueError, KeyError, OSError) as e:
        log.error("%s", e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
