import json

import numpy as np
import pytest

from asvkit.bathy import DepthGrid
from asvkit.cli import main
from asvkit.export import write_asc

EUROPA = ["--lat", "-22.340984", "--lon", "40.337634"]


def run(tmp, *args):
    return main(["--out-dir", str(tmp), *args])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run(d, "plan", *EUROPA, "--width", "12", "--length", "30") == 0
    (d / "seabed.yaml").write_text("kind: composite\nmean_depth: 4.0\n"
                                   "generate:\n  extent: [10, 20]\n  n_rocks: 4\n  seed: 2\n")
    assert run(d, "--seed", "5", "simulate", "--plan", str(d / "plan.geojson"),
               "--seabed", str(d / "seabed.yaml")) == 0
    return d


def test_plan_outputs(workspace):
    summary = json.loads((workspace / "plan_summary.json").read_text())
    assert summary["transect_count"] == 6
    assert summary["along_track_spacing"] == pytest.approx(0.5)
    gj = json.loads((workspace / "plan.geojson").read_text())
    assert gj["type"] == "FeatureCollection"


def test_manifest(workspace):
    m = json.loads((workspace / "manifest.json").read_text())
    assert m["command"] == "simulate"
    assert m["config"]["seed"] == 5
    assert "numpy" in m["versions"]
    assert any(k.endswith("plan.geojson") for k in m["inputs"])
    assert "survey.svlog" in m["outputs"]


def test_process_bathy(workspace, tmp_path):
    rc = run(tmp_path, "process-bathy", "--in", str(workspace / "survey.svlog"),
             "--seabed", str(workspace / "seabed.yaml"), "--xyz", "points.csv",
             "--rejected", "rejected.geojson", "--ply", "tin.ply", "--method", "idw")
    assert rc == 0
    s = json.loads((tmp_path / "bathy_summary.json").read_text())
    assert s["rmse_vs_truth"] <= s["tvu_order_1a"]
    for name in ("grid.asc", "points.csv", "rejected.geojson", "tin.ply"):
        assert (tmp_path / name).stat().st_size > 0


def test_check_overlap(workspace, tmp_path):
    rc = run(tmp_path, "check-overlap", "--in", str(workspace / "survey.svlog"),
             "--fov-water", "90", "--interval", "0.5", "--depth", "3")
    assert rc == 0
    s = json.loads((tmp_path / "coverage_summary.json").read_text())
    assert 0 < s["covered_fraction"] <= 1
    assert (tmp_path / "gaps.geojson").exists() and (tmp_path / "coverage.asc").exists()


def test_track_and_solve(tmp_path):
    assert run(tmp_path, "track-sim", "--duration", "120") == 0
    assert run(tmp_path, "sbl-solve", "--in", str(tmp_path / "track.svlog"), "--filter") == 0
    lines = (tmp_path / "fixes.csv").read_text().splitlines()
    assert lines[0].split(",")[:3] == ["t", "lat", "lon"]
    assert len(lines) > 100


def test_rerun_is_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert run(d, "track-sim", "--duration", "60", "--seed", "3") == 0
        outs.append((d / "track.svlog").read_bytes())
    assert outs[0] == outs[1]


def test_report(workspace, tmp_path, capsys):
    rc = run(tmp_path, "report", str(workspace / "plan_summary.json"),
             str(workspace / "survey.svlog"), "--html")
    assert rc == 0
    text = (tmp_path / "report.txt").read_text()
    assert "6 transects" in text and "0.500 m" in text
    assert "≈ 9 cm / ≈ 90 cm" in text
    assert (tmp_path / "report.html").read_text().startswith("<!doctype html>")


def test_report_empty_grid(tmp_path):
    g = DepthGrid(None, 0.0, 0.0, 1.0, np.full((3, 3), np.nan), np.zeros((3, 3), int),
                  np.full((3, 3), np.nan))
    write_asc(g, tmp_path / "empty.asc")
    assert run(tmp_path / "o", "report", str(tmp_path / "empty.asc")) == 0
    assert "coverage 0.0 %" in (tmp_path / "o" / "report.txt").read_text()


def test_report_unknown_artifact(tmp_path):
    (tmp_path / "x.bin").write_bytes(b"\0\1")
    assert run(tmp_path, "report", str(tmp_path / "x.bin")) != 0
    (tmp_path / "y.json").write_text('{"foo": 1}')
    assert run(tmp_path, "report", str(tmp_path / "y.json")) != 0


def test_missing_input(tmp_path):
    assert run(tmp_path, "process-bathy", "--in", str(tmp_path / "nope.svlog")) == 1


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("global:\n  seed: 11\nplan:\n  spacing: 3.0\n")
    assert run(tmp_path, "--config", str(cfg), "plan", *EUROPA, "--width", "12",
               "--length", "30") == 0
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["config"]["seed"] == 11 and m["config"]["spacing"] == 3.0
    bad = tmp_path / "bad.yaml"
    bad.write_text("plan:\n  bogus: 1\n")
    assert run(tmp_path, "--config", str(bad), "plan", *EUROPA, "--width", "1",
               "--length", "3") == 2


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as e:
        main(["plan", "--help"])
    assert e.value.code == 0


def test_beacon_profile_csv(tmp_path):
    (tmp_path / "b.csv").write_text("t,east,north,up\n0,0,0,-2\n60,20,0,-3\n")
    assert run(tmp_path, "track-sim", "--beacon-profile", str(tmp_path / "b.csv")) == 0
    (tmp_path / "c.csv").write_text("0,0,0,-2\n60,20,0,-3\n")
    assert run(tmp_path, "track-sim", "--beacon-profile", str(tmp_path / "c.csv")) == 0
    (tmp_path / "d.csv").write_text("0,0,-2\n60,20,-3\n")
    assert run(tmp_path, "track-sim", "--beacon-profile", str(tmp_path / "d.csv")) == 1
