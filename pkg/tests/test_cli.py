import csv
import io
import json
import subprocess
import sys

import pytest

from twoslit import analysis, optics
from twoslit.cli import run_cli


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_pattern_roundtrip_visibility(geom):
    code, out, _ = call(["pattern", "--overlap", "0.5"])
    assert code == 0
    curve = optics.DensityCurve.from_csv(out)
    assert abs(analysis.visibility_phasor(curve, geom).v_hat - 0.5) <= 1e-6
    assert abs(analysis.visibility_born(curve, geom).v_hat - 0.5) <= 1e-6


def test_pattern_json():
    code, out, _ = call(["pattern", "--overlap", "0.2", "--points", "64", "--format", "json"])
    data = json.loads(out)
    assert code == 0 and len(data["x_m"]) == 64


def test_duality_analytic():
    code, out, _ = call(["duality", "--overlap", "0.3", "--samples", "0"])
    data = json.loads(out)
    assert code == 0
    assert tuple(data) == analysis.REPORT_FIELDS
    assert abs(data["sum_dq_v"] - 1) <= 1e-12


def test_run_writes_artifacts(tmp_path):
    code, _, _ = call(["run", "--overlap", "0.4", "--samples", "20000", "--seed", "5", "--out-dir", str(tmp_path)])
    assert code == 0
    rows = list(csv.reader((tmp_path / "histograms.csv").open()))
    assert rows[0] == ["bin_left_m", "bin_right_m", "count_a1", "count_a2", "count_all"]
    report = json.loads((tmp_path / "report.json").read_text())
    assert tuple(report) == analysis.REPORT_FIELDS
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["n_a1"] + summary["n_a2"] == 20000
    assert summary["wrong_verdicts"] == 0


def test_sweep_schema():
    code, out, _ = call(["sweep", "--steps", "5", "--samples", "2000", "--seed", "3"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == list(analysis.REPORT_FIELDS)
    assert len(rows) == 5
    assert rows[0]["v_a2"] == ""  # no inconclusive quantons at c = 0


def test_uqsd_verify():
    code, out, _ = call(["uqsd-verify", "--steps", "3", "--samples", "10000"])
    rows = json.loads(out)
    assert code == 0
    for row in rows:
        assert row["unitarity_residual"] <= 1e-12
        assert row["image_residual"] <= 1e-12
        assert row["wrong_verdicts"] == 0


def test_validation_aggregates_errors():
    code, _, err = call(["run", "--overlap", "2", "--bins", "3", "--streams", "0"])
    assert code == 1
    assert "--overlap" in err and "--bins" in err and "--streams" in err


def test_geometry_validation():
    code, _, err = call(["pattern", "--envelope-width", "0.01"])
    assert code == 1 and "fringe_period" in err


@pytest.mark.parametrize("argv", [["pattern", "--nope"], ["explode"], []])
def test_usage_errors(argv):
    code, _, err = call(argv)
    assert code == 1
    assert "usage" in err


def test_runtime_failure_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = call(["pattern", "--out-dir", str(blocker / "sub")])
    assert code == 2 and err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "twoslit", "duality", "--overlap", "0.6", "--samples", "0"],
        capture_output=True, text=True, check=True,
    )
    assert abs(json.loads(proc.stdout)["sum_v2_d2"] - 1) <= 1e-12


def test_identical_args_identical_bytes(tmp_path):
    argv = ["run", "--overlap", "0.7", "--samples", "30000", "--seed", "9", "--streams", "2"]
    call(argv + ["--out-dir", str(tmp_path / "a")])
    call(argv + ["--out-dir", str(tmp_path / "b")])
    for name in ("report.json", "histograms.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
