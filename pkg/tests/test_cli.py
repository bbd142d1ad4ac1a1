import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

from beltrami.cli import main


def _config(tmp_path, name="config.json", **overrides):
    cfg = {
        "schema_version": 1,
        "domain": {
            "half_width": 3.0,
            "resolution": 128,
            "omega": {"shape": "disc", "center": [0.0, 0.0], "radius": 1.0},
            "margin": 0.8,
        },
        "solver": {"tol": 1e-10, "max_iter": 200, "contraction_cap": 0.9},
        "mu": {"kind": "constant", "value": [0.3, 0.0]},
        "u": {"kind": "disc-indicator"},
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def _invoke(args):
    return CliRunner().invoke(main, [str(a) for a in args])


def _tree_bytes(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()}


# ---------------------------------------------------------------------------
# solve-beltrami
# ---------------------------------------------------------------------------

def test_solve_beltrami_run(tmp_path):
    cfg = _config(tmp_path, domain={
        "half_width": 3.0, "resolution": 256,
        "omega": {"shape": "disc", "center": [0.0, 0.0], "radius": 1.0},
        "margin": 0.8,
    })
    out = tmp_path / "run"
    result = _invoke(["solve-beltrami", "--config", cfg, "--out", out])
    assert result.exit_code == 0, result.output
    for name in ("h.field", "g.field", "phi.field", "mu_raw.field",
                 "report.json", "residual_trace.csv", "config.json",
                 "h_abs.pgm", "h_arg.pgm", "h_scale.txt"):
        assert (out / name).exists(), name
    report = json.loads((out / "report.json").read_text())
    assert report["interior_residual"] <= 1e-2
    assert report["iterations"] <= 200


def test_invalid_mu_exits_1_before_solving(tmp_path):
    cfg = _config(tmp_path, mu={"kind": "constant", "value": [1.2, 0.0]})
    out = tmp_path / "run"
    result = _invoke(["solve-beltrami", "--config", cfg, "--out", out])
    assert result.exit_code == 1
    assert not (out / "h.field").exists()
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["kind"] == "ValidationError"
    assert payload["exit_code"] == 1


def test_contraction_error_exits_2(tmp_path):
    cfg = _config(tmp_path, solver={"tol": 1e-10, "max_iter": 200,
                                    "contraction_cap": 0.05})
    result = _invoke(["solve-beltrami", "--config", cfg, "--out", tmp_path / "r"])
    assert result.exit_code == 2
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["kind"] == "ContractionTooLarge"


@pytest.mark.parametrize("breakage", [
    {"schema_version": 99},
    {"mu": {"kind": "mystery"}},
    {"domain": {"half_width": 3.0, "resolution": 10,
                "omega": {"shape": "disc", "radius": 1.0}, "margin": 0.8}},
])
def test_config_validation_exits_1(tmp_path, breakage):
    cfg = _config(tmp_path, **breakage)
    result = _invoke(["solve-beltrami", "--config", cfg, "--out", tmp_path / "r"])
    assert result.exit_code == 1


def test_malformed_json_exits_1(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    result = _invoke(["solve-beltrami", "--config", path, "--out", tmp_path / "r"])
    assert result.exit_code == 1


# ---------------------------------------------------------------------------
# other commands
# ---------------------------------------------------------------------------

def test_solve_dbar_and_verify(tmp_path):
    cfg = _config(tmp_path)
    out = tmp_path / "run"
    assert _invoke(["solve-dbar", "--config", cfg, "--out", out]).exit_code == 0
    assert (out / "f.field").exists() and (out / "rhs.field").exists()
    verify = _invoke(["verify", "--out", out])
    assert verify.exit_code == 0, verify.output
    assert "reproduced" in verify.output


def test_verify_detects_tampering(tmp_path):
    cfg = _config(tmp_path)
    out = tmp_path / "run"
    _invoke(["solve-dbar", "--config", cfg, "--out", out])
    report = json.loads((out / "report.json").read_text())
    report["interior_residual"] += 1e-3
    (out / "report.json").write_text(json.dumps(report))
    result = _invoke(["verify", "--out", out])
    assert result.exit_code == 2
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["kind"] == "VerificationMismatch"


def test_verify_without_report_exits_1(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert _invoke(["verify", "--out", empty]).exit_code == 1


def test_sweep_family_run_and_verify(tmp_path):
    cfg = _config(tmp_path, family={"law": "linear",
                                    "grid": [0.0, 0.25, 0.5, 0.75, 1.0]})
    out = tmp_path / "fam"
    result = _invoke(["sweep-family", "--config", cfg, "--out", out,
                      "--threads", 2])
    assert result.exit_code == 0, result.output
    assert (out / "family_report.csv").exists()
    report = json.loads((out / "report.json").read_text())
    assert len(report["entries"]) == 5
    assert report["lipschitz_constant"] > 0
    assert all((out / f"f_{i:03d}.field").exists() for i in range(5))
    assert _invoke(["verify", "--out", out]).exit_code == 0


def test_sweep_family_table_law_and_verify(tmp_path):
    cfg = _config(tmp_path, family={
        "law": "table",
        "grid": [0.0, 0.5, 1.0],
        "mu_table": [
            {"kind": "constant", "value": [0.1, 0.0]},
            {"kind": "constant", "value": [0.2, 0.1]},
            {"kind": "linear-z", "coefficient": [0.3, 0.0]},
        ],
    })
    out = tmp_path / "table"
    result = _invoke(["sweep-family", "--config", cfg, "--out", out])
    assert result.exit_code == 0, result.output
    assert _invoke(["verify", "--out", out]).exit_code == 0


def test_exhaust_run_and_verify(tmp_path):
    cfg = _config(
        tmp_path,
        u={"kind": "disc-indicator", "radius": 0.25, "width": 0.5},
        mu={"kind": "constant", "value": [0.0, 0.0]},
        exhaustion={"radii": [1.0, 1.5, 2.0], "taylor_degree": 8},
    )
    out = tmp_path / "ex"
    result = _invoke(["exhaust", "--config", cfg, "--out", out])
    assert result.exit_code == 0, result.output
    assert (out / "exhaust_steps.csv").exists()
    report = json.loads((out / "report.json").read_text())
    assert len(report["steps"]) == 3
    assert _invoke(["verify", "--out", out]).exit_code == 0


def test_oracle_compare(tmp_path):
    cfg = _config(tmp_path, domain={
        "half_width": 3.0, "resolution": 64,
        "omega": {"shape": "disc", "center": [0.0, 0.0], "radius": 1.0},
        "margin": 0.8,
    }, u={"kind": "gaussian-bump", "amplitude": [0.3, 0.0], "width": 0.566})
    out = tmp_path / "oc"
    result = _invoke(["oracle-compare", "--config", cfg, "--out", out])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert report["cauchy_sup_difference_on_omega"] <= 1e-2
    assert report["beurling_sup_difference_on_omega"] <= 1e-2


def test_quadrature_method_lane(tmp_path):
    cfg = _config(tmp_path, domain={
        "half_width": 3.0, "resolution": 64,
        "omega": {"shape": "disc", "center": [0.0, 0.0], "radius": 1.0},
        "margin": 0.8,
    })
    out = tmp_path / "q"
    result = _invoke(["solve-beltrami", "--config", cfg, "--out", out,
                      "--method", "quadrature"])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "report.json").read_text())
    assert report["method"] == "quadrature"
    assert report["interior_residual"] <= 5e-2


# ---------------------------------------------------------------------------
# determinism and the installed entry point
# ---------------------------------------------------------------------------

def test_identical_configs_are_bitwise_identical(tmp_path):
    cfg = _config(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert _invoke(["solve-dbar", "--config", cfg, "--out", out_a]).exit_code == 0
    assert _invoke(["solve-dbar", "--config", cfg, "--out", out_b]).exit_code == 0
    assert _tree_bytes(out_a) == _tree_bytes(out_b)


def test_module_entry_point_maps_usage_errors_to_1(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "beltrami", "solve-beltrami",
         "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    payload = json.loads(proc.stderr.strip().splitlines()[-1])
    assert payload["exit_code"] == 1


def test_unwritable_out_exits_3(tmp_path):
    cfg = _config(tmp_path)
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    result = _invoke(["solve-beltrami", "--config", cfg,
                      "--out", blocker / "sub"])
    assert result.exit_code == 3
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["exit_code"] == 3
