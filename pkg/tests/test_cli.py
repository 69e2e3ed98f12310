import json
import os

import pytest

from carrollian.cli import main

BASE = {
    "grid": {"x_min": 0.0, "x_max": 1.0, "n_cells": 64},
    "solver": {"epsilon": 0.02, "c0": 1.0, "t_end": 0.1, "output_every": 20},
    "initial_data": {"kind": "demo_sine"},
}


def write_cfg(tmp_path, overrides=None, name="cfg.json", **top):
    cfg = json.loads(json.dumps(BASE))
    if overrides:
        for section, vals in overrides.items():
            if isinstance(vals, dict) and isinstance(cfg.get(section), dict):
                cfg[section].update(vals)
            else:
                cfg[section] = vals
    cfg.update(top)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def last_stderr_json(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1, f"expected a single stderr line, got {err}"
    return json.loads(err[0])


def test_run_writes_artifacts(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["run", cfg, "--output-dir", str(out)]) == 0

    summary = read_json(out / "summary.json")
    assert summary["min_w1_overall"] >= 1.2
    assert summary["min_w2_overall"] >= 1.2
    assert summary["cum_dissipation"] > 0.0
    assert summary["steps"] > 0
    assert summary["h_flux_engaged"] is False
    assert summary["config"]["solver"]["epsilon"] == 0.02

    steps = (out / "steps.csv").read_text().splitlines()
    assert steps[0] == "t,dt,min_w1,min_w2,l2_energy,visc_dissipation_cum"
    assert len(steps) == summary["steps"] + 1

    for name in summary["snapshot_files"]:
        assert (out / name).is_file()
    assert len(summary["snapshot_files"]) == len(summary["snapshot_times"])
    head = (out / summary["snapshot_files"][0]).read_text().splitlines()[0]
    assert head == "x,sigma,beta"


def test_run_rejects_nonpositive_epsilon(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"solver": {"epsilon": 0.0}})
    assert main(["run", cfg, "--output-dir", str(tmp_path / "o")]) == 3
    assert last_stderr_json(capsys)["error"] == "ConfigError"


def test_run_rejects_unknown_top_level_key(tmp_path, capsys):
    cfg = write_cfg(tmp_path, extra_section={"x": 1})
    assert main(["run", cfg, "--output-dir", str(tmp_path / "o")]) == 3
    assert "extra_section" in last_stderr_json(capsys)["message"]


def test_run_missing_config_file(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["run", missing, "--output-dir", str(tmp_path / "o")]) == 3
    payload = last_stderr_json(capsys)
    assert payload["error"] == "ConfigError"
    assert "not found" in payload["message"]


def test_run_rejects_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["run", str(path), "--output-dir", str(tmp_path / "o")]) == 3
    assert "JSON" in last_stderr_json(capsys)["message"]


def test_run_inadmissible_jump_exits_2(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        {"initial_data": {"kind": "riemann_jump", "left": [1.0, 0.9], "right": [2.0, 1.0]}},
    )
    assert main(["run", cfg, "--output-dir", str(tmp_path / "o")]) == 2
    payload = last_stderr_json(capsys)
    assert payload["error"] == "InvariantViolationError"
    assert "inadmissible" in payload["message"]


def test_run_admissible_jump(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "solver": {"t_end": 0.05},
            "initial_data": {
                "kind": "riemann_jump",
                "left": {"sigma": 2.0, "beta": 1.0},
                "right": [3.0, 0.5],
            },
        },
    )
    out = tmp_path / "o"
    assert main(["run", cfg, "--output-dir", str(out)]) == 0
    assert read_json(out / "summary.json")["min_w2_overall"] >= 1.0 - 1e-6


def test_sweep_requires_three_decreasing_epsilons(tmp_path, capsys):
    short = write_cfg(tmp_path, name="short.json", sweep={"epsilon": [0.04, 0.02]})
    assert main(["sweep-eps", short, "--output-dir", str(tmp_path / "o")]) == 3
    assert "at least 3" in last_stderr_json(capsys)["message"]

    rising = write_cfg(tmp_path, name="rising.json", sweep={"epsilon": [0.01, 0.02, 0.04]})
    assert main(["sweep-eps", rising, "--output-dir", str(tmp_path / "o")]) == 3
    assert "decreasing" in last_stderr_json(capsys)["message"]


def test_sweep_report_and_byte_identity(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {"solver": {"epsilon": 0.04, "t_end": 0.1, "output_every": 5}},
        sweep={"epsilon": [0.04, 0.02, 0.01]},
    )
    outs = [tmp_path / f"o{i}" for i in range(3)]
    assert main(["sweep-eps", cfg, "--output-dir", str(outs[0])]) == 0
    assert main(["sweep-eps", cfg, "--output-dir", str(outs[1])]) == 0
    assert main(["sweep-eps", cfg, "--output-dir", str(outs[2]), "--threads", "2"]) == 0

    blobs = [(o / "sweep_report.json").read_bytes() for o in outs]
    assert blobs[0] == blobs[1] == blobs[2]

    report = json.loads(blobs[0])
    assert report["epsilons"] == [0.04, 0.02, 0.01]
    assert len(report["l1_diffs"]) == 2
    assert report["l1_monotone"] is True
    assert len(report["weak_residual_norms"]) == 3
    assert len(report["per_run"]) == 3
    assert "wallclock" not in json.dumps(report)


def test_audit_constant_data_all_pass(tmp_path):
    cfg = write_cfg(
        tmp_path,
        {
            "solver": {"t_end": 0.05, "output_every": 1},
            "initial_data": {"kind": "constant", "sigma": 2.0, "beta": 1.0},
        },
        audits=[{"pair": "special"}, {"pair": "quartic", "phi": "bump:0.4:0.5"}],
        bins=32,
    )
    out = tmp_path / "o"
    assert main(["entropy-audit", cfg, "--output-dir", str(out)]) == 0

    report = read_json(out / "audit_report.json")
    assert report["all_pass"] is True
    assert len(report["audits"]) == 10  # 9 battery members + 1 named bump
    assert report["kinetic"]["total_mu1"] == 0.0
    assert report["kinetic"]["cum_dissipation"] == 0.0

    hist = (out / "histogram.csv").read_text().splitlines()
    assert hist[0] == "s_lo,s_hi,mu1,mu2"
    assert len(hist) == 33
    assert (out / "audit_000.json").is_file()
    first = read_json(out / "audit_000.json")
    assert set(first) == {"audit", "inputs", "value", "threshold", "pass"}
    assert first["pass"] is True


def test_audit_concave_scale_is_refused(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        {"solver": {"t_end": 0.05}},
        audits=[{"pair": "special", "scale": -1.0}],
    )
    assert main(["entropy-audit", cfg, "--output-dir", str(tmp_path / "o")]) == 3
    assert "convex" in last_stderr_json(capsys)["message"]


def test_audit_unknown_pair(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"solver": {"t_end": 0.05}}, audits=[{"pair": "sextic"}])
    assert main(["entropy-audit", cfg, "--output-dir", str(tmp_path / "o")]) == 3
    assert "sextic" in last_stderr_json(capsys)["message"]


def test_oracle_compare_second_order_gap(tmp_path):
    cfg = write_cfg(tmp_path, {"solver": {"t_end": 0.25, "output_every": 10_000}})
    out = tmp_path / "o"
    assert main(["oracle-compare", cfg, "--output-dir", str(out)]) == 0

    report = read_json(out / "oracle_report.json")
    assert report["gaps"][0]["n_cells"] == 64
    assert report["gaps"][1]["n_cells"] == 128
    assert report["gaps"][1]["linf"] < report["gaps"][0]["linf"]
    assert 3.0 <= report["ratio_linf"] <= 5.0
    assert 3.0 <= report["modified_ratio_linf"] <= 5.0


def test_output_dir_from_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = write_cfg(tmp_path, {"solver": {"t_end": 0.02}}, output_dir="from_cfg")
    assert main(["run", cfg]) == 0
    assert os.path.isfile(tmp_path / "from_cfg" / "summary.json")
