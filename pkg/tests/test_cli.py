"""Command-line front end: exit codes, file outputs, config handling."""

from __future__ import annotations

import json

import numpy as np
import pytest

from hardylab import cli


def run(*argv):
    return cli.main(list(argv))


def test_verify_example_passes(tmp_path):
    out = tmp_path / "report.json"
    code = run("verify-example", "--samples", "20", "--seed", "1",
               "--json", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert report["schema_version"] == 1
    assert report["max_rel_residual"] < 1e-6
    assert report["norm_t_minus1"] == pytest.approx(report["norm_t_plus1"], abs=1e-10)


def test_verify_example_bad_k():
    assert run("verify-example", "--k", "1") == 2


def test_verify_example_zero_samples():
    assert run("verify-example", "--samples", "0") == 2


def test_iterate_converged(tmp_path):
    prefix = str(tmp_path / "fan")
    assert run("iterate", "--mu", "0.1", "--out", prefix) == 0
    report = json.loads((tmp_path / "fan.json").read_text())
    assert report["verdict"] == "Converged"
    assert report["R"] == pytest.approx(0.5, abs=1e-12)
    header = (tmp_path / "fan.csv").read_text().splitlines()[0]
    cols = header.split(",")
    assert cols[0] == "t" and cols[1] == "a_1" and cols[-1] == f"a_{report['k_final']}"


def test_iterate_gate_closed(tmp_path):
    prefix = str(tmp_path / "fan")
    assert run("iterate", "--mu", "0.3", "--out", prefix) == 0
    report = json.loads((tmp_path / "fan.json").read_text())
    assert report["verdict"] == "GateClosed"
    assert report["k_final"] == 1


def test_iterate_requires_mu():
    assert run("iterate") == 2


def test_iterate_rejects_nonpositive_mu():
    assert run("iterate", "--mu", "-1") == 2


def test_hardy_verdicts(tmp_path):
    out = tmp_path / "h.json"
    assert run("hardy", "--alpha", "1", "--beta", "1", "--json", str(out)) == 0
    assert json.loads(out.read_text())["verdict"] == "MustVanish"
    assert run("hardy", "--alpha", "2", "--beta", "2", "--json", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["verdict"] == "Profile"
    assert report["R"] == pytest.approx(1.0, abs=1e-12)
    assert run("hardy", "--alpha", "8", "--beta", "1", "--json", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["a_endpoints"] == pytest.approx([1.0, 1.0 / 64.0], abs=1e-12)


def test_hardy_rejects_nonpositive():
    assert run("hardy", "--alpha", "-2", "--beta", "1") == 2


def test_evolve_trace(tmp_path):
    csv = tmp_path / "trace.csv"
    out = tmp_path / "trace.json"
    code = run("evolve", "--preset", "free-gaussian", "--N", "512",
               "--dt", "2e-3", "--t-final", "0.2",
               "--csv", str(csv), "--json", str(out))
    assert code == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "t,H,norm2,admissible_flag"
    assert len(lines) > 10
    report = json.loads(out.read_text())
    assert "min_second_difference" in report and "final_norm2" in report


def test_evolve_unknown_preset():
    assert run("evolve", "--preset", "nope") == 2


def test_evolve_inadmissible_weight():
    assert run("evolve", "--preset", "free-gaussian", "--N", "512",
               "--dt", "2e-3", "--t-final", "0.5", "--mu", "0.2") == 2


def test_convexity_scan(tmp_path):
    csv = tmp_path / "conv.csv"
    out = tmp_path / "conv.json"
    code = run("convexity", "--csv", str(csv), "--json", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert report["min_second_difference"] >= -1e-6
    assert csv.read_text().splitlines()[0] == "t,H,norm2,admissible_flag"


def test_gauge_check(tmp_path):
    out = tmp_path / "g.json"
    assert run("gauge-check", "--preset", "landau", "--b0", "1.0",
               "--json", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["max_x_dot_A"] < 1e-8


def test_gauge_check_unknown_preset():
    assert run("gauge-check", "--preset", "nope") == 2


def test_appell_check_identity(tmp_path):
    out = tmp_path / "a.json"
    assert run("appell-check", "--alpha", "2", "--beta", "2",
               "--json", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["identity_deviation"] == 0.0
    assert report["weighted_identity_rel_error"] < 1e-6


def test_appell_check_requires_scales():
    assert run("appell-check") == 2


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu=0.1\ngrid_nodes=257\n")
    prefix = str(tmp_path / "fan")
    assert run("iterate", "--config", str(cfg), "--out", prefix) == 0
    report = json.loads((tmp_path / "fan.json").read_text())
    assert report["verdict"] == "Converged"


def test_config_flag_wins(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu=0.3\n")
    prefix = str(tmp_path / "fan")
    assert run("iterate", "--mu", "0.1", "--config", str(cfg), "--out", prefix) == 0
    assert json.loads((tmp_path / "fan.json").read_text())["verdict"] == "Converged"


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus_key=1\n")
    assert run("iterate", "--mu", "0.1", "--config", str(cfg)) == 2


def test_config_bad_value(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid_nodes=hello\n")
    assert run("iterate", "--mu", "0.1", "--config", str(cfg)) == 2


def test_config_missing_file(tmp_path):
    assert run("iterate", "--mu", "0.1", "--config", str(tmp_path / "none.cfg")) == 2


def test_deterministic_outputs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    ca, cb = tmp_path / "a.csv", tmp_path / "b.csv"
    for j, c in ((a, ca), (b, cb)):
        assert run("verify-example", "--samples", "10", "--seed", "7",
                   "--json", str(j), "--csv", str(c)) == 0
    assert a.read_bytes() == b.read_bytes()
    assert ca.read_bytes() == cb.read_bytes()


def test_csv_round_trips_doubles(tmp_path):
    csv = tmp_path / "fan.csv"
    assert run("iterate", "--mu", "0.1", "--out", str(tmp_path / "fan")) == 0
    rows = csv.read_text().splitlines()
    first = rows[1].split(",")
    assert float(first[0]) == -1.0
    assert float(first[1]) == 0.1
