"""Command line front end: exit codes, artifacts, and help/docs sync."""

import json

import pytest

from dicode.cli import (
    BOUNDS_KEYS,
    CONSTRUCT_KEYS,
    MOMENTS_KEYS,
    PACKING_KEYS,
    main,
)
from dicode.harness import CONFIG_KEYS


def run(argv):
    return main(argv)


SIM_CONFIG = {
    "channel": {"type": "awgn", "sigma2": 0.25},
    "codebook": {"type": "concat", "n": 500, "a": 0.02},
    "verifier": {"mode": "csi-fast"},
    "trials": {"identities": 4, "per_identity": 3, "pairs": 4,
               "per_pair": 2, "min_distance_pairs": 1},
    "seed": 11,
}


# -- construct -------------------------------------------------------------


def test_construct_writes_params_and_codewords(tmp_path, capsys):
    code = run(["construct", "--outdir", str(tmp_path),
                "--set", "n=500", "--set", "a=0.02",
                "--set", "export_codewords=3"])
    assert code == 0
    params = json.loads((tmp_path / "params.json").read_text())
    assert params["schema"] == 1
    assert params["q1"] == 4
    assert (tmp_path / "resolved_config.json").exists()
    rows = (tmp_path / "codewords.csv").read_text().strip().splitlines()
    assert len(rows) == 3
    assert rows[0].split(",")[0] == "0"
    assert len(rows[0].split(",")) == 1 + 500
    out = capsys.readouterr().out
    assert "q1=4" in out and "rate=" in out


def test_construct_infeasible_exits_2(tmp_path, capsys):
    code = run(["construct", "--outdir", str(tmp_path),
                "--set", "n=20", "--set", "a=0.015"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_construct_missing_required_key_exits_2(tmp_path, capsys):
    assert run(["construct", "--outdir", str(tmp_path), "--set", "a=0.02"]) == 2
    assert "error:" in capsys.readouterr().err


# -- simulate --------------------------------------------------------------


def test_simulate_smoke_and_determinism(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(SIM_CONFIG))
    outs = []
    for name in ("a", "b"):
        outdir = tmp_path / name
        code = run(["simulate", "--config", str(cfg_path),
                    "--outdir", str(outdir), "--format", "csv"])
        assert code == 0
        outs.append(outdir)
    reports = [json.loads((d / "report.json").read_text()) for d in outs]
    # wall clock lives in meta; the results block must agree exactly
    assert reports[0]["results"] == reports[1]["results"]
    assert reports[0]["meta"] != {} and "wall_clock_s" in reports[0]["meta"]
    for d in outs:
        assert (d / "identities.csv").read_text().startswith("slot,identity")
        assert (d / "pairs.csv").exists()
        assert (d / "resolved_config.json").exists()
    # CSV tables match across runs too
    assert (outs[0] / "pairs.csv").read_text() == (outs[1] / "pairs.csv").read_text()


def test_simulate_draws_and_reports_a_seed(tmp_path, capsys):
    cfg = {k: v for k, v in SIM_CONFIG.items() if k != "seed"}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    code = run(["simulate", "--config", str(cfg_path), "--outdir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "seed:" in out and "--seed" in out
    resolved = json.loads((tmp_path / "resolved_config.json").read_text())
    assert isinstance(resolved["seed"], int)


def test_simulate_seed_flag_beats_config(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(SIM_CONFIG))
    code = run(["simulate", "--config", str(cfg_path), "--seed", "99",
                "--outdir", str(tmp_path)])
    assert code == 0
    resolved = json.loads((tmp_path / "resolved_config.json").read_text())
    assert resolved["seed"] == 99


def test_simulate_rejects_unknown_keys(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({**SIM_CONFIG, "typo_knob": 1}))
    assert run(["simulate", "--config", str(cfg_path), "--outdir", str(tmp_path)]) == 2
    assert "typo_knob" in capsys.readouterr().err


def test_simulate_incompatible_verifier_exits_2(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(SIM_CONFIG))
    code = run(["simulate", "--config", str(cfg_path), "--outdir", str(tmp_path),
                "--set", "verifier.mode=csi-slow"])
    assert code == 2
    assert "slow-fading" in capsys.readouterr().err


def test_set_overrides_config_file(tmp_path):
    # the config file asks for an infeasible build; --set rescues it
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"n": 20, "a": 0.015}))
    code = run(["construct", "--config", str(cfg_path), "--outdir", str(tmp_path),
                "--set", "n=500", "--set", "a=0.02"])
    assert code == 0


def test_malformed_set_and_config_exit_2(tmp_path, capsys):
    assert run(["construct", "--outdir", str(tmp_path), "--set", "n500"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["construct", "--config", str(bad), "--outdir", str(tmp_path)]) == 2
    assert run(["construct", "--config", str(tmp_path / "absent.json"),
                "--outdir", str(tmp_path)]) == 2
    capsys.readouterr()


# -- bounds ----------------------------------------------------------------


def test_bounds_report_and_csv(tmp_path):
    code = run(["bounds", "--outdir", str(tmp_path), "--format", "csv",
                "--set", "n=1024", "--set", "log2_size=512",
                "--set", "power_bound=1.0", "--set", "d_min=4.0",
                "--set", 'fading={"type": "rayleigh", "scale": 1.0}',
                "--set", "snr=10.0", "--set", "outage_eps=0.1"])
    assert code == 0
    payload = json.loads((tmp_path / "bounds.json").read_text())
    assert payload["rate"] == pytest.approx(512 / (1024 * 10))
    assert payload["upper_bound"] == pytest.approx(0.40874628, abs=1e-6)
    assert payload["outage_capacity"] < payload["ergodic_capacity"]
    lines = (tmp_path / "bounds.csv").read_text().strip().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("n,log2_size,rate")


def test_bounds_derives_distance_from_error_budgets(tmp_path):
    code = run(["bounds", "--outdir", str(tmp_path),
                "--set", "n=1024", "--set", "log2_size=512",
                "--set", "sigma2=1.0",
                "--set", "lambda1=0.025", "--set", "lambda2=0.025"])
    assert code == 0
    payload = json.loads((tmp_path / "bounds.json").read_text())
    # 2 * sigma * z_{0.95}
    assert payload["d_min"] == pytest.approx(2 * 1.6448536269514722, rel=1e-9)
    assert payload["d_min"] == payload["d_min_from_error_budgets"]


# -- moments ---------------------------------------------------------------


def test_moments_green_run(tmp_path, capsys):
    code = run(["moments", "--outdir", str(tmp_path), "--seed", "3",
                "--set", 'distributions=[{"type": "constant", "value": 1.0}]',
                "--set", "n=16", "--set", "draws=30000",
                "--set", "pair_count=1"])
    assert code == 0
    payload = json.loads((tmp_path / "moments.json").read_text())
    assert payload["failures"] == 0
    assert len(payload["rows"]) == 8
    assert "checked 8 moments, 0 outside" in capsys.readouterr().out


def test_moments_failure_exits_3(tmp_path, capsys):
    # an absurd tolerance turns ordinary Monte Carlo scatter into failures
    code = run(["moments", "--outdir", str(tmp_path), "--seed", "3",
                "--set", 'distributions=[{"type": "constant", "value": 1.0}]',
                "--set", "n=16", "--set", "draws=5000",
                "--set", "pair_count=1", "--set", "tolerance_sigmas=0.001"])
    assert code == 3
    captured = capsys.readouterr()
    assert "validation failed" in captured.err
    assert "FAIL" in captured.err
    # the report is still written for post-mortems
    assert json.loads((tmp_path / "moments.json").read_text())["failures"] > 0


def test_moments_without_distributions_exits_2(tmp_path, capsys):
    assert run(["moments", "--outdir", str(tmp_path), "--seed", "1"]) == 2
    assert "distributions" in capsys.readouterr().err


# -- packing ---------------------------------------------------------------


def test_packing_smoke_with_projection(tmp_path, capsys):
    code = run(["packing", "--outdir", str(tmp_path), "--seed", "2",
                "--set", "spec.n=32", "--set", "spec.target_size=20",
                "--set", "spec.power_bound=4.0", "--set", "spec.sampling_power=2.0",
                "--set", "spec.distance_exponent=0.05",
                "--set", "check_projection=true",
                "--set", "projection.mu=0.8", "--set", "projection.mode=sampled",
                "--set", "projection.sample_count=50"])
    assert code == 0
    payload = json.loads((tmp_path / "report.json").read_text())
    assert payload["survivors"] > 0
    assert payload["projection"]["passed"] is True
    assert payload["projection"]["certified"] is False  # sampled mode never certifies
    vectors = (tmp_path / "vectors.csv").read_text().strip().splitlines()
    assert len(vectors) == payload["survivors"]
    sidecar = json.loads((tmp_path / "vectors.csv.spec.json").read_text())
    assert sidecar["profile"] == "basic"
    assert sidecar["seed"] == 2
    assert "kept" in capsys.readouterr().out


def test_packing_infeasible_exits_2(tmp_path, capsys):
    code = run(["packing", "--outdir", str(tmp_path), "--seed", "2",
                "--set", "spec.n=16", "--set", "spec.target_size=40",
                "--set", "spec.power_bound=0.01", "--set", "spec.sampling_power=0.005",
                "--set", "spec.distance_exponent=0.24"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


# -- help/docs sync --------------------------------------------------------


@pytest.mark.parametrize("command,keys", [
    ("construct", CONSTRUCT_KEYS),
    ("simulate", CONFIG_KEYS),
    ("bounds", BOUNDS_KEYS),
    ("moments", MOMENTS_KEYS),
    ("packing", PACKING_KEYS),
])
def test_help_lists_every_config_key(command, keys, capsys):
    with pytest.raises(SystemExit) as exc:
        main([command, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert "config keys" in text
    for key in keys:
        assert key in text, f"{command} --help is missing {key}"
    for flag in ("--config", "--set", "--seed", "--outdir", "--format"):
        assert flag in text
