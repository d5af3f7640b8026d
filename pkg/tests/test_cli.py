import json

from toomsim.cli import main


def test_genexp_runs(capsys):
    assert main(["genexp", "--sites", "0,1", "--p", "0.4", "--lambda-plus", "0.6"]) == 0
    out = capsys.readouterr().out
    assert "e" in out and "[0, 1]" in out


def test_exact_writes_tables(tmp_path, capsys):
    out = tmp_path / "exact"
    assert main(["exact", "--n-sites", "4", "--lambda-plus", "0.7", "--out", str(out)]) == 0
    pi_lines = (out / "stationary_N4.csv").read_text().splitlines()
    assert pi_lines[2] == "state,probability"
    assert len(pi_lines) == 3 + 16
    assert "little-endian" in pi_lines[1]
    tv_lines = (out / "tv_curve_N4.csv").read_text().splitlines()
    assert tv_lines[1] == "t,worst_case_tv"
    assert "tau_mix" in tv_lines[0]


def test_experiment_subcommand_with_config(tmp_path, capsys):
    cfg = {
        "name": "front",
        "lambda_plus": 0.7,
        "p": 0.5,
        "window": 24,
        "horizon": 10.0,
        "replications": 2,
        "seed": 4,
        "extras": {"cutoff_near": 12, "cutoff_far": 40},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "res"
    assert main(["front", "--config", str(path), "--seed", "0x9", "--out", str(out)]) == 0
    manifest = json.loads((out / "front_manifest.json").read_text())
    assert manifest["seed"] == 9
    assert (out / "front_trace.csv").exists()
    printed = capsys.readouterr().out
    assert "front_speed_max" in printed


def test_invalid_current_returns_nonzero(capsys):
    import toomsim.cli as cli

    old = cli._DEFAULTS["current"]
    cli._DEFAULTS["current"] = {
        "lambda_plus": 0.8, "p": 0.5, "horizon": 100.0, "buffer": 5,
        "window": 16, "extras": {"front_speed": 4.0},
    }
    try:
        assert main(["current"]) == 1
    finally:
        cli._DEFAULTS["current"] = old
