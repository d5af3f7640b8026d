import json
import math

import pytest

from toomsim.experiments import (
    EstimateReport,
    ExperimentConfig,
    batch_stats,
    calibrate_front_speed,
    exp_correlation,
    exp_current,
    exp_front_speed,
    exp_mixing,
    exp_profile,
    exp_stationarity,
    flux_variance_ratio,
    required_buffer,
    write_result,
)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("nonsense").validate()
    with pytest.raises(ValueError):
        ExperimentConfig("mixing").validate()  # missing n_sites
    with pytest.raises(ValueError):
        ExperimentConfig("current", lambda_plus=1.5).validate()
    with pytest.raises(ValueError):
        ExperimentConfig("current", horizon=-1.0).validate()
    with pytest.raises(ValueError):
        ExperimentConfig("current", replications=0).validate()
    cfg = ExperimentConfig("current", lambda_plus=0.8)
    assert cfg.density() == pytest.approx(1 / 3)
    assert ExperimentConfig("current", p=0.25).density() == 0.25


def test_report_serialization_and_verdict():
    rep = EstimateReport("x", 1.01, 0.01, 30, analytic=1.0)
    assert rep.verdict == "consistent"
    assert EstimateReport("x", 2.0, 0.01, 30, analytic=1.0).verdict == "deviates"
    back = EstimateReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back == rep


def test_batch_stats():
    est, se = batch_stats([1.0, 2.0, 3.0])
    assert est == 2.0 and se == pytest.approx(1.0 / math.sqrt(3))
    assert math.isnan(batch_stats([1.0])[1])


def test_mixing_small_chain():
    cfg = ExperimentConfig("mixing", lambda_plus=0.7, n_sites=5, replications=60, seed=3)
    res = exp_mixing(cfg)
    assert res.report("coupled_by_sweep_fraction").estimate == 1.0
    sweep = res.report("mean_sweep_time")
    assert abs(sweep.estimate - 5.0) < 3 * math.sqrt(5.0 / 60)
    assert res.report("exact_tau_mix").estimate <= 10.0
    rows = res.tables["coupling"][1]
    assert all(tau_c <= tau_n for _, tau_c, tau_n, _ in rows)


def test_front_speed_identical_cutoffs_agree():
    cfg = ExperimentConfig(
        "front", lambda_plus=0.7, p=0.5, window=32, horizon=20.0,
        replications=3, seed=5, extras={"cutoff_near": 16, "cutoff_far": 16},
    )
    res = exp_front_speed(cfg)
    assert res.report("agreement_probability").estimate == 1.0
    assert res.report("front_speed_max").estimate == 0.0


def test_front_speed_monotone_in_cutoff():
    # common random numbers: deeper near-cutoff postpones the breach
    base = dict(lambda_plus=0.8, p=0.5, window=48, horizon=30.0, replications=6, seed=9)
    breach = {}
    for near in (8, 32):
        cfg = ExperimentConfig(
            "front", extras={"cutoff_near": near, "cutoff_far": 160}, **base
        )
        res = exp_front_speed(cfg)
        breach[near] = [t for _, t in res.tables["breach"][1]]
    for t_shallow, t_deep in zip(breach[8], breach[32]):
        assert t_deep >= t_shallow
    assert exp_front_speed(
        ExperimentConfig("front", extras={"cutoff_near": 8, "cutoff_far": 160}, **base)
    ).notes["front_speed"] > 0


def test_required_buffer_scaling():
    assert required_buffer(2.0, 100.0) == 360
    assert required_buffer(4.0, 100.0) > required_buffer(2.0, 100.0)


def test_current_flags_insufficient_buffer():
    cfg = ExperimentConfig(
        "current", lambda_plus=0.8, p=0.5, window=32, buffer=10, horizon=50.0,
        seed=1, extras={"front_speed": 4.0},
    )
    res = exp_current(cfg)
    assert res.n_invalid == 1
    assert res.reports == []
    assert "buffer" in res.notes["invalid_reason"]


def test_current_matches_analytic_rates():
    cfg = ExperimentConfig(
        "current", lambda_plus=0.8, p=0.5, window=64, buffer=2500, horizon=400.0,
        seed=7, extras={"front_speed": 4.3},
    )
    res = exp_current(cfg)
    assert res.n_invalid == 0
    assert res.report("plus_current").verdict == "consistent"
    assert res.report("minus_current").verdict == "consistent"
    assert res.report("net_flux_rate").verdict == "consistent"


def test_current_csv_bodies_are_deterministic(tmp_path):
    cfg = ExperimentConfig(
        "current", lambda_plus=0.8, p=0.5, window=32, buffer=600, horizon=60.0,
        seed=11, extras={"front_speed": 4.0},
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    write_result(exp_current(cfg), out1)
    cfg2 = ExperimentConfig(
        "current", lambda_plus=0.8, p=0.5, window=32, buffer=600, horizon=60.0,
        seed=11, extras={"front_speed": 4.0},
    )
    write_result(exp_current(cfg2), out2)
    assert (out1 / "current_batches.csv").read_text() == (
        out2 / "current_batches.csv"
    ).read_text()
    manifest = json.loads((out1 / "current_manifest.json").read_text())
    assert manifest["seed"] == 11
    assert manifest["config"]["lambda_plus"] == 0.8
    assert "wall_time_s" in manifest
    header = (out1 / "current_batches.csv").read_text().splitlines()
    assert header[0].startswith("#") and any("config=" in h for h in header[:4])


def test_profile_requires_burn_in():
    cfg = ExperimentConfig("profile", lambda_plus=0.8, window=64, burn_in=10.0,
                           horizon=64.0, seed=1)
    with pytest.raises(ValueError):
        exp_profile(cfg)


def test_profile_bulk_density_small():
    cfg = ExperimentConfig(
        "profile", lambda_plus=0.5, window=96, burn_in=192.0, horizon=400.0,
        seed=13, extras={"snapshot_dt": 2.0},
    )
    res = exp_profile(cfg)
    bulk = res.report("bulk_density")
    assert bulk.analytic == 0.0
    assert bulk.verdict == "consistent"
    cols, rows = res.tables["height_variance"]
    variances = [v for _, v, _ in rows]
    assert all(v > 0 for v in variances)


def test_correlation_normalization_and_positive_rate():
    cfg = ExperimentConfig(
        "correlation", lambda_plus=0.5, p=0.5, window=32, replications=1200,
        seed=17, extras={"t_grid": [0.5, 1.0, 2.0]},
    )
    res = exp_correlation(cfg)
    norm = res.report("normalization_at_zero")
    assert norm.estimate == pytest.approx(1.0, abs=1e-12)  # p=1/2: f^2 == 1
    rate = res.report("decay_rate")
    assert rate.estimate > 0
    curve = res.tables["autocorrelation"][1]
    assert curve[0][1] == pytest.approx(1.0)
    assert curve[1][1] > curve[-1][1]


def test_flux_variance_ratio_diffusive():
    ratio, info = flux_variance_ratio(
        0.8, None, (5.0, 20.0), reps=150, seed=19, front_speed=4.0, window=48
    )
    assert 1 / 3 < ratio < 3
    assert info["var_rate_t1"] > 0


def test_stationarity_product_measure_preserved():
    cfg = ExperimentConfig(
        "stationarity", lambda_plus=0.7, p=0.5, window=16, replications=1200,
        seed=23, extras={"t_checks": [1.0, 5.0], "front_speed": 4.5},
    )
    res = exp_stationarity(cfg)
    assert res.report("worst_site_mean_zscore").verdict == "consistent"
    assert res.report("worst_pair_zscore").verdict == "consistent"


def test_calibrate_front_speed_positive():
    v = calibrate_front_speed(0.8, 0.5, seed=29, horizon=60.0, replications=2)
    assert 0.5 < v < 8.0
