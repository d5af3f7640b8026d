#!/usr/bin/env python3
"""Run the full experiment battery at production scale into an output
directory. Expect roughly ten minutes on one core."""

import argparse
import sys

from toomsim.experiments import (
    RUNNERS,
    ExperimentConfig,
    calibrate_front_speed,
    required_buffer,
    write_result,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out", help="output directory root")
    ap.add_argument("--seed", type=int, default=20240801)
    ap.add_argument("--horizon", type=float, default=10_000.0,
                    help="current-measurement horizon")
    args = ap.parse_args()

    lam = 0.8
    v_star = calibrate_front_speed(lam, None, seed=args.seed)
    v_half = calibrate_front_speed(lam, 0.5, seed=args.seed)
    print(f"front speeds: p*={v_star:.2f}, p=0.5 {v_half:.2f}")

    configs = [
        ExperimentConfig("mixing", lambda_plus=0.7, n_sites=8,
                         replications=500, seed=args.seed),
        ExperimentConfig("mixing", lambda_plus=0.7, n_sites=128,
                         replications=500, seed=args.seed + 1),
        ExperimentConfig("front", lambda_plus=lam, p=0.5, window=256,
                         horizon=100.0, replications=8, seed=args.seed,
                         extras={"cutoff_near": 64, "cutoff_far": 512}),
        ExperimentConfig("current", lambda_plus=lam, p=None, window=128,
                         buffer=required_buffer(v_star, args.horizon),
                         horizon=args.horizon, seed=args.seed,
                         extras={"front_speed": v_star}),
        ExperimentConfig("current", lambda_plus=lam, p=0.5, window=128,
                         buffer=required_buffer(v_half, args.horizon),
                         horizon=args.horizon, seed=args.seed,
                         extras={"front_speed": v_half}),
        ExperimentConfig("profile", lambda_plus=lam, window=2000,
                         burn_in=4000.0, horizon=1000.0, replications=24,
                         seed=args.seed, extras={"snapshot_dt": 2.0}),
        ExperimentConfig("profile", lambda_plus=0.5, window=2000,
                         burn_in=4000.0, horizon=1000.0, replications=24,
                         seed=args.seed, extras={"snapshot_dt": 2.0}),
        ExperimentConfig("correlation", lambda_plus=0.5, p=0.5, window=32,
                         replications=4000, seed=args.seed,
                         extras={"t_grid": [0.5, 1.0, 2.0, 3.0, 4.0]}),
        ExperimentConfig("stationarity", lambda_plus=0.7, p=0.5, window=24,
                         replications=2000, seed=args.seed,
                         extras={"t_checks": [1.0, 5.0, 25.0],
                                 "front_speed": v_half}),
    ]
    for i, cfg in enumerate(configs):
        result = RUNNERS[cfg.name](cfg)
        out = f"{args.out}/{cfg.name}_{i}"
        write_result(result, out)
        line = ", ".join(
            f"{r.name}={r.estimate:.4g}+-{r.se:.2g}" for r in result.reports[:3]
        )
        print(f"{cfg.name} -> {out}: {line}"
              f"{' INVALID' if result.n_invalid else ''}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
