"""RMSE of two-step GMM over the power grid as n grows; the ratio per tenfold n should be near sqrt(10)."""

import argparse
import math

from steingmm.simulation import DEFAULT_SEED, figure1_config, run_simulation


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--sizes", default="1000,10000")
    args = ap.parse_args()

    prev = None
    for n in [int(s) for s in args.sizes.split(",")]:
        cfg = figure1_config(args.seed, args.reps)
        cfg.n = n
        cfg.estimator_roster = ["gmm2step"]
        report = run_simulation(cfg, workers=args.workers)
        rmse = [math.sqrt(report.row("gmm2step", p).mse) for p in ("alpha", "beta")]
        line = f"n={n:<7d} rmse alpha {rmse[0]:.4f}  beta {rmse[1]:.4f}"
        if prev:
            line += f"  ratio {prev[0] / rmse[0]:.2f} / {prev[1] / rmse[1]:.2f}"
        print(line)
        prev = rmse


if __name__ == "__main__":
    main()
