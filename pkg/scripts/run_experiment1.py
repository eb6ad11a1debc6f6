#!/usr/bin/env python3
"""Experiment 1: reconstruction quality vs. number of random measurements.

Runs the random-matrix aggregation scenario over a synthetic peloton for a
sweep of k values and prints the mean/max stress per k, mirroring the
stress-vs-measurements comparison. Writes one report CSV per k under --out.
"""

from __future__ import annotations

import argparse

from csagg.config import ExperimentConfig
from csagg.experiments import run_matrix
from csagg.mobility import PelotonParams


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--riders", type=int, default=130)
    parser.add_argument("--steps", type=int, default=200, help="0 = full race")
    parser.add_argument("--k", type=int, nargs="+", default=[20, 60, 90])
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", default="results/experiment1")
    args = parser.parse_args()

    print("k,mean_stress,max_stress,report")
    for k in args.k:
        cfg = ExperimentConfig(
            scenario="matrix",
            peloton=PelotonParams(n=args.riders, seed=args.seed),
            k_measurements=k,
            steps=args.steps,
            seed=args.seed,
            out_dir=args.out,
        )
        result = run_matrix(cfg, report_name=f"report_matrix_k{k}.csv")
        s = result.summary
        print(f"{k},{s.mean_stress:.6g},{s.max_stress:.6g},{result.report_path}")


if __name__ == "__main__":
    main()
