"""Command-line entry point.

Subcommands:
  simulate   emit a synthetic peloton position trace CSV
  matrix     experiment 1: random-matrix aggregation at the sink
  routing    experiment 2: multi-round broadcast/aggregate routing
  dct-demo   lost-data demonstration (zero-filling vs column removal)
  stress     compare two velocity CSVs

Exit codes: 0 success, 2 configuration error, 3 runtime numerical error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import experiments
from .config import apply_setting, load_config
from .errors import ConfigError, CsaggError, NumericalError, TraceFormatError
from .metrics import stress
from .mobility import read_velocity_csv, simulate_race, write_trace_csv

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="key=value config file")
    parser.add_argument(
        "--set",
        metavar="K=V",
        action="append",
        default=[],
        dest="overrides",
        help="override one config key (repeatable)",
    )
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--seed", type=int, metavar="N", help="random seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csagg",
        description="Compressive data aggregation experiments for peloton sensing",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "emit a synthetic position trace CSV"),
        ("matrix", "run the random-matrix aggregation experiment"),
        ("routing", "run the multi-round routing experiment"),
        ("dct-demo", "run the lost-data DCT demonstration"),
    ]:
        _add_common(sub.add_parser(name, help=help_text))
    cmp_parser = sub.add_parser("stress", help="compare two velocity CSVs")
    cmp_parser.add_argument("truth_csv")
    cmp_parser.add_argument("estimate_csv")
    return parser


def _resolve_config(args: argparse.Namespace, scenario: str):
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.out is not None:
        overrides.append(f"out={args.out}")
    cfg = load_config(args.config, overrides)
    if scenario != cfg.scenario:
        cfg = apply_setting(cfg, "scenario", scenario)
    cfg.validate()
    return cfg


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args, "simulate")
    trace = simulate_race(cfg.peloton)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "trace.csv")
    with open(path, "w", encoding="utf-8") as out:
        write_trace_csv(trace, out)
    print(f"wrote {path} ({trace.n} riders, {len(trace.frames)} frames)")
    return 0


def _cmd_experiment(args: argparse.Namespace, scenario: str) -> int:
    cfg = _resolve_config(args, scenario)
    if scenario == "matrix":
        result = experiments.run_matrix(cfg)
    elif scenario == "routing":
        result = experiments.run_routing(cfg)
    else:
        demo = experiments.run_dct_demo(cfg)
        print(
            f"wrote {demo.report_path}: zero_fill stress {demo.stress_zero_fill:.6g}, "
            f"column_removal stress {demo.stress_column_removal:.6g}"
        )
        return 0
    s = result.summary
    print(
        f"wrote {result.report_path}: mean stress {s.mean_stress:.6g}, "
        f"max {s.max_stress:.6g} at t={s.argmax_time:.0f}s, "
        f"determined fraction {s.determined_fraction:.3g}"
    )
    return 0


def _cmd_stress(args: argparse.Namespace) -> int:
    truth = read_velocity_csv(args.truth_csv)
    estimate = read_velocity_csv(args.estimate_csv)
    est_by_time = {f.time: f for f in estimate}
    common = [f for f in truth if f.time in est_by_time]
    if not common:
        raise ConfigError("the two velocity CSVs share no timestamps")
    print("time_s,stress")
    values = []
    for frame in common:
        s = stress(frame.x, est_by_time[frame.time].x)
        values.append(s)
        print(f"{frame.time:.3f},{s:.12g}")
    print(f"# mean_stress={np.mean(values):.12g}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command in ("matrix", "routing", "dct-demo"):
            return _cmd_experiment(args, args.command)
        return _cmd_stress(args)
    except (ConfigError, TraceFormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, CsaggError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
