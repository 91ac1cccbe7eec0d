"""Command line entry point.

    rnflow run config.json [--dump-config]
    rnflow sweep config.json --axis p --values 0.5,0.75,1,2
    rnflow check config.json

Exit codes: 0 success, 1 hypothesis check failed, 2 configuration error,
3 numerical abort.  ``RNFLOW_OUT`` overrides the configured output directory.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig, load_config
from .diagnostics import convergence_report, hypothesis_flags
from .dynamics import NumericalAbort, integrate

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

SWEEP_COLUMNS = ["value", "dist_to_target", "phi_gap", "v_norm_final", "slow", "in_L2"]


def _fail(code, msg):
    print(f"rnflow: {msg}", file=sys.stderr)
    return code


def _output_dir(cfg: ExperimentConfig) -> Path:
    return Path(os.environ.get("RNFLOW_OUT") or cfg.output_dir)


def run_experiment(cfg: ExperimentConfig, out_dir: Path):
    """Integrate one config and write ``trajectory.csv`` and ``report.json``."""
    spec = cfg.to_spec()
    traj = integrate(spec)
    report = convergence_report(traj, spec.f, spec.mu, spec.schedule)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out_dir / "trajectory.csv")
    (out_dir / "report.json").write_text(report.to_json() + "\n")
    return report


def cmd_run(config_path, dump_config: bool = False) -> int:
    try:
        cfg = load_config(config_path)
        if dump_config:
            print(json.dumps(cfg.to_json(), indent=2))
            return EXIT_OK
        out = _output_dir(cfg)
        report = run_experiment(cfg, out)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"config error: {exc}")
    except NumericalAbort as exc:
        return _fail(EXIT_NUMERIC, f"numerical abort: {exc}")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'report.json'} "
          f"(dist_to_target={report.dist_to_target:.3e})")
    return EXIT_OK


def _fmt(value: float) -> str:
    return format(value, "g")


def cmd_sweep(config_path, axis: str, values, workers: int | None = None) -> int:
    try:
        cfg = load_config(config_path)
        if not values:
            raise ConfigError("--values must not be empty")
        cells = [cfg.with_value(axis, float(v)) for v in values]
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"config error: {exc}")
    root = _output_dir(cfg)
    root.mkdir(parents=True, exist_ok=True)

    def work(item):
        value, cell = item
        try:
            return EXIT_OK, run_experiment(cell, root / f"{axis}={_fmt(value)}"), ""
        except ConfigError as exc:
            return EXIT_CONFIG, None, f"config error: {exc}"
        except NumericalAbort as exc:
            return EXIT_NUMERIC, None, f"numerical abort: {exc}"

    with ThreadPoolExecutor(max_workers=workers or min(len(cells), os.cpu_count() or 1)) as pool:
        results = list(pool.map(work, zip(map(float, values), cells)))

    status = EXIT_OK
    with open(root / "sweep_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for value, (code, report, msg) in zip(values, results):
            if report is None:
                _fail(code, f"{axis}={_fmt(float(value))}: {msg}")
                status = status or code
                writer.writerow([_fmt(float(value)), "", "", "", "", ""])
                continue
            flags = report.hypothesis_flags
            writer.writerow([_fmt(float(value)), repr(report.dist_to_target), repr(report.phi_gap),
                             repr(report.v_norm_final), flags["slow"], flags["in_L2"]])
    print(f"wrote {root / 'sweep_summary.csv'} ({len(values)} cells)")
    return status


def hypothesis_report(cfg: ExperimentConfig) -> dict:
    spec = cfg.to_spec()
    flags = hypothesis_flags(spec.f, spec.schedule)
    flags["phi0_finite"] = bool(math.isfinite(float(spec.f.value(np.zeros(spec.f.dim)))))
    return flags


def hypotheses_hold(flags: dict) -> bool:
    """The checkable hypotheses of the selection theorem.

    The quadratic-growth test for (H1) is skipped when no estimate of ``r``
    could be made (dimension above 3 or no closed-form argmin).
    """
    r = flags["h1_model_r"]
    h1 = True if r is None else (flags["in_L2"] and (r == "inf" or r > 0))
    return bool(flags["slow"] and flags["h2_k"] is not None and flags["phi0_finite"] and h1)


def cmd_check(config_path) -> int:
    try:
        flags = hypothesis_report(load_config(config_path))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"config error: {exc}")
    print(json.dumps(flags))
    return EXIT_OK if hypotheses_hold(flags) else EXIT_CHECK_FAILED


def _values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="rnflow", description="Tikhonov-regularized Newton flow experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="integrate one configuration")
    p_run.add_argument("config")
    p_run.add_argument("--dump-config", action="store_true", help="print the normalized config and exit")
    p_sweep = sub.add_parser("sweep", help="run one configuration per parameter value")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--axis", choices=["p", "c", "mu"], required=True)
    p_sweep.add_argument("--values", type=_values, required=True)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_check = sub.add_parser("check", help="report the checkable theorem hypotheses")
    p_check.add_argument("config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.dump_config)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.axis, args.values, args.workers)
    return cmd_check(args.config)


if __name__ == "__main__":
    sys.exit(main())
