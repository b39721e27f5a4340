"""Command-line entry points.

Subcommands: ``threshold`` (print the optimal occupancy), ``sweep``
(Monte-Carlo policy comparison over an arrival-rate grid), ``dp-verify``
(check the threshold rule against the backward-induction solver) and
``ingest`` (convert hourly traffic counts to per-step rates).

Exit codes: 0 success, 1 domain error (bad values, files, or a verify
mismatch), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .arrival import ArrivalDistribution, from_pmf, poisson_truncated
from .dp import DpConfig, compare_with_threshold, solve, suggest_max_count, write_action_table
from .ingest import parse_counts_csv, parse_pmf_csv, to_lambda
from .policies import POLICY_NAMES
from .sim import SweepRow, sweep
from .stopping import RewardParams, compute_threshold

SWEEP_COLUMNS = (
    "lambda,policy,n_star,mean_utility,ci_utility,mean_platoon_len,"
    "ci_platoon_len,mean_wait_steps,ci_wait_steps,vehicles,platoons"
)


def _fmt(value: float) -> str:
    return repr(float(value))


def _n_star_text(n_star: int | None) -> str:
    return "never" if n_star is None else str(n_star)


def _write_manifest(out_path: str, subcommand: str, parameters: dict) -> None:
    manifest = {
        "tool": "hubrelease",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "output": out_path,
    }
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _distribution(args: argparse.Namespace) -> ArrivalDistribution:
    if args.pmf_file is not None:
        return from_pmf(parse_pmf_csv(args.pmf_file))
    return poisson_truncated(args.lam)


def _add_distribution_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--lambda", dest="lam", type=float, help="per-step Poisson arrival rate"
    )
    group.add_argument(
        "--pmf-file",
        help="count,probability CSV giving the arrival pmf explicitly",
    )


def cmd_threshold(args: argparse.Namespace) -> int:
    threshold = compute_threshold(_distribution(args), args.ratio)
    print(f"n_star,{_n_star_text(threshold.n_star)}")
    return 0


def cmd_dp_verify(args: argparse.Namespace) -> int:
    dist = _distribution(args)
    params = RewardParams(benefit=1.0, step_cost=args.ratio)
    max_count = args.max_count
    if max_count is None:
        max_count = suggest_max_count(dist, args.horizon)
    config = DpConfig(args.horizon, max_count, dist, params)
    solution = solve(config)
    threshold = compute_threshold(dist, args.ratio)
    mismatches = compare_with_threshold(solution, threshold)
    if args.dump_actions is not None:
        write_action_table(solution, args.dump_actions)
        _write_manifest(
            args.dump_actions,
            "dp-verify",
            {
                "lambda": args.lam,
                "pmf_file": args.pmf_file,
                "ratio": args.ratio,
                "horizon": args.horizon,
                "max_count": max_count,
            },
        )
    if not mismatches:
        print(f"MATCH n_star={_n_star_text(threshold.n_star)} "
              f"states={args.horizon}x{max_count}")
        return 0
    for k, n in mismatches[:50]:
        rule = threshold.n_star is not None and n >= threshold.n_star
        dp_action = "release" if not rule else "wait"
        print(f"MISMATCH k={k} n={n} dp={dp_action} rule={'release' if rule else 'wait'}")
    print(f"{len(mismatches)} mismatched states")
    return 1


def write_sweep_csv(rows: Sequence[SweepRow], path: str) -> None:
    lines = [SWEEP_COLUMNS]
    for row in rows:
        m = row.metrics
        lines.append(
            ",".join(
                [
                    _fmt(row.lam),
                    row.policy,
                    _n_star_text(row.n_star),
                    _fmt(m.mean_utility),
                    _fmt(m.ci_utility),
                    _fmt(m.mean_platoon_len),
                    _fmt(m.ci_platoon_len),
                    _fmt(m.mean_wait_steps),
                    _fmt(m.ci_wait_steps),
                    str(m.vehicles),
                    str(m.platoons),
                ]
            )
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.points < 1:
        raise ValueError(f"--points must be >= 1, got {args.points}")
    if args.lambda_min < 0 or args.lambda_max < args.lambda_min:
        raise ValueError("need 0 <= lambda-min <= lambda-max")
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    for name in policies:
        if name not in POLICY_NAMES:
            raise ValueError(
                f"unknown policy {name!r}; choose from {', '.join(POLICY_NAMES)}"
            )
    grid = [float(v) for v in np.linspace(args.lambda_min, args.lambda_max, args.points)]
    params = RewardParams(benefit=1.0, step_cost=args.ratio)
    rows = sweep(
        grid,
        policies,
        params=params,
        samples=args.samples,
        horizon_steps=args.horizon,
        master_seed=args.seed,
        step_seconds=args.step_seconds,
        initial_lam=args.initial_lam,
        include_forced_in_length=not args.exclude_forced_length,
        period_steps=args.period,
    )
    write_sweep_csv(rows, args.out)
    _write_manifest(
        args.out,
        "sweep",
        {
            "lambda_min": args.lambda_min,
            "lambda_max": args.lambda_max,
            "points": args.points,
            "ratio": args.ratio,
            "policies": policies,
            "samples": args.samples,
            "horizon": args.horizon,
            "seed": args.seed,
            "step_seconds": args.step_seconds,
            "initial_lambda": args.initial_lam,
            "exclude_forced_length": args.exclude_forced_length,
            "period": args.period,
        },
    )
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.report_episode_utility:
        print("lambda,policy,mean_episode_utility")
        for row in rows:
            print(f"{_fmt(row.lam)},{row.policy},{_fmt(row.metrics.mean_episode_utility)}")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    counts = parse_counts_csv(args.file)
    lines = ["hour,lambda"]
    for row in counts:
        lam = to_lambda(row, args.stop_fraction, args.step_seconds)
        lines.append(f"{row.hour_of_day},{_fmt(lam)}")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        _write_manifest(
            args.out,
            "ingest",
            {
                "file": args.file,
                "stop_fraction": args.stop_fraction,
                "step_seconds": args.step_seconds,
            },
        )
        print(f"wrote {len(counts)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hubrelease",
        description="Optimal release thresholds and policy simulation for platooning hubs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_threshold = sub.add_parser(
        "threshold", help="print the optimal release occupancy n_star"
    )
    _add_distribution_args(p_threshold)
    p_threshold.add_argument("--ratio", type=float, required=True,
                             help="cost-benefit ratio per step")
    p_threshold.set_defaults(func=cmd_threshold)

    p_verify = sub.add_parser(
        "dp-verify",
        help="check the threshold rule against the backward-induction solver",
    )
    _add_distribution_args(p_verify)
    p_verify.add_argument("--ratio", type=float, required=True)
    p_verify.add_argument("--horizon", type=int, default=720)
    p_verify.add_argument("--max-count", type=int, default=None,
                          help="occupancy cap (default: smallest safe cap)")
    p_verify.add_argument("--dump-actions", default=None,
                          help="write the k,n,action table to this CSV")
    p_verify.set_defaults(func=cmd_dp_verify)

    p_sweep = sub.add_parser(
        "sweep", help="Monte-Carlo policy comparison over an arrival-rate grid"
    )
    p_sweep.add_argument("--lambda-min", type=float, default=0.0)
    p_sweep.add_argument("--lambda-max", type=float, default=1.0 / 6.0)
    p_sweep.add_argument("--points", type=int, default=50)
    p_sweep.add_argument("--ratio", type=float, default=0.005)
    p_sweep.add_argument("--policies", default=",".join(POLICY_NAMES))
    p_sweep.add_argument("--period", type=int, default=60,
                         help="periodic-policy interval in steps")
    p_sweep.add_argument("--samples", type=int, default=1000)
    p_sweep.add_argument("--horizon", type=int, default=720)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--step-seconds", type=float, default=5.0)
    p_sweep.add_argument("--initial-lambda", dest="initial_lam", type=float,
                         default=None,
                         help="rate for the initial-count draw (default: the cell rate)")
    p_sweep.add_argument("--exclude-forced-length", action="store_true",
                         help="drop horizon-end forced releases from length stats")
    p_sweep.add_argument("--report-episode-utility", action="store_true",
                         help="also print episode-reward utility per cell")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.set_defaults(func=cmd_sweep)

    p_ingest = sub.add_parser(
        "ingest", help="convert hour,count traffic data to per-step rates"
    )
    p_ingest.add_argument("--file", required=True, help="hour,count CSV")
    p_ingest.add_argument("--stop-fraction", type=float, required=True,
                          help="fraction of counted vehicles that stop at the hub")
    p_ingest.add_argument("--step-seconds", type=float, default=5.0)
    p_ingest.add_argument("--out", default=None, help="output CSV (default: stdout)")
    p_ingest.set_defaults(func=cmd_ingest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
