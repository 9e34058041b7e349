"""Experiment runner command line.

Exit codes: 0 success, 1 configuration error, 2 run failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, ScenarioConfig, load_config, set_option
from .simulation import run_scenario
from .sweep import expand_sweep, run_sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rismsim",
        description="MANET simulator: DSR with a reputation-based IDS vs. "
                    "defenseless DSR.",
    )
    parser.add_argument("--config", metavar="PATH",
                        help="scenario config file (key = value lines)")
    parser.add_argument("--set", metavar="KEY=VALUE", action="append",
                        default=[], dest="overrides",
                        help="override one config key (repeatable)")
    parser.add_argument("--sweep", metavar="KEY=V1,V2,...", action="append",
                        default=[], dest="sweeps",
                        help="sweep a config key over a value list (repeatable)")
    parser.add_argument("--seeds", type=int, default=1,
                        help="number of seeds per sweep point")
    parser.add_argument("--master-seed", type=int, default=1)
    parser.add_argument("--out", metavar="PATH", default="results.csv",
                        help="CSV output path ('-' for stdout)")
    parser.add_argument("--trace", metavar="PATH",
                        help="write the structured event trace "
                             "(single-run only)")
    parser.add_argument("--dump-scenario", metavar="PATH",
                        help="write waypoint and connection schedules "
                             "(single-run only)")
    parser.add_argument("--jobs", type=int, default=0,
                        help="parallel worker processes (0 = all cores)")
    parser.add_argument("--quiet", action="store_true")
    return parser


def _parse_sweep_arg(arg: str) -> tuple[str, list[str]]:
    if "=" not in arg:
        raise ConfigError(f"bad --sweep argument {arg!r}")
    key, values = arg.split("=", 1)
    values = [v.strip() for v in values.split(",") if v.strip()]
    if not values:
        raise ConfigError(f"--sweep {key}: empty value list")
    return key.strip(), values


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        for override in args.overrides:
            if "=" not in override:
                raise ConfigError(f"bad --set argument {override!r}")
            key, value = override.split("=", 1)
            set_option(cfg, key, value)
        cfg.validate()
        axes = [_parse_sweep_arg(arg) for arg in args.sweeps]
        specs = expand_sweep(cfg, axes, args.master_seed, args.seeds)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    single = len(specs) == 1
    if (args.trace or args.dump_scenario) and not single:
        print("config error: --trace/--dump-scenario require a single run",
              file=sys.stderr)
        return 1

    jobs = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    try:
        if single and (args.trace or args.dump_scenario):
            spec = specs[0]
            result = run_scenario(spec.cfg, spec.seed,
                                  trace=bool(args.trace))
            if args.trace:
                result.trace.write(args.trace)
            if args.dump_scenario:
                with open(args.dump_scenario, "w") as fh:
                    for line in result.waypoint_lines:
                        fh.write("waypoint " + line + "\n")
                    for line in result.connection_lines:
                        fh.write("connection " + line + "\n")
            from .metrics import CSV_HEADER
            lines = [CSV_HEADER,
                     result.report.csv_row(spec.run_id, spec.seed, spec.cfg)]
        else:
            lines = run_sweep(specs, jobs=jobs)
    except Exception as exc:  # a panicking run aborts the sweep
        print(f"run failure: {exc}", file=sys.stderr)
        return 2

    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
        if not args.quiet:
            print(f"wrote {len(specs)} run(s) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
