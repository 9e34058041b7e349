"""Command line: render comparison charts from a sweep CSV.

Usage: rismsim-plots render --csv results.csv --metric pdr --out pdr.png
       [--per-pause] [--series-out pdr_series.csv]
"""

from __future__ import annotations

import argparse
import sys

from .aggregate import (METRICS, PlotDataError, aggregate, read_rows,
                        series_csv_lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rismsim-plots")
    sub = parser.add_subparsers(dest="command", required=True)
    render = sub.add_parser("render", help="render one metric chart")
    render.add_argument("--csv", required=True, help="sweep results CSV")
    render.add_argument("--metric", required=True, choices=METRICS)
    render.add_argument("--out", required=True, help="output image path")
    render.add_argument("--per-pause", action="store_true",
                        help="facet series by pause time instead of pooling")
    render.add_argument("--series-out", metavar="PATH",
                        help="also write the aggregated series as CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows = read_rows(args.csv)
        series = aggregate(rows, args.metric, per_pause=args.per_pause)
    except (OSError, PlotDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    from .render import render_chart
    render_chart(series, args.metric, args.out)
    if args.series_out:
        with open(args.series_out, "w") as fh:
            fh.write("\n".join(series_csv_lines(series, args.metric)) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
