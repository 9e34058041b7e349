"""CSV loading and pure aggregation into plottable series.

Aggregation pools all rows sharing (protocol, malicious percentage) —
i.e. seeds and pause times together — into a mean and standard error.
With per-pause faceting the grouping key gains the pause time.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

METRICS = ("pdr", "overhead_ratio", "overhead_ratio_with_ids")

REQUIRED_COLUMNS = ("protocol", "malicious_pct", "pause_time") + METRICS


class PlotDataError(Exception):
    """Malformed or unusable sweep CSV."""


@dataclass
class AggregatedSeries:
    protocol: str
    pause_time: float | None  # None when pooling across pause times
    x: list[float] = field(default_factory=list)       # malicious percentage
    y_mean: list[float] = field(default_factory=list)
    y_stderr: list[float] = field(default_factory=list)

    @property
    def label(self) -> str:
        if self.pause_time is None:
            return self.protocol
        return f"{self.protocol} (pause {self.pause_time:g}s)"


def read_rows(csv_path: str) -> list[dict[str, str]]:
    """Load the sweep CSV, skipping '#' comment lines; validates columns."""
    with open(csv_path) as fh:
        body = "".join(line for line in fh if not line.startswith("#"))
    reader = csv.DictReader(io.StringIO(body))
    if reader.fieldnames is None:
        raise PlotDataError(f"{csv_path}: empty CSV")
    missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise PlotDataError(f"{csv_path}: missing columns {missing}")
    rows = list(reader)
    if not rows:
        raise PlotDataError(f"{csv_path}: no data rows")
    return rows


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def aggregate(rows: list[dict[str, str]], metric: str,
              per_pause: bool = False) -> list[AggregatedSeries]:
    """Group rows into one series per protocol (and pause, if faceting)."""
    if metric not in METRICS:
        raise PlotDataError(
            f"unknown metric {metric!r}; expected one of {', '.join(METRICS)}")
    groups: dict[tuple, dict[float, list[float]]] = {}
    for i, row in enumerate(rows, start=1):
        try:
            pct = float(row["malicious_pct"])
            value = float(row[metric])
            pause = float(row["pause_time"])
        except (TypeError, ValueError) as exc:
            raise PlotDataError(f"row {i}: bad value ({exc})") from None
        key = (row["protocol"], pause if per_pause else None)
        groups.setdefault(key, {}).setdefault(pct, []).append(value)
    series = []
    for (protocol, pause), buckets in sorted(groups.items(),
                                             key=lambda kv: (kv[0][0],
                                                             kv[0][1] or 0.0)):
        s = AggregatedSeries(protocol=protocol, pause_time=pause)
        for pct in sorted(buckets):
            mean, stderr = _mean_stderr(buckets[pct])
            s.x.append(pct)
            s.y_mean.append(mean)
            s.y_stderr.append(stderr)
        series.append(s)
    return series


def series_csv_lines(series: list[AggregatedSeries], metric: str) -> list[str]:
    """The aggregated numbers as CSV for inspection alongside the chart."""
    lines = [f"protocol,pause_time,malicious_pct,{metric}_mean,{metric}_stderr"]
    for s in series:
        pause = "" if s.pause_time is None else f"{s.pause_time:g}"
        for x, m, e in zip(s.x, s.y_mean, s.y_stderr):
            lines.append(f"{s.protocol},{pause},{x:g},{m:.9f},{e:.9f}")
    return lines
