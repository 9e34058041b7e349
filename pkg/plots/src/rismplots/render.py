"""Matplotlib rendering of aggregated comparison series."""

from __future__ import annotations

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .aggregate import AggregatedSeries  # noqa: E402

_METRIC_LABELS = {
    "pdr": "Packet delivery ratio",
    "overhead_ratio": "Routing overhead (control / data sent)",
    "overhead_ratio_with_ids": "Routing overhead incl. WARNINGs",
}


def render_chart(series: list[AggregatedSeries], metric: str,
                 out_path: str) -> None:
    if len(series) < 2:
        print(f"notice: only {len(series)} series present in the CSV",
              file=sys.stderr)
    fig, ax = plt.subplots(figsize=(7, 5))
    for s in series:
        ax.errorbar(s.x, s.y_mean, yerr=s.y_stderr, marker="o",
                    capsize=3, label=s.label)
    ax.set_xlabel("% malicious nodes")
    ax.set_ylabel(_METRIC_LABELS.get(metric, metric))
    ax.set_title(f"{_METRIC_LABELS.get(metric, metric)} vs. malicious fraction")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
