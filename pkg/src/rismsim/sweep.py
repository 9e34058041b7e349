"""Sweep expansion and the (optionally parallel) experiment runner.

A sweep is the full cross product of the given axes times the seed list.
Rows are emitted in deterministic run-index order regardless of which
worker finishes first.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from .config import ScenarioConfig, set_option
from .metrics import CSV_HEADER
from .simulation import run_scenario


@dataclasses.dataclass
class RunSpec:
    run_id: int
    cfg: ScenarioConfig
    seed: int


def expand_sweep(base: ScenarioConfig, axes: list[tuple[str, list[str]]],
                 master_seed: int, num_seeds: int) -> list[RunSpec]:
    """Cross product of sweep axes x seeds, in axis-then-seed order."""
    points: list[list[tuple[str, str]]] = [[]]
    for key, values in axes:
        points = [combo + [(key, v)] for combo in points for v in values]
    specs: list[RunSpec] = []
    run_id = 0
    for combo in points:
        for i in range(num_seeds):
            cfg = copy_config(base)
            for key, value in combo:
                set_option(cfg, key, value)
            cfg.validate()
            specs.append(RunSpec(run_id, cfg, master_seed + i))
            run_id += 1
    return specs


def copy_config(cfg: ScenarioConfig) -> ScenarioConfig:
    new = dataclasses.replace(cfg)
    new.ids = dataclasses.replace(cfg.ids)
    return new


def _execute(spec: RunSpec) -> str:
    result = run_scenario(spec.cfg, spec.seed)
    return result.report.csv_row(spec.run_id, spec.seed, spec.cfg)


def run_sweep(specs: list[RunSpec], jobs: int = 1,
              timestamp: bool = True) -> list[str]:
    """Execute all runs; returns CSV lines (comment, header, rows)."""
    lines = []
    if timestamp:
        now = datetime.now(timezone.utc).isoformat(timespec="seconds")
        lines.append(f"# generated {now}")
    lines.append(CSV_HEADER)
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_execute, specs, chunksize=1))
    else:
        rows = [_execute(spec) for spec in specs]
    lines.extend(rows)
    return lines
