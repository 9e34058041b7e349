"""Random-waypoint mobility with closed-form positions and unit-disk links.

Each node's full trajectory for the run is generated up front (placement from
the scenario stream, waypoints and speeds from the mobility stream), so the
schedule is identical across protocol variants and the position at any time
is a pure lookup.  An initial pause of pause_time at t=0 mirrors the classic
setdest behavior.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .config import ScenarioConfig


@dataclass
class Segment:
    t0: float
    t1: float
    x0: float
    y0: float
    x1: float
    y1: float
    speed: float  # 0 for pause segments

    def position(self, t: float) -> tuple[float, float]:
        if self.t1 <= self.t0 or t >= self.t1:
            return self.x1, self.y1
        if t <= self.t0:
            return self.x0, self.y0
        frac = (t - self.t0) / (self.t1 - self.t0)
        return (self.x0 + (self.x1 - self.x0) * frac,
                self.y0 + (self.y1 - self.y0) * frac)


class Mobility:
    """Precomputed waypoint schedules and range queries for all nodes."""

    def __init__(self, cfg: ScenarioConfig, scenario_rng, mobility_rng):
        self.cfg = cfg
        self.range = cfg.radio_range
        self.n = cfg.nodes
        self._segments: list[list[Segment]] = []
        self._starts: list[list[float]] = []
        self._cursor = [0] * self.n
        placements = [
            (scenario_rng.uniform(0.0, cfg.field_width),
             scenario_rng.uniform(0.0, cfg.field_height))
            for _ in range(self.n)
        ]
        for node in range(self.n):
            segs = self._build_schedule(placements[node], mobility_rng)
            self._segments.append(segs)
            self._starts.append([s.t0 for s in segs])

    def _build_schedule(self, start_pos, rng) -> list[Segment]:
        cfg = self.cfg
        segs: list[Segment] = []
        t = 0.0
        x, y = start_pos
        if cfg.pause_time > 0:
            t = cfg.pause_time
            segs.append(Segment(0.0, t, x, y, x, y, 0.0))
        while t < cfg.duration:
            dx = rng.uniform(0.0, cfg.field_width)
            dy = rng.uniform(0.0, cfg.field_height)
            speed = rng.uniform(0.0, cfg.max_speed)
            if cfg.max_speed == 0 or speed <= 0:
                # Degenerate static scenario: a single resting segment.
                segs.append(Segment(t, cfg.duration, x, y, x, y, 0.0))
                t = cfg.duration
                break
            travel = math.hypot(dx - x, dy - y) / speed
            segs.append(Segment(t, t + travel, x, y, dx, dy, speed))
            t += travel
            x, y = dx, dy
            if cfg.pause_time > 0 and t < cfg.duration:
                segs.append(Segment(t, t + cfg.pause_time, x, y, x, y, 0.0))
                t += cfg.pause_time
        if not segs:
            segs.append(Segment(0.0, cfg.duration, x, y, x, y, 0.0))
        return segs

    def position_at(self, node: int, t: float) -> tuple[float, float]:
        if not 0 <= node < self.n:
            raise KeyError(f"unknown node {node}")
        segs = self._segments[node]
        i = self._cursor[node]
        if t < segs[i].t0:
            i = max(bisect_right(self._starts[node], t) - 1, 0)
        while i + 1 < len(segs) and t >= segs[i].t1:
            i += 1
        self._cursor[node] = i
        return segs[i].position(t)

    def distance(self, a: int, b: int, t: float) -> float:
        xa, ya = self.position_at(a, t)
        xb, yb = self.position_at(b, t)
        return math.hypot(xa - xb, ya - yb)

    def neighbors(self, node: int, t: float) -> list[int]:
        """Node ids within radio range (boundary inclusive), excluding self."""
        xa, ya = self.position_at(node, t)
        limit = self.range
        out = []
        for other in range(self.n):
            if other == node:
                continue
            xb, yb = self.position_at(other, t)
            if math.hypot(xa - xb, ya - yb) <= limit:
                out.append(other)
        return out

    def in_range(self, a: int, b: int, t: float) -> bool:
        return a != b and self.distance(a, b, t) <= self.range

    def waypoint_lines(self) -> list[str]:
        """Scenario dump: one `time node x y speed` line per segment start."""
        lines = []
        for node, segs in enumerate(self._segments):
            for s in segs:
                lines.append(
                    f"{s.t0:.6f} {node} {s.x1:.6f} {s.y1:.6f} {s.speed:.6f}"
                )
        return lines
