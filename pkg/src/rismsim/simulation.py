"""Single-run assembly: build the scenario, run it, report metrics.

Scenario randomness (placement, malicious identities, waypoints,
connections) is drawn in a fixed order from protocol-independent streams,
so a dsr run and a rism run of the same seed share identical mobility and
traffic schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import ScenarioConfig
from .core import RngStreams, RunSummary, Scheduler, Trace
from .dsr import Node
from .ids import RismIds
from .linklayer import LinkLayer
from .metrics import Metrics, MetricsReport
from .mobility import Mobility
from .workload import CbrConnection, CbrSource, generate_connections, pick_malicious


@dataclass
class ScenarioOverrides:
    """Test hook: pin parts of the scenario instead of drawing them."""
    placements: list[tuple[float, float]] | None = None
    malicious: set[int] | None = None
    connections: list[CbrConnection] | None = None


@dataclass
class RunResult:
    report: MetricsReport
    summary: RunSummary
    trace: Trace | None
    waypoint_lines: list[str]
    connection_lines: list[str]
    sim: "Simulation | None" = None


class Simulation:
    def __init__(self, cfg: ScenarioConfig, seed: int,
                 trace: bool = False,
                 overrides: ScenarioOverrides | None = None):
        cfg.validate()
        self.cfg = cfg
        self.seed = seed
        self.streams = RngStreams(seed)
        self.rng_adversary = self.streams.adversary
        self.trace = Trace() if trace else None
        self.sched = Scheduler(self.trace)
        self.metrics = Metrics()

        ov = overrides or ScenarioOverrides()
        # Draw order is fixed: placements, malicious shuffle, waypoints,
        # connections.  Never reorder; it would break paired comparisons.
        self.mobility = Mobility(cfg, self.streams.scenario,
                                 self.streams.mobility)
        if ov.placements is not None:
            self._pin_placements(ov.placements)
        self.malicious = (set(ov.malicious) if ov.malicious is not None
                          else pick_malicious(cfg, self.streams.scenario))
        self.connections = (list(ov.connections)
                            if ov.connections is not None
                            else generate_connections(cfg, self.streams.traffic,
                                                      self.malicious))

        self.link = LinkLayer(self.sched, self.mobility, cfg, self.metrics,
                              self.trace)
        self.nodes: dict[int, Node] = {}
        for node_id in range(cfg.nodes):
            node = Node(node_id, self, malicious=node_id in self.malicious)
            if cfg.protocol == "rism" and not node.malicious:
                node.ids = RismIds(node, cfg.ids, self)
            self.nodes[node_id] = node
            self.link.register_node(node)
        self.sources = [CbrSource(self, conn) for conn in self.connections]

    def _pin_placements(self, placements):
        # Rewrite mobility segments so every node rests at its pinned spot.
        from .mobility import Segment
        for node, (x, y) in enumerate(placements):
            seg = Segment(0.0, self.cfg.duration, x, y, x, y, 0.0)
            self.mobility._segments[node] = [seg]
            self.mobility._starts[node] = [0.0]
            self.mobility._cursor[node] = 0

    def run(self) -> RunResult:
        summary = self.sched.run_until(self.cfg.duration)
        report = self.metrics.finalize()
        conn_lines = [f"{c.src} {c.dst} {c.start_time:.6f} {c.rate:g}"
                      for c in self.connections]
        return RunResult(report=report, summary=summary, trace=self.trace,
                         waypoint_lines=self.mobility.waypoint_lines(),
                         connection_lines=conn_lines, sim=self)


def run_scenario(cfg: ScenarioConfig, seed: int, trace: bool = False,
                 overrides: ScenarioOverrides | None = None) -> RunResult:
    return Simulation(cfg, seed, trace=trace, overrides=overrides).run()
