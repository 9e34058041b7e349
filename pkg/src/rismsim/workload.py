"""Constant-bit-rate traffic generation and adversary assignment.

Connection endpoints are distinct random (src, dst) pairs drawn once per
scenario from the traffic stream; starts are staggered over the first few
seconds to avoid a synchronized discovery storm.  Malicious identities come
from a seeded shuffle on the scenario stream, so they are identical for the
paired protocol runs of a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ScenarioConfig
from .packets import DATA, Packet


@dataclass
class CbrConnection:
    src: int
    dst: int
    rate: float
    payload: int
    start_time: float


def pick_malicious(cfg: ScenarioConfig, scenario_rng) -> set[int]:
    order = scenario_rng.permutation(cfg.nodes)
    return set(int(x) for x in order[: cfg.num_malicious])


def generate_connections(cfg: ScenarioConfig, traffic_rng,
                         malicious: set[int] | None = None) -> list[CbrConnection]:
    # Honest-only sources by default: a detected dropper's own flows are
    # refused service by its neighbors, so making it a source just measures
    # that policy instead of the routing comparison.  Sinks may be malicious.
    banned_sources = set()
    if not cfg.malicious_sources and malicious and len(malicious) < cfg.nodes:
        banned_sources = malicious
    wanted = cfg.num_connections
    pairs: list[tuple[int, int]] = []
    seen = set()
    limit = (cfg.nodes - len(banned_sources)) * (cfg.nodes - 1)
    while len(pairs) < min(wanted, limit):
        src = int(traffic_rng.integers(0, cfg.nodes))
        dst = int(traffic_rng.integers(0, cfg.nodes))
        if src == dst or (src, dst) in seen or src in banned_sources:
            continue
        seen.add((src, dst))
        pairs.append((src, dst))
    starts = [float(traffic_rng.uniform(0.0, cfg.cbr_start_window))
              for _ in pairs]
    return [CbrConnection(src, dst, cfg.cbr_rate, cfg.packet_size, start)
            for (src, dst), start in zip(pairs, starts)]


class CbrSource:
    """Schedules one connection's periodic data originations."""

    def __init__(self, sim, conn: CbrConnection):
        self.sim = sim
        self.conn = conn
        self.node = sim.nodes[conn.src]
        if conn.start_time <= sim.cfg.duration:
            sim.sched.schedule(conn.start_time, "cbr-send", self.tick,
                               node=conn.src)

    def tick(self):
        sim = self.sim
        conn = self.conn
        pkt = Packet(DATA, origin=conn.src, final_dest=conn.dst,
                     seq=self.node.next_seq(), payload_size=conn.payload)
        sim.metrics.record_sent(pkt)
        self.node.originate_data(pkt)
        next_time = sim.sched.now + 1.0 / conn.rate
        if next_time <= sim.cfg.duration:
            sim.sched.schedule(next_time, "cbr-send", self.tick, node=conn.src)
