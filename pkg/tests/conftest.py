"""Shared builders for micro-scenario simulations."""

from rismsim.config import ScenarioConfig
from rismsim.simulation import ScenarioOverrides, Simulation
from rismsim.workload import CbrConnection


def make_sim(positions, malicious=(), connections=(), seed=1, trace=True,
             **cfg_kw):
    """A simulation with pinned static node positions.

    connections: iterable of (src, dst, start_time) or CbrConnection.
    """
    cfg_kw.setdefault("nodes", len(positions))
    cfg = ScenarioConfig(**cfg_kw)
    conns = [
        c if isinstance(c, CbrConnection)
        else CbrConnection(c[0], c[1], cfg.cbr_rate, cfg.packet_size, c[2])
        for c in connections
    ]
    overrides = ScenarioOverrides(placements=list(positions),
                                  malicious=set(malicious),
                                  connections=conns)
    return Simulation(cfg, seed, trace=trace, overrides=overrides)


def trace_records(sim, kind, node=None):
    return [r for r in sim.trace.records
            if r[2] == kind and (node is None or r[1] == node)]
