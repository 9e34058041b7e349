"""Run counters, derived metrics and the per-run CSV row.

PDR = data received / data sent; routing overhead = control packets
generated (request, reply, error) / data sent.  WARNING traffic is tallied
separately and only folded into overhead_ratio_with_ids, keeping the
baseline-comparable overhead definition intact.  Knock probes never touch
the data counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .packets import Packet

DROP_CAUSES = ("behavior", "queue", "noroute", "linkloss")

CSV_HEADER = (
    "run_id,seed,protocol,nodes,malicious_pct,pause_time,connections,"
    "data_sent,data_received,pdr,control_generated,overhead_ratio,"
    "warning_count,overhead_ratio_with_ids,"
    "drops_behavior,drops_queue,drops_noroute,drops_linkloss"
)


class AccountingError(Exception):
    """A data packet was received or dropped twice: a conservation bug."""


@dataclass
class MetricsReport:
    data_sent: int
    data_received: int
    control_generated: int
    warning_count: int
    drops_by_cause: dict[str, int]
    in_flight: int

    @property
    def pdr(self) -> float:
        return self.data_received / self.data_sent if self.data_sent else 0.0

    @property
    def overhead_ratio(self) -> float:
        return self.control_generated / self.data_sent if self.data_sent else 0.0

    @property
    def overhead_ratio_with_ids(self) -> float:
        if not self.data_sent:
            return 0.0
        return (self.control_generated + self.warning_count) / self.data_sent

    @property
    def drops_total(self) -> int:
        return sum(self.drops_by_cause.values())

    def csv_row(self, run_id: int, seed: int, cfg) -> str:
        d = self.drops_by_cause
        return ",".join(str(v) for v in (
            run_id, seed, cfg.protocol, cfg.nodes,
            f"{cfg.malicious_fraction * 100:g}", f"{cfg.pause_time:g}",
            cfg.num_connections, self.data_sent, self.data_received,
            f"{self.pdr:.6f}", self.control_generated,
            f"{self.overhead_ratio:.6f}", self.warning_count,
            f"{self.overhead_ratio_with_ids:.6f}",
            d["behavior"], d["queue"], d["noroute"], d["linkloss"],
        ))


class Metrics:
    """Single-writer counters for one run, with strict data-packet accounting."""

    def __init__(self):
        self.data_sent = 0
        self.data_received = 0
        self.control_generated = 0
        self.warning_count = 0
        self.drops = {cause: 0 for cause in DROP_CAUSES}
        self._outstanding: set[tuple[int, int]] = set()

    def record_sent(self, pkt: Packet):
        if pkt.knock_flag:
            return
        if pkt.flow_key in self._outstanding:
            raise AccountingError(f"duplicate origination of {pkt.flow_key}")
        self._outstanding.add(pkt.flow_key)
        self.data_sent += 1

    def record_received(self, pkt: Packet):
        if pkt.knock_flag:
            return
        self._settle(pkt, "received")
        self.data_received += 1

    def record_drop(self, pkt: Packet, cause: str):
        if pkt.knock_flag:
            return
        self._settle(pkt, cause)
        self.drops[cause] += 1

    def _settle(self, pkt: Packet, what: str):
        try:
            self._outstanding.remove(pkt.flow_key)
        except KeyError:
            raise AccountingError(
                f"packet {pkt.flow_key} settled twice (now: {what})"
            ) from None

    def record_control(self):
        self.control_generated += 1

    def record_warning(self):
        self.warning_count += 1

    def finalize(self) -> MetricsReport:
        report = MetricsReport(
            data_sent=self.data_sent,
            data_received=self.data_received,
            control_generated=self.control_generated,
            warning_count=self.warning_count,
            drops_by_cause=dict(self.drops),
            in_flight=len(self._outstanding),
        )
        # Conservation identity, exact by construction and checked anyway.
        assert report.data_sent == (report.data_received + report.drops_total
                                    + report.in_flight)
        return report
