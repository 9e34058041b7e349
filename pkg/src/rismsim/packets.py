"""Packet and frame definitions shared by the routing and link layers."""

from __future__ import annotations

from dataclasses import dataclass, field

DATA = "DATA"
RREQ = "RREQ"
RREP = "RREP"
RERR = "RERR"
WARNING = "WARNING"

BROADCAST = -1

ADDRESSED = "addressed"
PROMISCUOUS = "promiscuous"


@dataclass(slots=True)
class Packet:
    kind: str
    origin: int
    final_dest: int
    seq: int = 0
    source_route: tuple[int, ...] = ()      # DATA / RREP / RERR carrier path
    route_record: tuple[int, ...] = ()      # RREQ accumulated path
    avoid_list: frozenset[int] = frozenset()  # RREQ only
    rreq_id: int = 0
    broken_link: tuple[int, int] | None = None  # RERR only
    accused: int | None = None              # WARNING only
    payload_size: int = 0
    knock_flag: bool = False                # IDS probe traffic, metric-exempt

    @property
    def flow_key(self) -> tuple[int, int]:
        """Unique identity of a data packet (per-origin sequence space)."""
        return (self.origin, self.seq)


@dataclass(slots=True)
class Frame:
    transmitter: int
    link_dest: int  # node id or BROADCAST
    packet: Packet
    tx_time: float  # enqueue time at the transmitter
