"""Idealized wireless link layer: FIFO interface queues, unit-disk delivery
and promiscuous overhearing.

There is no collision or contention model: every neighbor of the transmitter
at delivery time receives each frame, as the ADDRESSED copy for the link
destination (all neighbors, for broadcast) and a PROMISCUOUS copy otherwise.
A unicast whose destination has moved out of range is lost silently; the
transmitter is told, which is how route maintenance learns of link breaks.
"""

from __future__ import annotations

from collections import deque

from .packets import ADDRESSED, BROADCAST, DATA, Frame, Packet


class LinkLayer:
    def __init__(self, scheduler, mobility, cfg, metrics, trace=None):
        self.sched = scheduler
        self.mobility = mobility
        self.cfg = cfg
        self.metrics = metrics
        self.trace = trace
        self.nodes: dict[int, object] = {}
        self._queues: dict[int, deque[Frame]] = {}
        self._busy: dict[int, bool] = {}
        self.promiscuous = cfg.protocol == "rism"

    def register_node(self, node):
        self.nodes[node.node_id] = node
        self._queues[node.node_id] = deque()
        self._busy[node.node_id] = False

    def occupancy(self, node_id: int) -> int:
        return len(self._queues[node_id])

    def congestion_parameter(self, node_id: int) -> float:
        return len(self._queues[node_id]) / self.cfg.queue_capacity

    def service_time(self, pkt: Packet) -> float:
        size = pkt.payload_size if pkt.kind == DATA else self.cfg.control_packet_size
        return (size + self.cfg.frame_overhead) * 8.0 / self.cfg.link_rate

    def send(self, transmitter: int, link_dest: int, pkt: Packet) -> bool:
        """Enqueue a frame for transmission; False means overflow drop."""
        q = self._queues[transmitter]
        if len(q) >= self.cfg.queue_capacity:
            if self.trace is not None:
                self.trace.record(self.sched.now, transmitter, "drop-overflow",
                                  f"{pkt.kind} {pkt.origin}:{pkt.seq}")
            if pkt.kind == DATA:
                self.metrics.record_drop(pkt, "queue")
            return False
        frame = Frame(transmitter, link_dest, pkt, self.sched.now)
        q.append(frame)
        if not self._busy[transmitter]:
            self._start_service(transmitter)
        return True

    def _start_service(self, node_id: int):
        frame = self._queues[node_id][0]
        self._busy[node_id] = True
        delay = self.service_time(frame.packet) + self.cfg.propagation_delay
        self.sched.schedule_in(delay, "deliver", self._deliver, node_id,
                               node=node_id)

    def _deliver(self, node_id: int):
        q = self._queues[node_id]
        frame = q.popleft()
        now = self.sched.now
        neighbors = self.mobility.neighbors(node_id, now)
        if self.trace is not None:
            self.trace.record(now, node_id, "tx",
                              f"{frame.packet.kind}->{frame.link_dest}")
        if frame.link_dest == BROADCAST:
            addressed = neighbors
            others = ()
        elif frame.link_dest in neighbors:
            addressed = (frame.link_dest,)
            others = [n for n in neighbors if n != frame.link_dest]
        else:
            addressed = ()
            others = neighbors
            self.nodes[node_id].on_unicast_failed(frame)
        for receiver in addressed:
            if self.trace is not None:
                self.trace.record(now, receiver, "rx", frame.packet.kind)
            self.nodes[receiver].receive(frame, ADDRESSED)
        if self.promiscuous:
            for receiver in others:
                self.nodes[receiver].overhear(frame)
        if q:
            self._start_service(node_id)
        else:
            self._busy[node_id] = False
