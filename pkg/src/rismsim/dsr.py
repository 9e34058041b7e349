"""Dynamic source routing with the avoid-list extension and IDS hooks.

Each Node owns its route cache, per-destination send buffer, duplicate-RREQ
state and (for honest nodes under the reputation protocol) an IDS instance.
Malicious nodes run plain DSR plus the configured data-drop behavior: they
ignore avoid lists naming them, still flood and answer route requests, and
never drop control traffic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .packets import (ADDRESSED, BROADCAST, DATA, RERR, RREP, RREQ, WARNING,
                      Frame, Packet)

# Flows not refreshed within this horizon are considered inactive when a
# newly declared malicious node triggers route errors.
FLOW_TTL = 10.0


@dataclass
class RouteCacheEntry:
    path: tuple[int, ...]
    learned_at: float


class Node:
    def __init__(self, node_id: int, sim, malicious: bool):
        self.node_id = node_id
        self.sim = sim
        self.malicious = malicious
        self.ids = None  # attached by the simulation for honest rism nodes
        self.route_cache: list[RouteCacheEntry] = []
        self.send_buffers: dict[int, deque[Packet]] = {}
        self.pending_discovery: dict[int, tuple[float, object]] = {}
        self.rreq_seen: set[tuple[int, int]] = set()
        self._rreq_id = 0
        self._seq = 0
        # (origin, dest) -> (route, last_seen): flows we currently relay.
        self._active_flows: dict[tuple[int, int], tuple[tuple[int, ...], float]] = {}
        # (origin, broken_link) -> last RERR time, for rate limiting.
        self._rerr_sent: dict[tuple[int, tuple[int, int]], float] = {}

    # -- helpers ----------------------------------------------------------

    def next_seq(self) -> int:
        self._seq += 1
        return self._seq

    @property
    def faulty(self) -> set[int]:
        return self.ids.malicious if self.ids is not None else set()

    def _trace(self, kind: str, detail: str = ""):
        trace = self.sim.trace
        if trace is not None:
            trace.record(self.sim.sched.now, self.node_id, kind, detail)

    # -- route cache ------------------------------------------------------

    def add_route(self, path: tuple[int, ...]):
        if len(path) < 2 or path[0] != self.node_id:
            return
        if self._route_score(path) <= 0.0:
            return
        now = self.sim.sched.now
        for entry in self.route_cache:
            if entry.path == path:
                entry.learned_at = now
                return
        self.route_cache.append(RouteCacheEntry(path, now))

    def _route_score(self, path) -> float:
        if self.ids is not None:
            return self.ids.path_priority(path)
        return 1.0 / (len(path) - 1)

    def best_route(self, dest: int) -> tuple[int, ...] | None:
        best = None
        best_key = None
        for idx, entry in enumerate(self.route_cache):
            if entry.path[-1] != dest:
                continue
            score = self._route_score(entry.path)
            if score <= 0.0:
                continue
            key = (score, entry.learned_at, idx)
            if best_key is None or key > best_key:
                best, best_key = entry.path, key
        return best

    def purge_link(self, a: int, b: int):
        def broken(path):
            return any(path[i] == a and path[i + 1] == b
                       for i in range(len(path) - 1))
        self.route_cache = [e for e in self.route_cache if not broken(e.path)]

    def purge_node(self, subject: int):
        # Routes are purged when the subject is a relay; a route whose final
        # destination is the subject stays usable (it does not drop packets
        # addressed to itself).
        self.route_cache = [e for e in self.route_cache
                            if subject not in e.path[:-1]]

    def find_neighbor_of(self, subject: int) -> int | None:
        """A known neighbor of subject (from cached routes), for knock tests."""
        me = self.node_id
        for entry in self.route_cache:
            path = entry.path
            for i, x in enumerate(path):
                if x != subject:
                    continue
                for j in (i + 1, i - 1):
                    if 0 <= j < len(path) and path[j] not in (me, subject):
                        return path[j]
        return None

    # -- data origination --------------------------------------------------

    def originate_data(self, pkt: Packet):
        route = self.best_route(pkt.final_dest)
        if route is not None and not self.send_buffers.get(pkt.final_dest):
            pkt.source_route = route
            self._transmit_data(pkt, route)
            return
        buf = self.send_buffers.setdefault(pkt.final_dest, deque())
        if len(buf) >= self.sim.cfg.send_buffer:
            evicted = buf.popleft()
            self.sim.metrics.record_drop(evicted, "noroute")
            self._trace("data-drop", f"noroute {evicted.origin}:{evicted.seq}")
        buf.append(pkt)
        if route is not None:
            self._flush_buffer(pkt.final_dest)
        else:
            self.ensure_discovery(pkt.final_dest)

    def _transmit_data(self, pkt: Packet, route: tuple[int, ...]):
        self._note_flow(pkt)
        next_hop = route[route.index(self.node_id) + 1]
        accepted = self.sim.link.send(self.node_id, next_hop, pkt)
        if (accepted and self.ids is not None
                and next_hop != pkt.final_dest):
            self.ids.register_sent(pkt, next_hop)

    def _note_flow(self, pkt: Packet):
        self._active_flows[(pkt.origin, pkt.final_dest)] = (
            pkt.source_route, self.sim.sched.now)

    def _flush_buffer(self, dest: int):
        buf = self.send_buffers.get(dest)
        if not buf:
            return
        while buf:
            route = self.best_route(dest)
            if route is None:
                self.ensure_discovery(dest)
                return
            pkt = buf.popleft()
            pkt.source_route = route
            self._transmit_data(pkt, route)

    # -- route discovery ---------------------------------------------------

    def ensure_discovery(self, dest: int):
        if dest not in self.pending_discovery:
            self._originate_rreq(dest, self.sim.cfg.rreq_backoff_initial)

    def _originate_rreq(self, dest: int, backoff: float):
        self._rreq_id += 1
        pkt = Packet(RREQ, origin=self.node_id, final_dest=dest,
                     rreq_id=self._rreq_id,
                     route_record=(self.node_id,),
                     avoid_list=frozenset(self.faulty))
        self.rreq_seen.add((self.node_id, self._rreq_id))
        self.sim.metrics.record_control()
        self._trace("rreq", f"dest={dest} id={self._rreq_id}")
        self.sim.link.send(self.node_id, BROADCAST, pkt)
        handle = self.sim.sched.schedule_in(
            backoff, "rreq-retry", self._rreq_retry, dest, backoff,
            node=self.node_id)
        self.pending_discovery[dest] = (backoff, handle)

    def _rreq_retry(self, dest: int, backoff: float):
        self.pending_discovery.pop(dest, None)
        if not self.send_buffers.get(dest):
            return
        if self.best_route(dest) is not None:
            self._flush_buffer(dest)
            return
        next_backoff = min(backoff * 2.0, self.sim.cfg.rreq_backoff_max)
        self._originate_rreq(dest, next_backoff)

    def _discovery_succeeded(self, dest: int):
        pending = self.pending_discovery.pop(dest, None)
        if pending is not None:
            pending[1].cancel()
        self._flush_buffer(dest)

    # -- frame reception ---------------------------------------------------

    def receive(self, frame: Frame, kind: str = ADDRESSED):
        if self.ids is not None and frame.transmitter != self.node_id:
            self.ids.match_pack(frame)
        pkt = frame.packet
        if pkt.kind == DATA:
            self._handle_data(frame)
        elif pkt.kind == RREQ:
            self._handle_rreq(frame)
        elif pkt.kind == RREP:
            self._handle_rrep(frame)
        elif pkt.kind == RERR:
            self._handle_rerr(frame)
        elif pkt.kind == WARNING:
            self._handle_warning(frame)

    def overhear(self, frame: Frame):
        if self.ids is not None:
            self.ids.match_pack(frame)

    # -- DATA --------------------------------------------------------------

    def _handle_data(self, frame: Frame):
        pkt = frame.packet
        if pkt.final_dest == self.node_id:
            self.sim.metrics.record_received(pkt)
            return
        if self.ids is not None and pkt.origin in self.ids.malicious:
            # No service for senders on the malicious list.
            self.sim.metrics.record_drop(pkt, "noroute")
            self._trace("data-drop", f"malicious-origin {pkt.origin}:{pkt.seq}")
            return
        if self.malicious and pkt.origin != self.node_id:
            if (self.sim.rng_adversary.random()
                    < self.sim.cfg.malicious_drop_probability):
                self.sim.metrics.record_drop(pkt, "behavior")
                self._trace("data-drop", f"behavior {pkt.origin}:{pkt.seq}")
                return
        route = pkt.source_route
        try:
            i = route.index(self.node_id)
        except ValueError:
            i = -1
        if i < 0 or i + 1 >= len(route):
            self.sim.metrics.record_drop(pkt, "noroute")
            self._trace("data-drop", f"bad-route {pkt.origin}:{pkt.seq}")
            return
        next_hop = route[i + 1]
        if (self.ids is not None and next_hop != pkt.final_dest
                and next_hop in self.ids.malicious):
            # Transactions through a blacklisted relay are blocked; tell the
            # origin its route is dead so it can rediscover around it.
            self.sim.metrics.record_drop(pkt, "noroute")
            self._trace("data-drop", f"blocked-relay {pkt.origin}:{pkt.seq}")
            self._rerr_rate_limited(pkt.origin, route, i, (self.node_id, next_hop))
            return
        self._trace("data-fwd", f"{pkt.origin}:{pkt.seq}->{next_hop}")
        self._transmit_data(pkt, route)

    def _rerr_rate_limited(self, origin: int, route, my_index: int,
                           broken: tuple[int, int]):
        now = self.sim.sched.now
        key = (origin, broken)
        last = self._rerr_sent.get(key)
        if last is not None and now - last < 1.0:
            return
        self._rerr_sent[key] = now
        self._originate_rerr(route, my_index, broken)

    # -- RREQ --------------------------------------------------------------

    def _handle_rreq(self, frame: Frame):
        pkt = frame.packet
        me = self.node_id
        if pkt.origin == me:
            return
        key = (pkt.origin, pkt.rreq_id)
        if key in self.rreq_seen:
            return
        self.rreq_seen.add(key)
        if self.ids is not None:
            for subject in sorted(pkt.avoid_list):
                self.ids.apply_indirect(subject, "avoid-list")
            if pkt.origin in self.ids.malicious:
                return  # requests from malicious senders are not processed
        if me in pkt.route_record:
            return
        if me == pkt.final_dest:
            self._send_rrep(pkt.route_record + (me,))
            return
        if me in pkt.avoid_list and not self.malicious:
            self._trace("rreq-drop", f"avoided id={pkt.rreq_id}")
            return
        if self.malicious and me not in pkt.avoid_list:
            # A named node's cache reply would be suppressed everywhere;
            # it keeps participating by rebroadcasting with itself appended.
            cached = self.best_route(pkt.final_dest)
            if cached is not None and not set(cached) & set(pkt.route_record):
                self._send_rrep(pkt.route_record + cached)
                return
        new_avoid = pkt.avoid_list | self.faulty if self.ids else pkt.avoid_list
        fwd = replace(pkt, route_record=pkt.route_record + (me,),
                      avoid_list=new_avoid)
        if self.sim.cfg.count_forwards:
            self.sim.metrics.record_control()
        self.sim.link.send(me, BROADCAST, fwd)

    def _send_rrep(self, route: tuple[int, ...]):
        i = route.index(self.node_id)
        rrep = Packet(RREP, origin=self.node_id, final_dest=route[0],
                      source_route=route)
        self.sim.metrics.record_control()
        self._trace("rrep", "-".join(map(str, route)))
        self.sim.link.send(self.node_id, route[i - 1], rrep)

    # -- RREP --------------------------------------------------------------

    def _handle_rrep(self, frame: Frame):
        pkt = frame.packet
        path = pkt.source_route
        me = self.node_id
        if me not in path:
            return
        if self.ids is not None:
            # Suppress replies advertising a malicious relay; the final
            # destination itself being on the list does not taint the path.
            if any(x != me and x in self.ids.malicious for x in path[:-1]):
                self._trace("rrep-suppress", "-".join(map(str, path)))
                return
            if (frame.transmitter in self.ids.malicious
                    and frame.transmitter != path[-1]):
                self._trace("rrep-suppress", f"from {frame.transmitter}")
                return
        i = path.index(me)
        if i + 1 < len(path):
            self.add_route(path[i:])
        if i == 0:
            self._discovery_succeeded(path[-1])
        else:
            self.sim.link.send(me, path[i - 1], pkt)

    # -- RERR --------------------------------------------------------------

    def _originate_rerr(self, route: tuple[int, ...], my_index: int,
                        broken: tuple[int, int]):
        back = tuple(reversed(route[:my_index + 1]))
        if len(back) < 2:
            return
        rerr = Packet(RERR, origin=self.node_id, final_dest=back[-1],
                      source_route=back, broken_link=broken)
        self.sim.metrics.record_control()
        self._trace("rerr", f"broken={broken[0]}-{broken[1]}")
        self.sim.link.send(self.node_id, back[1], rerr)

    def _handle_rerr(self, frame: Frame):
        pkt = frame.packet
        a, b = pkt.broken_link
        self.purge_link(a, b)
        if self.ids is not None:
            self.ids.clear_log(pkt.origin)
        path = pkt.source_route
        me = self.node_id
        if me not in path:
            return
        i = path.index(me)
        if me == pkt.final_dest:
            for dest, buf in self.send_buffers.items():
                if buf and self.best_route(dest) is None:
                    self.ensure_discovery(dest)
        elif i + 1 < len(path):
            self.sim.link.send(me, path[i + 1], pkt)

    # -- WARNING -----------------------------------------------------------

    def broadcast_warning(self, accused: int):
        pkt = Packet(WARNING, origin=self.node_id, final_dest=BROADCAST,
                     accused=accused)
        self.sim.metrics.record_warning()
        self.sim.link.send(self.node_id, BROADCAST, pkt)

    def _handle_warning(self, frame: Frame):
        pkt = frame.packet
        if self.ids is None:
            return
        if pkt.accused == self.node_id:
            self._trace("warning-self", f"from {frame.transmitter}")
            return
        self._trace("warning-rx", f"accused={pkt.accused}")
        self.ids.apply_indirect(pkt.accused, "warning")

    # -- link feedback -----------------------------------------------------

    def on_unicast_failed(self, frame: Frame):
        pkt = frame.packet
        dest = frame.link_dest
        self.purge_link(self.node_id, dest)
        if self.ids is not None:
            self.ids.on_send_failed(pkt, dest)
        if pkt.kind != DATA:
            return
        self.sim.metrics.record_drop(pkt, "linkloss")
        self._trace("data-drop", f"linkloss {pkt.origin}:{pkt.seq}")
        if pkt.origin != self.node_id:
            route = pkt.source_route
            if self.node_id in route:
                self._originate_rerr(route, route.index(self.node_id),
                                     (self.node_id, dest))
        elif self.send_buffers.get(pkt.final_dest):
            self.ensure_discovery(pkt.final_dest)

    # -- IDS callbacks -----------------------------------------------------

    def on_declared_malicious(self, subject: int):
        """Purge routes and error out active flows through the subject."""
        self.purge_node(subject)
        now = self.sim.sched.now
        me = self.node_id
        for flow, (route, seen) in list(self._active_flows.items()):
            if subject not in route[:-1] or now - seen > FLOW_TTL:
                continue
            del self._active_flows[flow]
            i = route.index(me)
            j = route.index(subject)
            if j <= i:
                continue  # subject is upstream; nothing to report back
            if i == 0:
                # Our own flow: rediscover (avoiding the subject) on demand.
                if self.send_buffers.get(flow[1]):
                    self.ensure_discovery(flow[1])
                continue
            self._originate_rerr(route, i, (route[j - 1], subject))
