"""Reputation-based intrusion detection: monitoring via passive
acknowledgements, evidence-weighted ratings, knock tests and fading.

ReputationTable is the pure rating state machine (no network side effects),
which keeps it testable in isolation.  RismIds wires one table per node into
the simulator: it registers sent data packets, matches overheard forwards,
closes timing windows, launches knock probes and drives the fade schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import IdsConfig
from .packets import BROADCAST, DATA, RERR, WARNING, Frame, Packet

NORMAL = "NORMAL"
SUSPICIOUS = "SUSPICIOUS"
MALICIOUS = "MALICIOUS"

SELF_POS = "self-pos"
SELF_NEG = "self-neg"
EV_WARNING = "warning"
EV_AVOID = "avoid-list"

_INDIRECT_WEIGHTS = {EV_WARNING: "w_warning", EV_AVOID: "w_avoid"}


@dataclass
class ReputationRecord:
    rating: float = 0.0
    redeemed: bool = False
    declared: bool = False
    last_accusation: float = -math.inf


class ReputationTable:
    """One node's view of everyone else's trustworthiness.

    Ratings are clamped to [rating_floor, 0].  Indirect evidence (WARNINGs
    and avoid-list sightings) can never push a rating below the suspicious
    threshold; only self-observation or a failed knock test condemns a node.
    """

    def __init__(self, cfg: IdsConfig):
        self.cfg = cfg
        self.records: dict[int, ReputationRecord] = {}
        self.malicious_set: set[int] = set()

    def record(self, subject: int) -> ReputationRecord:
        rec = self.records.get(subject)
        if rec is None:
            rec = self.records[subject] = ReputationRecord()
        return rec

    def rating(self, subject: int) -> float:
        rec = self.records.get(subject)
        return rec.rating if rec is not None else 0.0

    def category(self, subject: int) -> str:
        r = self.rating(subject)
        if r > self.cfg.suspicious_threshold:
            return NORMAL
        if r > self.cfg.malicious_threshold:
            return SUSPICIOUS
        return MALICIOUS

    def apply_positive(self, subject: int):
        rec = self.record(subject)
        rec.rating = min(0.0, rec.rating + self.cfg.w_positive)

    def apply_self_negative(self, subject: int) -> bool:
        """Returns True when the caller must declare the subject malicious."""
        rec = self.record(subject)
        rec.rating = max(self.cfg.rating_floor, rec.rating + self.cfg.w_self)
        return rec.rating <= self.cfg.malicious_threshold or rec.redeemed

    def apply_indirect(self, subject: int, source: str, now: float) -> bool:
        """Returns True when a knock test on the subject is warranted."""
        cfg = self.cfg
        rec = self.record(subject)
        rec.last_accusation = now
        if rec.rating > cfg.suspicious_threshold:
            w = getattr(cfg, _INDIRECT_WEIGHTS[source])
            rec.rating = max(cfg.suspicious_threshold, rec.rating + w)
        return self.category(subject) == SUSPICIOUS

    def declare(self, subject: int, now: float) -> bool:
        """Move subject to the malicious list; False if already there."""
        rec = self.record(subject)
        if rec.declared and subject in self.malicious_set:
            return False
        rec.rating = min(rec.rating, self.cfg.malicious_threshold)
        rec.declared = True
        rec.redeemed = False
        rec.last_accusation = now
        self.malicious_set.add(subject)
        return True

    def knock_passed(self, subject: int):
        rec = self.record(subject)
        rec.rating = self.cfg.suspicious_midpoint
        rec.redeemed = False

    def fade_tick(self, subject: int, now: float) -> float | None:
        """One fade step if the subject stayed quiet; next tick time or None.

        The subject leaves the malicious list at the suspicious midpoint with
        the redeemed flag set, so any later self-observed misbehavior
        re-declares it immediately.
        """
        cfg = self.cfg
        rec = self.records.get(subject)
        if rec is None or subject not in self.malicious_set:
            return None
        if now - rec.last_accusation < cfg.fade_inactivity:
            return rec.last_accusation + cfg.fade_inactivity + cfg.fade_interval
        rec.rating = min(cfg.suspicious_midpoint, rec.rating + cfg.fade_step)
        if rec.rating >= cfg.suspicious_midpoint:
            rec.rating = cfg.suspicious_midpoint
            rec.redeemed = True
            rec.declared = False
            self.malicious_set.discard(subject)
            return None
        return now + cfg.fade_interval


def path_priority(path, rating_fn, malicious_set) -> float:
    """Score a source route: shorter and cleaner paths rank higher.

    The penalty is 1 + |worst intermediate rating| so a clean path has
    badness 1; any malicious member zeroes the score (never cached).
    """
    hops = len(path) - 1
    if hops < 1:
        return 0.0
    intermediates = path[1:-1]
    r_min = 0.0
    for x in intermediates:
        if x in malicious_set:
            return 0.0
        r = rating_fn(x)
        if r < r_min:
            r_min = r
    return 1.0 / ((1.0 + abs(r_min)) * hops)


@dataclass
class _RegistryEntry:
    registered_at: float
    next_hop: int
    knock: bool


class RismIds:
    """The per-node IDS instance: monitor, reputation manager, knock, fade."""

    def __init__(self, node, cfg: IdsConfig, sim):
        self.node = node
        self.cfg = cfg
        self.sim = sim
        self.table = ReputationTable(cfg)
        self.registry: dict[tuple[int, int, int], _RegistryEntry] = {}
        # per-window tallies: neighbor -> [registered, acked]
        self.log: dict[int, list[int]] = {}
        self.outstanding_knocks: dict[int, object] = {}  # suspect -> timer handle
        self._fade_handles: dict[int, object] = {}
        sim.sched.schedule_in(cfg.timing_window, "window-close",
                              self.close_window, node=node.node_id)

    # -- monitor ----------------------------------------------------------

    def register_sent(self, pkt: Packet, next_hop: int):
        key = (pkt.origin, pkt.seq, next_hop)
        self.registry[key] = _RegistryEntry(self.sim.sched.now, next_hop,
                                            pkt.knock_flag)
        if not pkt.knock_flag:
            self.log.setdefault(next_hop, [0, 0])[0] += 1

    def on_send_failed(self, pkt: Packet, next_hop: int):
        """The frame never reached next_hop; retract the registration."""
        if pkt.kind != DATA:
            return
        key = (pkt.origin, pkt.seq, next_hop)
        entry = self.registry.pop(key, None)
        if entry is None:
            return
        if entry.knock:
            self._knock_not_applicable(next_hop)
        else:
            tally = self.log.get(next_hop)
            if tally is not None and tally[0] > 0:
                tally[0] -= 1

    def match_pack(self, frame: Frame):
        """Overheard (or addressed) frame from a neighbor: PACK matching."""
        pkt = frame.packet
        if pkt.kind == DATA:
            key = (pkt.origin, pkt.seq, frame.transmitter)
            entry = self.registry.pop(key, None)
            if entry is None:
                return
            if entry.knock:
                self._knock_pass(frame.transmitter)
            else:
                tally = self.log.get(frame.transmitter)
                if tally is not None:
                    tally[1] += 1
        elif pkt.kind == RERR:
            self.clear_log(pkt.origin)

    def clear_log(self, neighbor: int):
        """A route error excuses this neighbor's missing packets this window."""
        self.log.pop(neighbor, None)
        stale = [k for k, e in self.registry.items()
                 if e.next_hop == neighbor and not e.knock]
        for k in stale:
            del self.registry[k]

    def close_window(self):
        sim = self.sim
        now = sim.sched.now
        cfg = self.cfg
        # Registrations younger than the grace interval are still plausibly
        # in flight; carry them (and their tallies) into the next window.
        carried: dict[int, int] = {}
        stale = []
        for key, entry in self.registry.items():
            if entry.knock:
                continue
            if now - entry.registered_at < cfg.pack_grace:
                carried[entry.next_hop] = carried.get(entry.next_hop, 0) + 1
            else:
                stale.append(key)
        for neighbor, count in carried.items():
            tally = self.log.get(neighbor)
            if tally is not None:
                tally[0] = max(0, tally[0] - count)
        threshold = cfg.max_packet_rate * sim.link.congestion_parameter(
            self.node.node_id)
        for neighbor, (registered, acked) in list(self.log.items()):
            if registered <= 0:
                continue
            missing = registered - acked
            if missing > threshold:
                self._trace("appraisal-neg", f"{neighbor} missing={missing}")
                self._self_negative(neighbor)
            else:
                self._trace("appraisal-pos", f"{neighbor} missing={missing}")
                self._apply_and_note(neighbor, self.table.apply_positive)
        for key in stale:
            del self.registry[key]
        self.log = {n: [c, 0] for n, c in carried.items()}
        self._trace("window-close", "")
        sim.sched.schedule_in(cfg.timing_window, "window-close",
                              self.close_window, node=self.node.node_id)

    # -- reputation updates -----------------------------------------------

    def _trace(self, kind: str, detail: str):
        trace = self.sim.trace
        if trace is not None:
            trace.record(self.sim.sched.now, self.node.node_id, kind, detail)

    def _category_guard(self, subject: int):
        before = self.table.category(subject)

        def check():
            after = self.table.category(subject)
            if after != before:
                self._trace("category-change", f"{subject} {before}->{after}")
        return check

    def _apply_and_note(self, subject, fn, *args):
        check = self._category_guard(subject)
        result = fn(subject, *args)
        check()
        return result

    def _self_negative(self, subject: int):
        if self._apply_and_note(subject, self.table.apply_self_negative):
            self.declare_malicious(subject)

    def apply_indirect(self, subject: int, source: str):
        if subject == self.node.node_id:
            return
        now = self.sim.sched.now
        knock_wanted = self._apply_and_note(
            subject, self.table.apply_indirect, source, now)
        if knock_wanted:
            self.request_knock(subject)

    def declare_malicious(self, subject: int):
        now = self.sim.sched.now
        check = self._category_guard(subject)
        if not self.table.declare(subject, now):
            return
        check()
        self._trace("warning-tx", f"accused={subject}")
        self.node.broadcast_warning(subject)
        self.node.on_declared_malicious(subject)
        self._schedule_fade(subject,
                            now + self.cfg.fade_inactivity + self.cfg.fade_interval)

    def _schedule_fade(self, subject: int, when: float):
        old = self._fade_handles.get(subject)
        if old is not None:
            old.cancel()
        self._fade_handles[subject] = self.sim.sched.schedule(
            when, "fade-tick", self._fade_tick, subject, node=self.node.node_id)

    def _fade_tick(self, subject: int):
        self._fade_handles.pop(subject, None)
        check = self._category_guard(subject)
        next_time = self.table.fade_tick(subject, self.sim.sched.now)
        check()
        self._trace("fade", f"{subject} rating={self.table.rating(subject):g}")
        if next_time is not None:
            self._schedule_fade(subject, next_time)

    # -- knock test -------------------------------------------------------

    def request_knock(self, suspect: int):
        if suspect in self.outstanding_knocks:
            return
        sim = self.sim
        me = self.node.node_id
        if not sim.mobility.in_range(me, suspect, sim.sched.now):
            self._trace("knock-na", f"{suspect} out-of-range")
            return
        witness = self.node.find_neighbor_of(suspect)
        if witness is None:
            self._trace("knock-na", f"{suspect} no-witness")
            return
        pkt = Packet(DATA, origin=me, final_dest=witness,
                     seq=self.node.next_seq(),
                     source_route=(me, suspect, witness),
                     payload_size=self.sim.cfg.packet_size, knock_flag=True)
        if not sim.link.send(me, suspect, pkt):
            self._trace("knock-na", f"{suspect} queue-full")
            return
        self.register_sent(pkt, suspect)
        handle = sim.sched.schedule_in(self.cfg.timing_window, "knock-timeout",
                                       self._knock_timeout, suspect,
                                       (pkt.origin, pkt.seq, suspect),
                                       node=me)
        self.outstanding_knocks[suspect] = handle

    def _knock_pass(self, suspect: int):
        handle = self.outstanding_knocks.pop(suspect, None)
        if handle is not None:
            handle.cancel()
        self._trace("knock-pass", str(suspect))
        self._apply_and_note(suspect, lambda s: self.table.knock_passed(s))

    def _knock_timeout(self, suspect: int, key):
        self.outstanding_knocks.pop(suspect, None)
        if self.registry.pop(key, None) is None:
            return  # already resolved
        self._trace("knock-fail", str(suspect))
        self.declare_malicious(suspect)

    def _knock_not_applicable(self, suspect: int):
        handle = self.outstanding_knocks.pop(suspect, None)
        if handle is not None:
            handle.cancel()
        self._trace("knock-na", f"{suspect} link-broke")

    # -- queries used by routing ------------------------------------------

    @property
    def malicious(self) -> set[int]:
        return self.table.malicious_set

    def path_priority(self, path) -> float:
        return path_priority(path, self.table.rating, self.table.malicious_set)
