"""Event scheduler, virtual clock, trace log and named RNG streams.

One Scheduler instance drives a single simulation run.  Events are totally
ordered by (fire_time, insertion sequence); the sequence counter breaks ties
so that equal-time events fire in scheduling order, which keeps runs
reproducible bit-for-bit.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np


class SchedulingError(Exception):
    """Raised when an event is scheduled in the past (a logic bug)."""


# Fixed indices so that adding a stream never reshuffles existing ones.
STREAM_LABELS = ("scenario", "mobility", "traffic", "adversary")


class RngStreams:
    """Independent per-purpose random streams derived from one master seed.

    Drawing from one stream never perturbs another, so e.g. the adversary's
    coin flips cannot change node placement between protocol variants.
    """

    def __init__(self, master_seed: int):
        self.master_seed = master_seed
        for idx, label in enumerate(STREAM_LABELS):
            setattr(self, label, np.random.default_rng([master_seed, idx]))

    def stream(self, label: str) -> np.random.Generator:
        if label not in STREAM_LABELS:
            raise KeyError(f"unknown rng stream {label!r}")
        return getattr(self, label)


class Trace:
    """Structured event log: one (time, node, kind, detail) record per line."""

    def __init__(self):
        self.records: list[tuple[float, int | None, str, str]] = []

    def record(self, time: float, node: int | None, kind: str, detail: str = ""):
        self.records.append((time, node, kind, detail))

    def lines(self) -> list[str]:
        return [
            f"{t:.9f}\t{'-' if n is None else n}\t{kind}\t{detail}"
            for t, n, kind, detail in self.records
        ]

    def write(self, path: str):
        with open(path, "w") as fh:
            for line in self.lines():
                fh.write(line + "\n")


class EventHandle:
    """Permits cancellation of a pending event."""

    __slots__ = ("cancelled",)

    def __init__(self):
        self.cancelled = False

    def cancel(self):
        self.cancelled = True


@dataclass
class RunSummary:
    clock: float
    scheduled: int = 0
    processed: int = 0
    cancelled: int = 0
    in_flight: int = 0


class Scheduler:
    """Deterministic single-threaded event loop over virtual seconds."""

    def __init__(self, trace: Trace | None = None):
        self.now = 0.0
        self.trace = trace
        self._heap: list = []
        self._seq = 0
        self.scheduled = 0
        self.processed = 0
        self.cancelled = 0

    def schedule(self, fire_time: float, kind: str, fn, *args, node=None) -> EventHandle:
        if fire_time < self.now:
            raise SchedulingError(
                f"event {kind!r} scheduled at t={fire_time} in the past (clock {self.now})"
            )
        handle = EventHandle()
        heapq.heappush(self._heap, (fire_time, self._seq, kind, fn, args, node, handle))
        self._seq += 1
        self.scheduled += 1
        return handle

    def schedule_in(self, delay: float, kind: str, fn, *args, node=None) -> EventHandle:
        return self.schedule(self.now + delay, kind, fn, *args, node=node)

    def run_until(self, t_end: float) -> RunSummary:
        if t_end <= 0:
            raise ValueError("t_end must be positive")
        heap = self._heap
        trace = self.trace
        while heap and heap[0][0] <= t_end:
            fire_time, _seq, kind, fn, args, node, handle = heapq.heappop(heap)
            if handle.cancelled:
                self.cancelled += 1
                continue
            self.now = fire_time
            if trace is not None:
                trace.record(fire_time, node, kind)
            fn(*args)
            self.processed += 1
        self.now = t_end
        # Anything still queued (and not cancelled) is in flight at the horizon.
        in_flight = sum(1 for e in heap if not e[6].cancelled)
        return RunSummary(
            clock=self.now,
            scheduled=self.scheduled,
            processed=self.processed,
            cancelled=self.cancelled + (len(heap) - in_flight),
            in_flight=in_flight,
        )
