"""Scenario and IDS configuration, plus the flat ``key = value`` config format.

Defaults reproduce the fixed simulation parameters (1000x1000 m field,
250 m radio range, 2 Mbps links, 64 B CBR packets at 4 pkt/s, 900 s runs).
All IDS tunables live in IdsConfig; none are hard-coded elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields


class ConfigError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class IdsConfig:
    timing_window: float = 1.0       # seconds per observation window
    max_packet_rate: float = 20.0    # packets/window feeding the drop threshold
    suspicious_threshold: float = -10.0
    malicious_threshold: float = -40.0
    rating_floor: float = -60.0
    w_self: float = -5.0             # self-observed misbehavior
    w_warning: float = -2.0          # one-hop WARNING broadcast
    w_avoid: float = -1.0            # avoid-list sighting in an RREQ
    w_positive: float = 1.0          # positive performance appraisal
    fade_inactivity: float = 200.0   # quiet period before fading begins
    fade_interval: float = 50.0      # seconds between fade steps
    fade_step: float = 5.0           # rating recovered per step
    pack_grace: float = 0.1          # young registrations carried to next window

    def validate(self):
        if not (self.rating_floor < self.malicious_threshold < self.suspicious_threshold < 0):
            raise ConfigError(
                "thresholds must satisfy rating_floor < malicious_threshold "
                "< suspicious_threshold < 0"
            )
        if not (abs(self.w_self) > abs(self.w_warning) >= abs(self.w_avoid)):
            raise ConfigError("weights must satisfy |w_self| > |w_warning| >= |w_avoid|")
        if self.timing_window <= 0:
            raise ConfigError("timing_window must be positive")

    @property
    def suspicious_midpoint(self) -> float:
        return (self.suspicious_threshold + self.malicious_threshold) / 2.0


@dataclass
class ScenarioConfig:
    field_width: float = 1000.0
    field_height: float = 1000.0
    nodes: int = 10
    malicious_fraction: float = 0.0
    pause_time: float = 0.0
    max_speed: float = 10.0
    radio_range: float = 250.0
    link_rate: float = 2_000_000.0   # bits/s
    connections: int | None = None   # None -> 5 for <=10 nodes, else 10
    packet_size: int = 64            # CBR payload bytes
    cbr_rate: float = 4.0            # packets/s per connection
    cbr_start_window: float = 10.0   # connection starts staggered over this span
    duration: float = 900.0
    protocol: str = "rism"           # "rism" or "dsr" (defenseless)
    malicious_drop_probability: float = 0.99
    queue_capacity: int = 50         # interface queue, packets
    frame_overhead: int = 24         # header bytes added for service time
    control_packet_size: int = 32    # nominal payload bytes of control packets
    propagation_delay: float = 1e-6
    send_buffer: int = 64            # per-destination pending-data buffer
    rreq_backoff_initial: float = 0.5
    rreq_backoff_max: float = 10.0
    count_forwards: bool = False     # count control rebroadcasts as overhead
    malicious_sources: bool = False  # allow malicious nodes as CBR sources
    ids: IdsConfig = field(default_factory=IdsConfig)

    @property
    def num_connections(self) -> int:
        if self.connections is not None:
            return self.connections
        return 5 if self.nodes <= 10 else 10

    @property
    def num_malicious(self) -> int:
        return math.ceil(self.nodes * self.malicious_fraction)

    def validate(self):
        if self.nodes < 2:
            raise ConfigError("need at least 2 nodes")
        if not 0.0 <= self.malicious_fraction <= 1.0:
            raise ConfigError("malicious_fraction must lie in [0, 1]")
        if self.protocol not in ("dsr", "rism"):
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        for name in ("field_width", "field_height", "radio_range", "link_rate",
                     "cbr_rate", "duration"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.pause_time < 0 or self.max_speed < 0:
            raise ConfigError("pause_time and max_speed must be non-negative")
        if not 0.0 <= self.malicious_drop_probability <= 1.0:
            raise ConfigError("malicious_drop_probability must lie in [0, 1]")
        if self.num_connections < 0:
            raise ConfigError("connections must be non-negative")
        if self.queue_capacity < 1:
            raise ConfigError("queue_capacity must be at least 1")
        self.ids.validate()


_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False,
                "yes": True, "no": False}


def _convert(raw: str, target_type, key: str, line: int | None):
    raw = raw.strip()
    try:
        if target_type is bool:
            try:
                return _BOOL_VALUES[raw.lower()]
            except KeyError:
                raise ValueError(raw)
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for key {key!r}", line)


_SCENARIO_FIELDS = {f.name: f for f in fields(ScenarioConfig) if f.name != "ids"}
_IDS_FIELDS = {f.name: f for f in fields(IdsConfig)}

# Per-key range checks applied at parse time so errors carry line numbers.
_FIELD_CHECKS = {
    "malicious_fraction": lambda v: 0.0 <= v <= 1.0,
    "malicious_drop_probability": lambda v: 0.0 <= v <= 1.0,
    "nodes": lambda v: v >= 2,
    "protocol": lambda v: v in ("dsr", "rism"),
    "duration": lambda v: v > 0,
    "radio_range": lambda v: v > 0,
    "link_rate": lambda v: v > 0,
    "cbr_rate": lambda v: v > 0,
    "queue_capacity": lambda v: v >= 1,
    "pause_time": lambda v: v >= 0,
    "max_speed": lambda v: v >= 0,
}


def set_option(cfg: ScenarioConfig, key: str, raw_value: str, line: int | None = None):
    """Assign one dotted config key from its textual value."""
    key = key.strip()
    if key.startswith("ids."):
        sub = key[4:]
        if sub not in _IDS_FIELDS:
            raise ConfigError(f"unknown key {key!r}", line)
        setattr(cfg.ids, sub, _convert(raw_value, float, key, line))
        return
    if key not in _SCENARIO_FIELDS:
        raise ConfigError(f"unknown key {key!r}", line)
    f = _SCENARIO_FIELDS[key]
    target = {"nodes": int, "packet_size": int, "queue_capacity": int,
              "frame_overhead": int, "control_packet_size": int,
              "send_buffer": int, "connections": int,
              "count_forwards": bool, "malicious_sources": bool,
              "protocol": str}.get(f.name, float)
    value = _convert(raw_value, target, key, line)
    check = _FIELD_CHECKS.get(key)
    if check is not None and not check(value):
        raise ConfigError(f"value {value!r} out of range for key {key!r}", line)
    setattr(cfg, key, value)


def parse_config(text: str) -> ScenarioConfig:
    """Parse a ``key = value`` document; '#' starts a comment."""
    cfg = ScenarioConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = stripped.split("=", 1)
        set_option(cfg, key, value, lineno)
    try:
        cfg.validate()
    except ConfigError:
        raise
    return cfg


def load_config(path: str) -> ScenarioConfig:
    with open(path) as fh:
        return parse_config(fh.read())
