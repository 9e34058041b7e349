"""Discrete-event MANET simulator: DSR source routing with a
reputation-based intrusion detection layer, and a defenseless DSR baseline.
"""

from .config import ConfigError, IdsConfig, ScenarioConfig, load_config, parse_config
from .simulation import RunResult, ScenarioOverrides, Simulation, run_scenario

__all__ = [
    "ConfigError",
    "IdsConfig",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "RunResult",
    "ScenarioOverrides",
    "Simulation",
    "run_scenario",
]

__version__ = "0.1.0"
