"""Deterministic 5G NR-NTN satellite downlink simulator.

Link budgets for the 3GPP NTN calibration scenarios (SC1, SC4, SC6, SC9) and a
discrete-event model of the regenerative-payload downlink that produces
throughput, packet delivery ratio and latency against the source rate.
"""

from .engine import RunMetrics, run, sweep
from .errors import (
    ConfigParseError,
    ConfigurationError,
    DomainError,
    ScenarioNotFoundError,
    SchemaError,
)
from .scenario import ResolvedScenario, ScenarioConfig, builtin, load, resolve

__all__ = [
    "ConfigParseError",
    "ConfigurationError",
    "DomainError",
    "ResolvedScenario",
    "RunMetrics",
    "ScenarioConfig",
    "ScenarioNotFoundError",
    "SchemaError",
    "builtin",
    "load",
    "resolve",
    "run",
    "sweep",
]
