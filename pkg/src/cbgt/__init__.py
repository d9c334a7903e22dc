"""Perpetual scheduling on set systems: bamboo-garden trimming and pinwheel
scheduling with exact verification."""
from __future__ import annotations

__version__ = "0.1.0"

from .model import (  # noqa: E402
    CbgtInstance,
    DomainError,
    InstanceError,
    Schedule,
    TooLargeError,
    lcm_of_denominators,
    strip_zero_rate,
)
from .simulator import SimulationReport, simulate  # noqa: E402

__all__ = [
    "CbgtInstance",
    "DomainError",
    "InstanceError",
    "Schedule",
    "SimulationReport",
    "TooLargeError",
    "lcm_of_denominators",
    "simulate",
    "strip_zero_rate",
]
