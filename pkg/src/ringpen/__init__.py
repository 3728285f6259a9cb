"""Decentralized penalty methods on a ring of agents."""

from .core import (
    ConfigurationError,
    InvalidInputError,
    PenaltyConfig,
    Ring,
    average_point,
    consensus,
    lipschitz_bound,
    penalty_gradient,
    penalty_gradient_block,
    penalty_value,
)
from .dpm import DpmRun, StageSchedule, inner_step, run_dpm, validate_config
from .metrics import MetricTrace, Snapshot

__all__ = [
    "ConfigurationError",
    "DpmRun",
    "InvalidInputError",
    "MetricTrace",
    "PenaltyConfig",
    "Ring",
    "Snapshot",
    "StageSchedule",
    "average_point",
    "consensus",
    "inner_step",
    "lipschitz_bound",
    "penalty_gradient",
    "penalty_gradient_block",
    "penalty_value",
    "run_dpm",
    "validate_config",
]
