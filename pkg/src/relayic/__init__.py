"""Achievable regions and outer bounds for the two-user Gaussian interference
channel with a shared digital relay link of finite rate, plus their high-SNR limits."""

from .errors import (
    DegenerateChannel,
    DimensionMismatch,
    DomainError,
    EmptyRegion,
    InvalidR0,
    RegimeViolation,
    RelayICError,
    SearchBudgetExceeded,
    SingularModel,
    WynerZivInfeasible,
)
from .model import ChannelParams, LinkBudget, PowerSplit, etw_split, link_budget, r0_admissible, theta_params

__all__ = [
    "ChannelParams",
    "LinkBudget",
    "PowerSplit",
    "link_budget",
    "etw_split",
    "theta_params",
    "r0_admissible",
    "RelayICError",
    "DegenerateChannel",
    "SingularModel",
    "InvalidR0",
    "WynerZivInfeasible",
    "RegimeViolation",
    "EmptyRegion",
    "DomainError",
    "DimensionMismatch",
    "SearchBudgetExceeded",
]
