"""Degraded broadcast channels: region boundary, converse bounds and code audits."""

from .capacity import CapacityResult, holevo_capacity, holevo_information
from .catalog import CatalogEntry, get_channel, list_channels
from .channel import CqBroadcastChannel, JointState, build_joint_state, region_objectives, time_share
from .converse import (
    BoundReport,
    ExponentParams,
    bound_report,
    classical_fano,
    fano_bound,
    optimal_t,
    second_order_bounds,
    strong_converse_exponent,
)
from .degrading import DegradingResult, check_degraded
from .region import (
    RegionEnvelope,
    RegionPoint,
    compute_envelope,
    concavity_audit,
    f_of_t,
    in_entropic_region,
    lagrangian_boundary,
)

__all__ = [
    "BoundReport",
    "CapacityResult",
    "CatalogEntry",
    "CqBroadcastChannel",
    "DegradingResult",
    "ExponentParams",
    "JointState",
    "RegionEnvelope",
    "RegionPoint",
    "bound_report",
    "build_joint_state",
    "check_degraded",
    "classical_fano",
    "compute_envelope",
    "concavity_audit",
    "f_of_t",
    "fano_bound",
    "get_channel",
    "holevo_capacity",
    "holevo_information",
    "in_entropic_region",
    "lagrangian_boundary",
    "list_channels",
    "optimal_t",
    "region_objectives",
    "second_order_bounds",
    "strong_converse_exponent",
    "time_share",
]
