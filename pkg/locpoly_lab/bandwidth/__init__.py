"""Bandwidth selectors: exact IMSE oracle, cross-validation and plug-in."""

from .cv import CrossValidator, cross_validate
from .exact import ImseObjective, ImsePoint, exact_optimal_bandwidth, imse_profile
from .plugin import pilot_bandwidth, plugin_bandwidth, quadratic_variation
from .result import (
    LADDER_SIZE,
    AllCandidatesInfeasible,
    BandwidthResult,
    SelectionMethod,
    candidate_ladder,
    format_bandwidth,
    ladder_floor,
    parse_bandwidth,
    select_minimizer,
)

__all__ = [
    "LADDER_SIZE",
    "AllCandidatesInfeasible",
    "BandwidthResult",
    "CrossValidator",
    "ImseObjective",
    "ImsePoint",
    "SelectionMethod",
    "candidate_ladder",
    "cross_validate",
    "exact_optimal_bandwidth",
    "format_bandwidth",
    "imse_profile",
    "ladder_floor",
    "parse_bandwidth",
    "pilot_bandwidth",
    "plugin_bandwidth",
    "quadratic_variation",
    "select_minimizer",
]
