"""Small-bandwidth expansions, optimal bandwidths and limit distribution parameters."""

from .bandwidths import (
    GLOBAL_MESH,
    AlphaZero,
    NotOptimizable,
    OptimalBandwidth,
    OptimalDensityInUse,
    ZeroCurvature,
    h_opt_global,
    h_opt_local,
    h_opt_regular,
)
from .expansions import (
    AsymptoticMoments,
    ExpansionTerm,
    Route,
    TermPair,
    asym_bias,
    asym_variance,
    asym_variance_regular,
    asymptotic_moments,
    asymptotic_mse,
    select_route,
)
from .design_sums import sn_star_expansion, sn_star_finite
from .normality import NormalityCase, NormalityParams, normality_params

__all__ = [
    "GLOBAL_MESH",
    "AlphaZero",
    "AsymptoticMoments",
    "ExpansionTerm",
    "NormalityCase",
    "NormalityParams",
    "NotOptimizable",
    "OptimalBandwidth",
    "OptimalDensityInUse",
    "Route",
    "TermPair",
    "ZeroCurvature",
    "asym_bias",
    "asym_variance",
    "asym_variance_regular",
    "asymptotic_moments",
    "asymptotic_mse",
    "h_opt_global",
    "h_opt_local",
    "h_opt_regular",
    "normality_params",
    "select_route",
    "sn_star_expansion",
    "sn_star_finite",
]
