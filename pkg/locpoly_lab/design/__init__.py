"""Sampling designs: densities, quantile grids and the bias-optimal density."""

from .density import (
    BadDensity,
    DesignGrid,
    SamplingDensity,
    check_density,
    density_from_id,
    empirical_density,
    linear_density,
    quantile_grid,
    uniform_density,
)
from .optimal import (
    VanishingDerivative,
    WrongParity,
    design_exponent,
    g_function,
    optimal_density,
)

__all__ = [
    "BadDensity",
    "DesignGrid",
    "SamplingDensity",
    "VanishingDerivative",
    "WrongParity",
    "check_density",
    "density_from_id",
    "design_exponent",
    "empirical_density",
    "g_function",
    "linear_density",
    "optimal_density",
    "quantile_grid",
    "uniform_density",
]
