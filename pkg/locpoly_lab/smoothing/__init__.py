"""The local polynomial estimator, its smoother weights and exact moments."""

from .curves import CurveFormatError, read_curves_csv, write_curves_csv, write_estimate_csv
from .fit import (
    BandwidthTooSmall,
    LocalFit,
    LocalFitError,
    RankDeficient,
    coefficient_rows,
    curve_estimate,
    pointwise_fit,
    smoother_matrix,
    weight_row,
)
from .moments import DerivativeTable, ExactMoments, exact_moments
from .sample import UNBOUNDED, FitSpec, FunctionalSample, is_unbounded

__all__ = [
    "UNBOUNDED",
    "BandwidthTooSmall",
    "CurveFormatError",
    "DerivativeTable",
    "ExactMoments",
    "FitSpec",
    "FunctionalSample",
    "LocalFit",
    "LocalFitError",
    "RankDeficient",
    "coefficient_rows",
    "curve_estimate",
    "exact_moments",
    "is_unbounded",
    "pointwise_fit",
    "read_curves_csv",
    "smoother_matrix",
    "weight_row",
    "write_curves_csv",
    "write_estimate_csv",
]
