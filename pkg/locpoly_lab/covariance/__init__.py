"""Error-process covariance models and Gaussian path sampling."""

from .models import (
    CovarianceModel,
    DiagonalPartials,
    FunctionCovariance,
    NotAvailable,
    OrnsteinUhlenbeckCovariance,
    ScaledCovariance,
    Smoothness,
    SquaredExponentialCovariance,
    SumCovariance,
    UnknownModel,
    WienerCovariance,
    alpha,
    diagonal_partials,
    parse_model,
)
from .sampler import JITTER_LADDER, GaussianPathSampler, NotPSD, replication_rng, sample_paths

__all__ = [
    "JITTER_LADDER",
    "CovarianceModel",
    "DiagonalPartials",
    "FunctionCovariance",
    "GaussianPathSampler",
    "NotAvailable",
    "NotPSD",
    "OrnsteinUhlenbeckCovariance",
    "ScaledCovariance",
    "Smoothness",
    "SquaredExponentialCovariance",
    "SumCovariance",
    "UnknownModel",
    "WienerCovariance",
    "alpha",
    "diagonal_partials",
    "parse_model",
    "replication_rng",
    "sample_paths",
]
