"""Local polynomial regression for functional data: estimators, bandwidths and simulations."""

__all__ = [
    "kernels",
    "covariance",
    "design",
    "smoothing",
    "asymptotics",
    "bandwidth",
    "simlab",
    "telemetry",
    "io",
]
__version__ = "0.1.0"
