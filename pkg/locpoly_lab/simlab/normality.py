"""Monte Carlo check of the pointwise limit distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from locpoly_lab.asymptotics import NormalityParams, normality_params
from locpoly_lab.covariance import GaussianPathSampler, replication_rng
from locpoly_lab.smoothing import weight_row

from .config import ExperimentConfig
from .runner import ExperimentSetup


class ConditionViolated(ValueError):
    """Raised when ``n h^decay`` is too large for the bias to be negligible."""


@dataclass(frozen=True)
class NormalityResult:
    statistic: float
    pvalue: float
    sigma: float
    scale: float
    params: NormalityParams

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "pvalue": self.pvalue,
            "sigma": self.sigma,
            "scale": self.scale,
            **self.params.to_dict(),
        }


def normality_check(
    config: ExperimentConfig,
    x: float,
    M: int,
    h: float,
    sigma: Optional[float] = None,
    seed: Optional[int] = None,
) -> NormalityResult:
    """Kolmogorov-Smirnov distance between ``M`` standardized estimates and ``N(0, 1)``.

    Only the design points under the kernel window at ``x`` are simulated; the estimate
    ``w @ (m + mean of n paths)`` depends on nothing else. ``sigma`` defaults to the square
    root of the limit variance.
    """
    if M < 2:
        raise ValueError("a normality check needs M >= 2 draws")
    setup = ExperimentSetup(config)
    params = normality_params(setup.tableau, setup.model, x, config.nu)
    if not params.condition_holds(config.n, h):
        raise ConditionViolated(
            f"n h^{params.decay_exponent} = {params.decay(config.n, h):.3g} is not small "
            f"(n={config.n}, h={h:.4g}); the bias would dominate the limit"
        )
    sigma = math.sqrt(params.variance) if sigma is None else float(sigma)
    if not sigma > 0:
        raise ValueError(f"limit standard deviation must be positive, got {sigma}")

    points = setup.grid.points
    weights = weight_row(points, setup.spec.with_bandwidth(h), x)
    active = np.flatnonzero(weights)
    sampler = GaussianPathSampler(setup.model, points[active])
    rng = replication_rng(config.seed if seed is None else seed)
    noise = sampler.draw_mean(rng, config.n, M)
    signal = weights[active] @ setup.mean_values[active]
    estimates = signal + noise @ weights[active]

    target = float(setup.regression[config.nu](x))
    scale = params.scale(config.n, h)
    standardized = (estimates - target) * scale / sigma
    result = stats.kstest(standardized, "norm")
    return NormalityResult(
        statistic=float(result.statistic),
        pvalue=float(result.pvalue),
        sigma=sigma,
        scale=scale,
        params=params,
    )
