"""Exact finite-sample bias and variance of the estimator through its smoother weights."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from locpoly_lab.covariance import CovarianceModel

from .fit import weight_row
from .sample import FitSpec

DerivativeTable = Sequence[Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class ExactMoments:
    bias: float
    variance: float

    @property
    def mse(self) -> float:
        return self.bias**2 + self.variance


def exact_moments(
    truth: DerivativeTable,
    model: CovarianceModel,
    grid,
    spec: FitSpec,
    x: float,
    n: int,
) -> ExactMoments:
    """Bias ``w @ m(grid) - m^(nu)(x)`` and variance ``w' Sigma w / n`` at ``x``.

    ``truth[k]`` evaluates ``m^(k)``. Only the covariance block under the window is formed.
    """
    if n < 1:
        raise ValueError("exact moments need n >= 1")
    points = np.asarray(getattr(grid, "points", grid), dtype=float)
    weights = weight_row(points, spec, float(x))
    bias = float(weights @ np.asarray(truth[0](points), dtype=float) - truth[spec.nu](float(x)))
    active = np.flatnonzero(weights)
    local = points[active]
    block = np.asarray(model(local[:, None], local[None, :]), dtype=float)
    w = weights[active]
    return ExactMoments(bias=bias, variance=float(w @ block @ w) / n)
