"""The covariance matrix of the weighted design sums and its small-bandwidth expansion."""

from __future__ import annotations

import numpy as np

from locpoly_lab.covariance import CovarianceModel
from locpoly_lab.design import DesignGrid, SamplingDensity
from locpoly_lab.kernels import Kernel, KernelTableau


def sn_star_finite(
    model: CovarianceModel, grid: DesignGrid, kernel: Kernel, p: int, x: float, h: float
) -> np.ndarray:
    """Finite sum ``d^2 sum_ij (x_i-x)^k (x_j-x)^l K_h K_h rho(x_i, x_j)`` with ``d = 1/(N-1)``."""
    points = np.asarray(grid.points, dtype=float)
    offsets = points - x
    weights = kernel(offsets / h) / h
    active = np.flatnonzero(weights)
    local = points[active]
    basis = np.vander(offsets[active], p + 1, increasing=True) * weights[active, None]
    block = model.matrix(local)
    return grid.spacing**2 * basis.T @ block @ basis


def sn_star_expansion(
    tableau: KernelTableau, model: CovarianceModel, f: SamplingDensity, x: float, h: float
) -> np.ndarray:
    """``H {phi S* + h (phi01+ - phi01-) A + h (phi01+ + phi01-) B} H`` with ``phi = rho f f``."""
    fx = float(f(x))
    rho = float(model.variance(x))
    cross = rho * fx * float(f.slope(x))
    right = fx**2 * model.partial_right(x) + cross
    left = fx**2 * model.partial_left(x) + cross
    inner = (
        rho * fx**2 * tableau.S_star
        + h * (right - left) * tableau.A
        + h * (right + left) * tableau.B
    )
    scaling = h ** np.arange(tableau.p + 1)
    return scaling[:, None] * inner * scaling[None, :]
