"""Pointwise local polynomial fits written as linear smoothers of the mean curve."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import linalg

from .sample import FitSpec, FunctionalSample

MAX_CONDITION = 1e12


class LocalFitError(RuntimeError):
    """Base class for failures of the local least-squares problem at a point ``x``."""

    def __init__(self, message: str, x: float | None = None) -> None:
        super().__init__(message)
        self.x = x


class BandwidthTooSmall(LocalFitError):
    """Fewer than ``p + 1`` design points carry positive kernel weight."""


class RankDeficient(LocalFitError):
    """The weighted normal matrix is numerically singular."""


@dataclass(frozen=True, eq=False)
class LocalFit:
    """Solution at one point: coefficients of ``m(x) + m'(x) t + ...`` and the smoother row.

    ``weights`` satisfy ``estimate == weights @ mean_curve``.
    """

    x: float
    nu: int
    coefficients: np.ndarray
    weights: np.ndarray
    effective_points: int
    estimate: float


def coefficient_rows(points: np.ndarray, spec: FitSpec, x: float) -> Tuple[np.ndarray, int]:
    """Rows ``L`` with ``beta_hat = L @ ybar`` and the number of points inside the window.

    The normal equations use the scaled basis ``((x_j - x)/h)^k``; rows are mapped back to the
    coefficients of ``(x_j - x)^k`` before returning.
    """
    p = spec.p
    offsets = points - x
    if spec.unbounded:
        basis_arg = offsets
        kernel_weights = np.ones_like(points)
    else:
        basis_arg = offsets / spec.h
        kernel_weights = spec.kernel(basis_arg) / spec.h

    active = kernel_weights > 0
    count = int(active.sum())
    if count < p + 1:
        raise BandwidthTooSmall(
            f"only {count} design points inside the window at x={x:.6g} (h={spec.h:.4g}); "
            f"a degree-{p} fit needs {p + 1}",
            x=x,
        )

    design = np.vander(basis_arg[active], p + 1, increasing=True)
    weighted = design * kernel_weights[active, None]
    normal = design.T @ weighted
    condition = np.linalg.cond(normal)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise RankDeficient(
            f"normal matrix at x={x:.6g} (h={spec.h:.4g}) has condition {condition:.3g}", x=x
        )
    factor = linalg.cho_factor(normal)
    rows = np.zeros((p + 1, points.size))
    rows[:, active] = linalg.cho_solve(factor, weighted.T)
    if not spec.unbounded:
        rows /= spec.h ** np.arange(p + 1)[:, None]
    return rows, count


def weight_row(points: np.ndarray, spec: FitSpec, x: float) -> np.ndarray:
    """Row ``w`` with ``m_hat_nu(x) = w @ ybar``."""
    rows, _ = coefficient_rows(points, spec, x)
    return math.factorial(spec.nu) * rows[spec.nu]


def pointwise_fit(sample: FunctionalSample, spec: FitSpec, x: float) -> LocalFit:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"evaluation point {x} outside [0, 1]")
    rows, count = coefficient_rows(sample.points, spec, float(x))
    ybar = sample.mean_curve()
    weights = math.factorial(spec.nu) * rows[spec.nu]
    return LocalFit(
        x=float(x),
        nu=spec.nu,
        coefficients=rows @ ybar,
        weights=weights,
        effective_points=count,
        estimate=float(weights @ ybar),
    )


def smoother_matrix(grid, spec: FitSpec, eval_points: Sequence[float]) -> np.ndarray:
    """Stack the weight rows for every evaluation point: ``estimates = W @ ybar``."""
    points = np.asarray(getattr(grid, "points", grid), dtype=float)
    eval_points = np.asarray(eval_points, dtype=float)
    outside = eval_points[(eval_points < 0.0) | (eval_points > 1.0)]
    if outside.size:
        raise ValueError(f"evaluation point {outside[0]} outside [0, 1]")
    matrix = np.empty((eval_points.size, points.size))
    for i, x in enumerate(eval_points):
        matrix[i] = weight_row(points, spec, float(x))
    return matrix


def curve_estimate(
    sample: FunctionalSample, spec: FitSpec, eval_grid: Sequence[float]
) -> List[Tuple[float, float]]:
    """``(x, m_hat_nu(x))`` for each point of ``eval_grid``; windows shrink at the boundary."""
    eval_points = np.asarray(eval_grid, dtype=float).ravel()
    if eval_points.size == 0:
        return []
    estimates = smoother_matrix(sample.grid, spec, eval_points) @ sample.mean_curve()
    return [(float(x), float(value)) for x, value in zip(eval_points, estimates)]
