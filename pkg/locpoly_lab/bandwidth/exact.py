"""Oracle bandwidth: exact integrated MSE from the linear-smoother weights."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from locpoly_lab.covariance import CovarianceModel
from locpoly_lab.design import DesignGrid
from locpoly_lab.kernels import Kernel, kernel_from_id
from locpoly_lab.smoothing import (
    DerivativeTable,
    FitSpec,
    LocalFitError,
    is_unbounded,
    smoother_matrix,
)

from .result import (
    LADDER_SIZE,
    AllCandidatesInfeasible,
    BandwidthResult,
    SelectionMethod,
    candidate_ladder,
    diagnostics_for,
    select_minimizer,
)

logger = logging.getLogger(__name__)

IMSE_MESH = 101
REFINE_TOLERANCE = 1e-4


@dataclass(frozen=True)
class ImsePoint:
    h: float
    bias2: float
    variance: float

    @property
    def imse(self) -> float:
        return self.bias2 + self.variance


class ImseObjective:
    """``h -> (int bias^2 w, int variance w)`` over a fixed evaluation mesh."""

    def __init__(
        self,
        truth: DerivativeTable,
        model: CovarianceModel,
        grid: DesignGrid,
        n: int,
        nu: int,
        p: int,
        kernel: Kernel,
        weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        mesh_size: int = IMSE_MESH,
    ) -> None:
        if n < 1:
            raise ValueError("exact IMSE needs n >= 1")
        self.grid = grid
        self.n = n
        self.spec = FitSpec(p=p, nu=nu, h=1.0, kernel=kernel)
        self.mesh = np.linspace(0.0, 1.0, mesh_size)
        w = np.ones_like(self.mesh) if weight is None else np.asarray(weight(self.mesh), float)
        self.weight = w * np.ones_like(self.mesh)
        self.values = np.asarray(truth[0](grid.points), dtype=float) * np.ones(len(grid))
        self.target = np.asarray(truth[nu](self.mesh), dtype=float) * np.ones_like(self.mesh)
        self.covariance = model.matrix(grid.points)

    def point(self, h: float) -> ImsePoint:
        W = smoother_matrix(self.grid, self.spec.with_bandwidth(h), self.mesh)
        bias = W @ self.values - self.target
        variance = np.einsum("ij,jk,ik->i", W, self.covariance, W) / self.n
        return ImsePoint(
            h=h,
            bias2=float(integrate.simpson(bias**2 * self.weight, x=self.mesh)),
            variance=float(integrate.simpson(variance * self.weight, x=self.mesh)),
        )

    def __call__(self, h: float) -> float:
        try:
            return self.point(h).imse
        except LocalFitError:
            return np.inf


def _profile(objective: ImseObjective, candidates: Sequence[float], workers: int) -> List:
    def evaluate(h):
        try:
            return objective.point(h)
        except LocalFitError as exc:
            logger.debug("skipping h=%.4g: %s", h, exc)
            return None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(evaluate, candidates))
    return [evaluate(h) for h in candidates]


def imse_profile(
    truth: DerivativeTable,
    model: CovarianceModel,
    grid: DesignGrid,
    n: int,
    nu: int,
    p: int,
    kernel: Kernel | str = "truncated-gaussian",
    weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    candidates: Optional[Sequence[float]] = None,
    workers: int = 1,
) -> List[ImsePoint]:
    """Integrated squared bias and variance at each feasible candidate."""
    kernel = kernel_from_id(kernel) if isinstance(kernel, str) else kernel
    objective = ImseObjective(truth, model, grid, n, nu, p, kernel, weight)
    if candidates is None:
        candidates = candidate_ladder(len(grid), p, kernel.tau)
    return [point for point in _profile(objective, candidates, workers) if point is not None]


def exact_optimal_bandwidth(
    truth: DerivativeTable,
    model: CovarianceModel,
    grid: DesignGrid,
    n: int,
    nu: int,
    p: int,
    kernel: Kernel | str = "truncated-gaussian",
    weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ladder_size: int = LADDER_SIZE,
    tolerance: float = REFINE_TOLERANCE,
    workers: int = 1,
) -> BandwidthResult:
    """Minimize the exact IMSE over the candidate ladder, then refine inside the best bracket."""
    kernel = kernel_from_id(kernel) if isinstance(kernel, str) else kernel
    objective = ImseObjective(truth, model, grid, n, nu, p, kernel, weight)
    candidates = candidate_ladder(len(grid), p, kernel.tau, ladder_size)
    points = _profile(objective, candidates, workers)
    curve = [(h, point.imse if point else np.inf) for h, point in zip(candidates, points)]
    skipped = sum(point is None for point in points)
    try:
        index = select_minimizer(curve)
    except AllCandidatesInfeasible as exc:
        raise AllCandidatesInfeasible(f"exact IMSE: {exc}") from exc

    finite = len(candidates) - 1
    if not is_unbounded(curve[index][0]):
        lower = curve[max(index - 1, 0)][0]
        upper = curve[min(index + 1, finite - 1)][0]
        if upper > lower:
            refined = optimize.minimize_scalar(
                objective, bounds=(lower, upper), method="bounded", options={"xatol": tolerance}
            )
            if np.isfinite(refined.fun) and refined.fun < curve[index][1]:
                curve.append((float(refined.x), float(refined.fun)))
                index = len(curve) - 1

    h = curve[index][0]
    logger.debug("exact IMSE minimizer h=%s (score %.6g)", h, curve[index][1])
    return BandwidthResult(
        h=h,
        method=SelectionMethod.EXACT,
        objective=tuple(curve),
        diagnostics=diagnostics_for(curve, index, skipped),
    )
