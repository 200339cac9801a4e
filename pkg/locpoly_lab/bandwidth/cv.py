"""Leave-one-curve-out cross-validation."""

from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence

import numpy as np

from locpoly_lab.design import DesignGrid
from locpoly_lab.kernels import Kernel, kernel_from_id
from locpoly_lab.smoothing import FitSpec, FunctionalSample, LocalFitError, smoother_matrix

from .result import (
    AllCandidatesInfeasible,
    BandwidthResult,
    SelectionMethod,
    candidate_ladder,
    diagnostics_for,
    select_minimizer,
)

logger = logging.getLogger(__name__)


class CrossValidator:
    """Smoother matrices of the level fit at the design points, built once per candidate.

    The matrices depend on the grid only, so one instance scores any number of samples.
    """

    def __init__(
        self,
        grid: DesignGrid,
        p: int,
        kernel: Kernel | str = "truncated-gaussian",
        candidates: Optional[Sequence[float]] = None,
    ) -> None:
        kernel = kernel_from_id(kernel) if isinstance(kernel, str) else kernel
        self.grid = grid
        self.candidates = list(
            candidates if candidates is not None else candidate_ladder(len(grid), p, kernel.tau)
        )
        spec = FitSpec(p=p, nu=0, h=1.0, kernel=kernel)
        self.smoothers: Dict[int, np.ndarray] = {}
        for i, h in enumerate(self.candidates):
            try:
                self.smoothers[i] = smoother_matrix(grid, spec.with_bandwidth(h), grid.points)
            except LocalFitError as exc:
                logger.debug("cross-validation skips h=%.4g: %s", h, exc)
        if not self.smoothers:
            raise AllCandidatesInfeasible(
                f"no candidate bandwidth is feasible for a degree-{p} fit on {len(grid)} points"
            )

    def score(self, values: np.ndarray, index: int) -> float:
        """Mean squared leave-one-curve-out error; ``Ybar^(-i) = (n Ybar - Y_i) / (n - 1)``."""
        W = self.smoothers[index]
        n = values.shape[0]
        pooled = W @ values.mean(axis=0)
        predictions = (n * pooled[None, :] - values @ W.T) / (n - 1)
        return float(np.mean((predictions - values) ** 2))

    def __call__(self, sample: FunctionalSample) -> BandwidthResult:
        if sample.n < 2:
            raise ValueError("leave-one-curve-out cross-validation needs n >= 2")
        if sample.N != len(self.grid):
            raise ValueError("sample and cross-validator use different design grids")
        curve = [
            (h, self.score(sample.values, i) if i in self.smoothers else np.inf)
            for i, h in enumerate(self.candidates)
        ]
        index = select_minimizer(curve)
        return BandwidthResult(
            h=curve[index][0],
            method=SelectionMethod.CV,
            objective=tuple(curve),
            diagnostics=diagnostics_for(curve, index, len(self.candidates) - len(self.smoothers)),
        )


def cross_validate(
    sample: FunctionalSample,
    p: int,
    kernel: Kernel | str = "truncated-gaussian",
    candidates: Optional[Sequence[float]] = None,
) -> BandwidthResult:
    return CrossValidator(sample.grid, p, kernel, candidates)(sample)
