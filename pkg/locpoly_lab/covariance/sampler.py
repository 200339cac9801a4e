"""Zero-mean Gaussian sample paths on a fixed grid."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from scipy import linalg

from .models import CovarianceModel

logger = logging.getLogger(__name__)

JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)


class NotPSD(RuntimeError):
    """Raised when the grid covariance cannot be factorized even with the largest jitter."""


def replication_rng(seed: int, replication: int = 0) -> np.random.Generator:
    """Independent stream for one replication, identical however the work is split."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replication,)))


def _grid_points(grid) -> np.ndarray:
    points = np.asarray(getattr(grid, "points", grid), dtype=float)
    if points.ndim != 1 or points.size < 1:
        raise ValueError("grid must be a non-empty one-dimensional sequence")
    if np.any(np.diff(points) <= 0):
        raise ValueError("grid must be strictly increasing")
    return points


class GaussianPathSampler:
    """Cholesky factor of the grid covariance, reused for every draw.

    ``jitter`` records the diagonal loading that made the factorization succeed.
    """

    def __init__(self, model: CovarianceModel, grid: Sequence[float]) -> None:
        self.model = model
        self.points = _grid_points(grid)
        self.covariance = model.matrix(self.points)
        self.factor, self.jitter = self._factorize(self.covariance)

    def _factorize(self, matrix: np.ndarray):
        size = matrix.shape[0]
        if not np.any(matrix):
            return np.zeros_like(matrix), 0.0
        for jitter in JITTER_LADDER:
            try:
                factor = linalg.cholesky(matrix + jitter * np.eye(size), lower=True)
            except linalg.LinAlgError:
                logger.debug("cholesky of '%s' failed with jitter %.0e", self.model.name, jitter)
                continue
            if jitter:
                logger.debug("factorized '%s' with jitter %.0e", self.model.name, jitter)
            return factor, jitter
        raise NotPSD(
            f"covariance '{self.model.name}' is not positive semidefinite on a "
            f"{size}-point grid (jitter up to {JITTER_LADDER[-1]:.0e})"
        )

    @property
    def size(self) -> int:
        return self.points.size

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` independent paths as rows of an ``n x N`` matrix."""
        if n < 0:
            raise ValueError("number of paths must be non-negative")
        return rng.standard_normal((n, self.size)) @ self.factor.T

    def draw_mean(self, rng: np.random.Generator, n: int, size: int) -> np.ndarray:
        """``size`` draws of the average of ``n`` paths, without simulating the paths."""
        if n < 1:
            raise ValueError("mean of paths needs n >= 1")
        return (rng.standard_normal((size, self.size)) / np.sqrt(n)) @ self.factor.T


def sample_paths(model: CovarianceModel, grid: Sequence[float], n: int, seed: int) -> np.ndarray:
    return GaussianPathSampler(model, grid).draw(replication_rng(seed), n)
