"""Observed curves and the configuration of a local polynomial fit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from locpoly_lab.design import DesignGrid
from locpoly_lab.kernels import MAX_ORDER, Kernel, kernel_from_id

UNBOUNDED = math.inf


def is_unbounded(h: float) -> bool:
    return math.isinf(h)


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """``n`` curves observed on a common design grid; ``values`` is ``n x N``."""

    grid: DesignGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = self.grid if isinstance(self.grid, DesignGrid) else DesignGrid(self.grid)
        values = np.array(self.values, dtype=float, ndmin=2)
        if values.ndim != 2 or values.shape[1] != len(grid):
            raise ValueError(
                f"values must be n x {len(grid)} to match the design grid, got {values.shape}"
            )
        if values.shape[0] < 1:
            raise ValueError("a functional sample needs at least one curve")
        if not np.all(np.isfinite(values)):
            raise ValueError("curve values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    def mean_curve(self) -> np.ndarray:
        return self.values.mean(axis=0)


@dataclass(frozen=True)
class FitSpec:
    """Order ``p``, derivative ``nu``, bandwidth ``h`` (or ``UNBOUNDED``) and kernel."""

    p: int
    nu: int
    h: float
    kernel: Union[str, Kernel] = "truncated-gaussian"

    def __post_init__(self) -> None:
        if not 0 <= self.p <= MAX_ORDER:
            raise ValueError(f"fit order p={self.p} outside 0..{MAX_ORDER}")
        if not 0 <= self.nu <= self.p:
            raise ValueError(f"derivative order nu={self.nu} must lie in 0..p={self.p}")
        if not self.h > 0:
            raise ValueError(f"bandwidth must be positive or UNBOUNDED, got {self.h}")
        if isinstance(self.kernel, str):
            object.__setattr__(self, "kernel", kernel_from_id(self.kernel))

    @property
    def unbounded(self) -> bool:
        return is_unbounded(self.h)

    def with_bandwidth(self, h: float) -> "FitSpec":
        return FitSpec(p=self.p, nu=self.nu, h=h, kernel=self.kernel)
