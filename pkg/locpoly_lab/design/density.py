"""Sampling densities on [0, 1] and the quantile grids they generate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

CHECK_MESH = 1001
ROOT_TOLERANCE = 1e-12
DERIVATIVE_STEP = 1e-5

Function = Callable[[np.ndarray], np.ndarray]


class BadDensity(ValueError):
    """Raised when a sampling density is not strictly positive on [0, 1]."""


@dataclass(frozen=True)
class SamplingDensity:
    """Density ``f`` of the design points, with optional derivative and distribution function.

    Missing pieces are filled numerically: ``cdf`` by adaptive quadrature of ``pdf``, ``f'`` by
    central differences kept inside [0, 1].
    """

    name: str
    pdf: Function
    derivative: Optional[Function] = None
    cdf: Optional[Function] = None

    def __call__(self, x):
        return self.pdf(np.asarray(x, dtype=float))

    def cumulative(self, x: float) -> float:
        if self.cdf is not None:
            return float(self.cdf(np.asarray(x, dtype=float)))
        value, _ = integrate.quad(
            lambda t: float(self.pdf(np.asarray(t))), 0.0, float(x), epsabs=1e-13, limit=200
        )
        return value

    def slope(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.derivative is not None:
            return self.derivative(x)
        lo = np.clip(x - DERIVATIVE_STEP, 0.0, 1.0)
        hi = np.clip(x + DERIVATIVE_STEP, 0.0, 1.0)
        return (self.pdf(hi) - self.pdf(lo)) / (hi - lo)

    def log_slope(self, x) -> np.ndarray:
        """``f'(x) / f(x)``."""
        return self.slope(x) / self(x)

    @property
    def is_uniform(self) -> bool:
        return self.name == "uniform"


def uniform_density() -> SamplingDensity:
    return SamplingDensity(
        name="uniform",
        pdf=lambda x: np.ones_like(x, dtype=float),
        derivative=lambda x: np.zeros_like(x, dtype=float),
        cdf=lambda x: np.clip(x, 0.0, 1.0),
    )


def linear_density(a: float) -> SamplingDensity:
    """``f(t) = (1 + a t) / (1 + a/2)``; positive on [0, 1] for ``a > -1``."""
    if not a > -1.0:
        raise BadDensity(f"linear:{a} vanishes inside [0, 1]")
    norm = 1.0 + 0.5 * a
    return SamplingDensity(
        name=f"linear:{np.format_float_positional(float(a), trim='-')}",
        pdf=lambda x: (1.0 + a * x) / norm,
        derivative=lambda x: np.full_like(x, a / norm, dtype=float),
        cdf=lambda x: (x + 0.5 * a * x * x) / norm,
    )


def empirical_density(points) -> SamplingDensity:
    """Piecewise-constant density whose distribution function interpolates a grid's quantiles."""
    points = np.asarray(getattr(points, "points", points), dtype=float)
    levels = np.linspace(0.0, 1.0, points.size)
    heights = np.diff(levels) / np.diff(points)

    def pdf(x):
        cell = np.clip(np.searchsorted(points, x, side="right") - 1, 0, heights.size - 1)
        return heights[cell]

    return SamplingDensity(
        name="empirical",
        pdf=pdf,
        derivative=lambda x: np.zeros_like(x, dtype=float),
        cdf=lambda x: np.interp(x, points, levels),
    )


def density_from_id(identifier: str) -> SamplingDensity:
    """``uniform`` or ``linear:<a>``; the optimal density is built by ``optimal_density``."""
    family, _, argument = identifier.strip().partition(":")
    if family == "uniform" and not argument:
        return uniform_density()
    if family == "linear" and argument:
        try:
            return linear_density(float(argument))
        except ValueError as exc:
            if isinstance(exc, BadDensity):
                raise
            raise BadDensity(f"Invalid slope in density id '{identifier}'") from exc
    raise BadDensity(f"Unknown density id '{identifier}'")


@dataclass(frozen=True, eq=False)
class DesignGrid:
    """Sorted, strictly increasing design points with the id of the density that produced them."""

    points: np.ndarray
    density: str = "uniform"

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=float)
        if points.ndim != 1 or points.size < 1:
            raise ValueError("design grid must be a non-empty one-dimensional sequence")
        if not np.all(np.isfinite(points)):
            raise ValueError("design grid contains non-finite points")
        if np.any(np.diff(points) <= 0):
            raise ValueError("design grid must be strictly increasing (no duplicated points)")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.points, dtype=dtype)

    @property
    def spacing(self) -> float:
        """Nominal spacing ``1/(N-1)`` of the quantile levels."""
        return 1.0 / (self.points.size - 1) if self.points.size > 1 else 1.0


def check_density(f: SamplingDensity, mesh_size: int = CHECK_MESH) -> None:
    mesh = np.linspace(0.0, 1.0, mesh_size)
    values = np.asarray(f(mesh), dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        worst = mesh[np.argmin(np.where(np.isfinite(values), values, -np.inf))]
        raise BadDensity(f"density '{f.name}' is not positive on [0, 1] (near x={worst:.4g})")


def quantile_grid(f: SamplingDensity, N: int) -> DesignGrid:
    """Points with ``F(x_j) = (j-1)/(N-1)``: closed form when uniform, Brent roots otherwise."""
    if N < 2:
        raise ValueError("a quantile grid needs N >= 2")
    check_density(f)
    if f.is_uniform:
        return DesignGrid(np.linspace(0.0, 1.0, N), density=f.name)

    levels = np.linspace(0.0, 1.0, N)
    points = np.empty(N)
    points[0], points[-1] = 0.0, 1.0
    for j in range(1, N - 1):
        points[j] = optimize.brentq(
            lambda x, q=levels[j]: f.cumulative(x) - q, 0.0, 1.0, xtol=ROOT_TOLERANCE
        )
    return DesignGrid(points, density=f.name)
