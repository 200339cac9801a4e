"""Plug-in bandwidth: quadratic variation for alpha, a pilot fit for the bias derivatives.

The pilot is a heuristic of this package: a degree ``min(p + 3, 4, N - 1)`` fit with bandwidth
``N^(-1/(2p+5))`` estimates ``m^(p+1)`` and ``m^(p+2)`` on the integration mesh.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from locpoly_lab.asymptotics import GLOBAL_MESH, h_opt_global
from locpoly_lab.kernels import MAX_ORDER, Kernel, build_tableau, kernel_from_id
from locpoly_lab.smoothing import FitSpec, FunctionalSample, curve_estimate

from .result import BandwidthResult, SelectionMethod

logger = logging.getLogger(__name__)

Weight = Callable[[np.ndarray], np.ndarray]


def quadratic_variation(sample: FunctionalSample, weight: Optional[Weight] = None) -> float:
    """``(1/n) sum_i sum_j (Y_i(x_j) - Y_i(x_{j-1}))^2 w(x_j)``, an estimate of ``int alpha w``."""
    if sample.N < 2:
        raise ValueError("quadratic variation needs N >= 2")
    points = sample.points[1:]
    w = np.ones_like(points) if weight is None else np.asarray(weight(points), dtype=float)
    increments = np.diff(sample.values, axis=1)
    return float(np.sum(increments**2 * w) / sample.n)


def pilot_bandwidth(N: int, p: int) -> float:
    return float(N ** (-1.0 / (2 * p + 5)))


def _pilot_table(
    sample: FunctionalSample, p: int, orders, kernel: Kernel, h: float, mesh: np.ndarray
) -> dict:
    degree = min(p + 3, MAX_ORDER, sample.N - 1)
    table = {}
    for order in orders:
        if order > degree:
            raise ValueError(
                f"a degree-{degree} pilot fit cannot estimate m^({order}); "
                "plug-in selection supports p <= 2"
            )
        spec = FitSpec(p=degree, nu=order, h=h, kernel=kernel)
        estimates = np.array([value for _, value in curve_estimate(sample, spec, mesh)])
        table[order] = lambda x, values=estimates: np.interp(x, mesh, values)
    return table


def plugin_bandwidth(
    sample: FunctionalSample,
    nu: int,
    p: int,
    kernel: Kernel | str = "truncated-gaussian",
    weight: Optional[Weight] = None,
    pilot: Optional[float] = None,
) -> BandwidthResult:
    if sample.n < 2:
        raise ValueError("plug-in selection needs n >= 2")
    if sample.N < p + 3:
        raise ValueError(f"plug-in selection needs N >= p + 3 = {p + 3}")
    kernel = kernel_from_id(kernel) if isinstance(kernel, str) else kernel
    tableau = build_tableau(kernel, p)
    pilot = pilot_bandwidth(sample.N, p) if pilot is None else float(pilot)

    alpha_hat = quadratic_variation(sample, weight)
    orders = (p + 1,) if (p - nu) % 2 else (p + 1, p + 2)
    mesh = np.linspace(0.0, 1.0, GLOBAL_MESH)
    table = _pilot_table(sample, p, orders, kernel, pilot, mesh)
    logger.debug("plug-in: alpha_hat=%.6g pilot h=%.4g", alpha_hat, pilot)

    formula = h_opt_global(
        tableau, None, table, sample.n, nu, weight=weight, alpha_integral=alpha_hat
    )
    return BandwidthResult(
        h=formula.h,
        method=SelectionMethod.PLUGIN,
        objective=(),
        diagnostics={"pilot": pilot, **formula.to_dict()},
    )
