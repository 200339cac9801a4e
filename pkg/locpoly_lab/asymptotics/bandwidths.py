"""Closed-form asymptotically optimal bandwidths, pointwise and integrated."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import integrate

from locpoly_lab.covariance import CovarianceModel, Smoothness
from locpoly_lab.design import SamplingDensity, uniform_density
from locpoly_lab.kernels import KernelTableau
from locpoly_lab.smoothing import DerivativeTable

from .expansions import Route

logger = logging.getLogger(__name__)

GLOBAL_MESH = 201
CANCELLATION_TOLERANCE = 1e-9


class ZeroCurvature(ValueError):
    """The derivative driving the dominant bias term vanishes."""


class AlphaZero(ValueError):
    """No derivative jump on the diagonal; use the smooth-covariance formula instead."""


class OptimalDensityInUse(ValueError):
    """The design cancels the second-order bias; a higher-order expansion would be needed."""


class NotOptimizable(ValueError):
    """The truncated MSE has no interior minimum (wrong sign of the variance correction)."""


@dataclass(frozen=True)
class OptimalBandwidth:
    """``h = constant * n**rate`` with the ingredients that produced it."""

    h: float
    rate: float
    route: Route
    constants: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"h": self.h, "rate": self.rate, "route": self.route.value, **self.constants}


def _check_order(tableau: KernelTableau, nu: int, n: int) -> None:
    if nu not in (0, 1):
        raise ValueError(f"optimal bandwidth formulas cover nu in {{0, 1}}, got {nu}")
    if nu > tableau.p:
        raise ValueError(f"derivative order {nu} exceeds fit order {tableau.p}")
    if n < 1:
        raise ValueError(f"number of curves must be >= 1, got {n}")


def _bias_parts(
    tableau: KernelTableau,
    truth: DerivativeTable,
    f: SamplingDensity,
    points: np.ndarray,
    nu: int,
) -> Tuple[int, np.ndarray, np.ndarray]:
    """Order ``r`` of the dominant bias term and its curvature and design parts."""
    p = tableau.p
    scale = math.factorial(nu)
    m_next = np.asarray(truth[p + 1](points), dtype=float) * np.ones_like(points)
    if (p - nu) % 2:
        curvature = scale * m_next / math.factorial(p + 1) * tableau.bias_constant(nu)
        return p + 1 - nu, curvature, np.zeros_like(points)
    a, b = tableau.second_bias_constants(nu)
    m_after = np.asarray(truth[p + 2](points), dtype=float) * np.ones_like(points)
    curvature = scale * m_after / math.factorial(p + 2) * a
    design = scale * m_next / math.factorial(p + 1) * f.log_slope(points) * (a - b)
    return p + 2 - nu, curvature, np.asarray(design, dtype=float)


def _dominant_bias(squared: float, scale: float, where: str) -> None:
    if scale == 0.0:
        raise ZeroCurvature(f"the derivative driving the bias vanishes {where}")
    if squared <= CANCELLATION_TOLERANCE**2 * scale:
        raise OptimalDensityInUse(
            f"the sampling density cancels the second-order bias {where}; "
            "a higher-order expansion would be needed"
        )


def _rough_bandwidth(
    jump: float, form: float, order: int, bias_sq: float, n: int, nu: int
) -> Tuple[float, float]:
    numerator = -(2 * nu - 1) * math.factorial(nu) ** 2 * jump * form
    if not numerator > 0:
        raise NotOptimizable(
            f"variance correction {numerator:.4g} has the wrong sign for an interior minimum"
        )
    power = 2 * order + 2 * nu - 1
    return (numerator / (2 * order * bias_sq * n)) ** (1.0 / power), -1.0 / power


def _smooth_bandwidth(
    rho: float, form: float, order: int, bias_sq: float, n: int
) -> Tuple[float, float]:
    numerator = -rho * form
    if not numerator > 0:
        raise NotOptimizable(
            f"diagonal partial {rho:.4g} gives a variance that grows with h; "
            "the MSE cannot be optimized"
        )
    power = 2 * order - 2
    return (numerator / (order * bias_sq * n)) ** (1.0 / power), -1.0 / power


def _smooth_ingredients(tableau: KernelTableau, nu: int) -> Tuple[str, np.ndarray]:
    if nu == 0:
        return "rho02", tableau.A1
    return "rho13", tableau.A3


def h_opt_local(
    tableau: KernelTableau,
    model: CovarianceModel,
    truth: DerivativeTable,
    x: float,
    n: int,
    nu: int,
    f: Optional[SamplingDensity] = None,
) -> OptimalBandwidth:
    """Pointwise minimizer of the truncated MSE when the covariance has a diagonal jump.

    ``truth[k]`` evaluates ``m^(k)``. Covers every ``p`` for ``nu = 0`` and ``nu = 1``; for
    ``p - nu`` odd the rate is ``n^(-1/(2p+1))``, otherwise the ``g`` term sets
    ``n^(-1/(2p+3))``.
    """
    _check_order(tableau, nu, n)
    f = f or uniform_density()
    jump = model.alpha(x)
    if jump == 0.0:
        raise AlphaZero(f"alpha({x:.4g}) = 0 for covariance '{model.name}'")
    order, curvature, design = _bias_parts(tableau, truth, f, np.array([float(x)]), nu)
    coefficient = float(curvature[0] + design[0])
    _dominant_bias(
        coefficient**2, float(abs(curvature[0]) + abs(design[0])) ** 2, f"at x={x:.4g}"
    )
    form = tableau.abs_variance_constant(nu)
    h, rate = _rough_bandwidth(jump, form, order, coefficient**2, n, nu)
    return OptimalBandwidth(
        h=h,
        rate=rate,
        route=Route.ROUGH,
        constants={
            "alpha": jump,
            "bias_coefficient": coefficient,
            "bias_order": order,
            "abs_variance": form,
        },
    )


def h_opt_regular(
    tableau: KernelTableau,
    model: CovarianceModel,
    truth: DerivativeTable,
    x: float,
    n: int,
    nu: int,
) -> OptimalBandwidth:
    """Pointwise minimizer when the covariance is smooth on the diagonal (uniform design).

    Both cases give the rate ``n^(-1/2)`` at the lowest orders; the variance correction must
    decrease with ``h`` (``rho^(0,2) < 0`` or ``rho^(1,3) < 0``).
    """
    _check_order(tableau, nu, n)
    order, curvature, _ = _bias_parts(tableau, truth, uniform_density(), np.array([float(x)]), nu)
    coefficient = float(curvature[0])
    _dominant_bias(coefficient**2, coefficient**2, f"at x={x:.4g}")
    name, matrix = _smooth_ingredients(tableau, nu)
    rho = model.rho02(x) if nu == 0 else model.rho13(x)
    form = tableau.quadratic_form(matrix, nu)
    h, rate = _smooth_bandwidth(rho, form, order, coefficient**2, n)
    route = Route.SMOOTH_EVEN if nu == 0 else Route.SMOOTH_ODD
    return OptimalBandwidth(
        h=h,
        rate=rate,
        route=route,
        constants={
            name: rho,
            "bias_coefficient": coefficient,
            "bias_order": order,
            "form": form,
        },
    )


def h_opt_global(
    tableau: KernelTableau,
    model: Optional[CovarianceModel],
    truth: DerivativeTable,
    n: int,
    nu: int,
    weight: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    f: Optional[SamplingDensity] = None,
    mesh_size: int = GLOBAL_MESH,
    alpha_integral: Optional[float] = None,
    bias_integral: Optional[float] = None,
) -> OptimalBandwidth:
    """Minimizer of the weighted integrated truncated MSE.

    ``alpha`` and the squared bias coefficient are replaced by their ``w``-weighted integrals
    (composite Simpson on ``mesh_size`` points). Either integral may be supplied directly, as the
    plug-in selector does. With ``int alpha w = 0`` the smooth-covariance formula is integrated
    instead when the model declares the diagonal smoothness it needs.
    """
    _check_order(tableau, nu, n)
    if model is None and alpha_integral is None:
        raise ValueError("either a covariance model or alpha_integral is required")
    f = f or uniform_density()
    mesh = np.linspace(0.0, 1.0, mesh_size)
    w = np.ones_like(mesh) if weight is None else np.asarray(weight(mesh), dtype=float)
    w = w * np.ones_like(mesh)

    order, curvature, design = _bias_parts(tableau, truth, f, mesh, nu)
    if bias_integral is None:
        bias_sq = float(integrate.simpson((curvature + design) ** 2 * w, x=mesh))
        scale = float(integrate.simpson((np.abs(curvature) + np.abs(design)) ** 2 * w, x=mesh))
        _dominant_bias(bias_sq, scale, "on the whole interval")
    else:
        bias_sq = float(bias_integral)
        if not bias_sq > 0:
            raise ZeroCurvature(f"integrated squared bias coefficient is {bias_sq:.4g}")

    constants: Dict[str, float] = {"bias_integral": bias_sq, "bias_order": order}
    if alpha_integral is None and model.smoothness >= Smoothness.C2_DIAGONAL:
        jump_sq = 0.0
    elif alpha_integral is None:
        jumps = np.array([model.alpha(float(t)) for t in mesh])
        jump_sq = float(integrate.simpson(jumps * w, x=mesh))
    else:
        jump_sq = float(alpha_integral)

    if jump_sq != 0.0:
        form = tableau.abs_variance_constant(nu)
        h, rate = _rough_bandwidth(jump_sq, form, order, bias_sq, n, nu)
        constants.update(alpha_integral=jump_sq, abs_variance=form)
        route = Route.ROUGH
    elif model is not None and model.smoothness >= (
        Smoothness.C2_DIAGONAL if nu == 0 else Smoothness.C4_DIAGONAL
    ):
        name, matrix = _smooth_ingredients(tableau, nu)
        partial = model.rho02 if nu == 0 else model.rho13
        rho = float(integrate.simpson(np.array([partial(float(t)) for t in mesh]) * w, x=mesh))
        form = tableau.quadratic_form(matrix, nu)
        h, rate = _smooth_bandwidth(rho, form, order, bias_sq, n)
        constants.update({f"{name}_integral": rho, "form": form})
        route = Route.SMOOTH_EVEN if nu == 0 else Route.SMOOTH_ODD
        logger.debug("int alpha w = 0 for '%s'; using the smooth-diagonal formula", model.name)
    else:
        label = model.name if model is not None else "supplied"
        raise AlphaZero(f"int alpha w = 0 for covariance '{label}'")
    return OptimalBandwidth(h=h, rate=rate, route=route, constants=constants)
