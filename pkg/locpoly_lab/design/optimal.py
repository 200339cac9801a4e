"""Bias-optimal sampling density and the second-order bias function it cancels."""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from locpoly_lab.kernels import KernelTableau

from .density import SamplingDensity

VANISHING_TOLERANCE = 1e-10
DERIVATIVE_MESH = 201

Function = Callable[[np.ndarray], np.ndarray]


class VanishingDerivative(ValueError):
    """Raised when ``m^(p+1)`` has a zero on [0, 1], so the optimal density is undefined."""


class WrongParity(ValueError):
    """Raised for ``p - nu`` odd: the second-order bias does not depend on the design there."""


def design_exponent(tableau: KernelTableau, nu: int) -> float:
    """``gamma / (p + 2)``, the power of ``|m^(p+1)|`` in the optimal density."""
    if (tableau.p - nu) % 2:
        raise WrongParity(
            f"p - nu = {tableau.p - nu} is odd; the second-order bias vanishes for every design"
        )
    a, b = tableau.second_bias_constants(nu)
    return a / (b - a) / (tableau.p + 2)


def optimal_density(
    tableau: KernelTableau,
    nu: int,
    m_next: Function,
    m_after: Optional[Function] = None,
) -> SamplingDensity:
    """Density proportional to ``|m^(p+1)|^(gamma/(p+2))`` that cancels the second bias term.

    ``m_next`` is ``m^(p+1)``; when ``m_after`` (``m^(p+2)``) is given the density carries an
    exact derivative, otherwise ``f'`` falls back to central differences.
    """
    exponent = design_exponent(tableau, nu)
    mesh = np.linspace(0.0, 1.0, DERIVATIVE_MESH)
    magnitude = np.abs(np.asarray(m_next(mesh), dtype=float))
    if np.any(magnitude < VANISHING_TOLERANCE):
        where = mesh[np.argmin(magnitude)]
        raise VanishingDerivative(
            f"m^({tableau.p + 1}) vanishes near x={where:.4g}; the optimal density is undefined"
        )

    def shape(x):
        return np.abs(np.asarray(m_next(np.asarray(x, dtype=float)), dtype=float)) ** exponent

    mass, _ = integrate.quad(lambda t: float(shape(t)), 0.0, 1.0, epsabs=1e-13, limit=200)

    def pdf(x):
        return shape(x) / mass

    def slope(x):
        x = np.asarray(x, dtype=float)
        return pdf(x) * exponent * np.asarray(m_after(x)) / np.asarray(m_next(x))

    def cdf(x):
        value, _ = integrate.quad(
            lambda t: float(shape(t)), 0.0, float(x), epsabs=1e-13, limit=200
        )
        return value / mass

    return SamplingDensity(
        name="optimal",
        pdf=pdf,
        derivative=slope if m_after is not None else None,
        cdf=cdf,
    )


def g_function(
    tableau: KernelTableau,
    nu: int,
    m_next,
    m_after,
    f: SamplingDensity,
    x,
) -> np.ndarray:
    """Second-order bias function; ``m_next``/``m_after`` are ``m^(p+1)``/``m^(p+2)`` callables.

    Zero wherever ``p - nu`` is odd (both kernel constants vanish by parity).
    """
    x = np.asarray(x, dtype=float)
    p = tableau.p
    a, b = tableau.second_bias_constants(nu)
    if a == 0.0 and b == 0.0:
        return np.zeros_like(x)
    curvature = np.asarray(m_after(x), dtype=float) / math.factorial(p + 2) * a
    design = np.asarray(m_next(x), dtype=float) / math.factorial(p + 1) * f.log_slope(x) * (a - b)
    return curvature + design
