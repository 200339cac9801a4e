"""Second-order bias and variance expansions of the local polynomial estimator.

Two variance regimes are kept apart and selected explicitly:

* ``Route.ROUGH``: the covariance has a derivative jump ``alpha(x)`` across the diagonal and the
  second variance term is ``-(nu!)^2 alpha(x) e' S^-1 A S^-1 e / (n h^(2 nu - 1))``.
* ``Route.SMOOTH_EVEN`` / ``Route.SMOOTH_ODD``: the covariance is smooth on the diagonal, the
  design is equidistant and the variance is expanded with ``rho^(0,2)`` (even ``nu``) or
  ``rho^(1,1)``, ``rho^(1,3)`` (odd ``nu``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from locpoly_lab.covariance import CovarianceModel, Smoothness
from locpoly_lab.design import SamplingDensity, g_function, uniform_density
from locpoly_lab.kernels import KernelTableau
from locpoly_lab.smoothing import DerivativeTable


class Route(str, Enum):
    ROUGH = "rough-diagonal"
    SMOOTH_EVEN = "smooth-even"
    SMOOTH_ODD = "smooth-odd"


@dataclass(frozen=True)
class ExpansionTerm:
    """``coefficient * h**h_power * n**n_power`` together with its evaluated ``value``."""

    coefficient: float
    h_power: int
    n_power: int
    value: float


def _term(coefficient: float, h_power: int, n_power: int, h: float, n: float) -> ExpansionTerm:
    coefficient = float(coefficient)
    if coefficient == 0.0:
        return ExpansionTerm(0.0, h_power, n_power, 0.0)
    value = coefficient * float(h) ** h_power * float(n) ** n_power
    return ExpansionTerm(coefficient, h_power, n_power, value)


@dataclass(frozen=True)
class TermPair:
    leading: ExpansionTerm
    second: ExpansionTerm

    @property
    def total(self) -> float:
        return self.leading.value + self.second.value


@dataclass(frozen=True)
class AsymptoticMoments:
    route: Route
    h: float
    n: int
    nu: int
    bias: TermPair
    variance: TermPair

    @property
    def mse(self) -> float:
        return self.bias.total**2 + self.variance.total

    def to_dict(self) -> dict:
        def pair(terms: TermPair) -> dict:
            return {
                name: {
                    "coefficient": term.coefficient,
                    "h_power": term.h_power,
                    "n_power": term.n_power,
                    "value": term.value,
                }
                for name, term in (("leading", terms.leading), ("second", terms.second))
            }

        return {
            "route": self.route.value,
            "h": self.h,
            "n": self.n,
            "nu": self.nu,
            "bias": pair(self.bias),
            "variance": pair(self.variance),
            "mse": self.mse,
        }


def _check(h: float, n: int) -> None:
    if not h > 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    if n < 1:
        raise ValueError(f"number of curves must be >= 1, got {n}")


def asym_bias(
    tableau: KernelTableau,
    truth: DerivativeTable,
    x: float,
    h: float,
    nu: int,
    f: Optional[SamplingDensity] = None,
) -> TermPair:
    """Bias terms of orders ``h^(p+1-nu)`` and ``h^(p+2-nu)``; ``truth[k]`` is ``m^(k)``."""
    _check(h, 1)
    f = f or uniform_density()
    p = tableau.p
    scale = math.factorial(nu)
    m_next = float(truth[p + 1](x))
    leading = scale * m_next / math.factorial(p + 1) * tableau.bias_constant(nu)
    g = float(g_function(tableau, nu, truth[p + 1], truth[p + 2], f, x))
    return TermPair(
        leading=_term(leading, p + 1 - nu, 0, h, 1),
        second=_term(scale * g, p + 2 - nu, 0, h, 1),
    )


def asym_variance(
    tableau: KernelTableau, model: CovarianceModel, x: float, h: float, n: int, nu: int
) -> TermPair:
    """Variance terms for a covariance with a derivative jump on the diagonal."""
    _check(h, n)
    scale = math.factorial(nu) ** 2
    rho = float(model.variance(x))
    jump = model.alpha(x)
    return TermPair(
        leading=_term(scale * rho * tableau.variance_constant(nu), -2 * nu, -1, h, n),
        second=_term(-scale * jump * tableau.abs_variance_constant(nu), 1 - 2 * nu, -1, h, n),
    )


def asym_variance_regular(
    tableau: KernelTableau, model: CovarianceModel, x: float, h: float, n: int, nu: int
) -> TermPair:
    """Variance terms for a covariance that is smooth on the diagonal (equidistant design)."""
    _check(h, n)
    scale = math.factorial(nu) ** 2
    if nu % 2 == 0:
        rho = float(model.variance(x))
        leading = scale * rho * tableau.quadratic_form(tableau.S_star, nu)
        second = scale * model.rho02(x) * tableau.quadratic_form(tableau.A1, nu)
        return TermPair(
            leading=_term(leading, -2 * nu, -1, h, n),
            second=_term(second, 2 - 2 * nu, -1, h, n),
        )
    leading = scale * model.rho11(x) * tableau.quadratic_form(tableau.A2, nu)
    second = scale * model.rho13(x) * tableau.quadratic_form(tableau.A3, nu)
    return TermPair(
        leading=_term(leading, 2 - 2 * nu, -1, h, n),
        second=_term(second, 4 - 2 * nu, -1, h, n),
    )


def select_route(model: CovarianceModel, x: float, nu: int) -> Route:
    """Smooth routes need declared diagonal smoothness; everything else expands with alpha."""
    if model.smoothness >= Smoothness.C2_DIAGONAL:
        return Route.SMOOTH_EVEN if nu % 2 == 0 else Route.SMOOTH_ODD
    model.alpha(x)
    return Route.ROUGH


def asymptotic_moments(
    tableau: KernelTableau,
    model: CovarianceModel,
    truth: DerivativeTable,
    x: float,
    h: float,
    n: int,
    nu: int,
    f: Optional[SamplingDensity] = None,
    route: Optional[Route] = None,
) -> AsymptoticMoments:
    route = route or select_route(model, x, nu)
    if route is Route.ROUGH:
        variance = asym_variance(tableau, model, x, h, n, nu)
    else:
        if f is not None and not f.is_uniform:
            raise ValueError("the smooth-diagonal variance expansion assumes a uniform design")
        if (route is Route.SMOOTH_ODD) != bool(nu % 2):
            raise ValueError(f"route {route.value} does not match nu={nu}")
        variance = asym_variance_regular(tableau, model, x, h, n, nu)
    return AsymptoticMoments(
        route=route,
        h=float(h),
        n=int(n),
        nu=nu,
        bias=asym_bias(tableau, truth, x, h, nu, f),
        variance=variance,
    )


def asymptotic_mse(
    tableau: KernelTableau,
    model: CovarianceModel,
    truth: DerivativeTable,
    x: float,
    h: float,
    n: int,
    nu: int,
    f: Optional[SamplingDensity] = None,
    route: Optional[Route] = None,
) -> float:
    """Squared expanded bias plus expanded variance, the objective the optimal bandwidths solve."""
    return asymptotic_moments(tableau, model, truth, x, h, n, nu, f, route).mse
