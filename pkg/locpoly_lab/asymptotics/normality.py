"""Limit distribution parameters of the estimator at a point."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from locpoly_lab.covariance import CovarianceModel, NotAvailable, Smoothness
from locpoly_lab.kernels import KernelTableau

DECAY_THRESHOLD = 1.0


class NormalityCase(str, Enum):
    EVEN = "nu-even"
    ODD_ROUGH = "nu-odd-rough"
    ODD_SMOOTH = "nu-odd-smooth"


@dataclass(frozen=True)
class NormalityParams:
    """``sqrt(n h^scaling_exponent) (m_hat - m) -> N(0, variance)`` while ``n h^decay -> 0``."""

    case: NormalityCase
    scaling_exponent: int
    variance: float
    decay_exponent: int

    def scale(self, n: int, h: float) -> float:
        return math.sqrt(n * h**self.scaling_exponent)

    def decay(self, n: int, h: float) -> float:
        return n * h**self.decay_exponent

    def condition_holds(self, n: int, h: float, threshold: float = DECAY_THRESHOLD) -> bool:
        """Finite-sample reading of the bias-negligibility condition: ``n h^decay < threshold``."""
        return self.decay(n, h) < threshold

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "scaling_exponent": self.scaling_exponent,
            "variance": self.variance,
            "decay_exponent": self.decay_exponent,
        }


def normality_params(
    tableau: KernelTableau, model: CovarianceModel, x: float, nu: int
) -> NormalityParams:
    p = tableau.p
    if not 0 <= nu <= p:
        raise ValueError(f"derivative order {nu} outside 0..{p}")
    scale = math.factorial(nu) ** 2
    bias_order = p + 1 - nu if (p - nu) % 2 else p + 2 - nu

    if nu % 2 == 0:
        case = NormalityCase.EVEN
        exponent = 2 * nu
        variance = scale * float(model.variance(x)) * tableau.variance_constant(nu)
    elif model.alpha(x) > 0:
        case = NormalityCase.ODD_ROUGH
        exponent = 2 * nu - 1
        variance = scale * model.alpha(x) * abs(tableau.abs_variance_constant(nu))
    else:
        if model.smoothness < Smoothness.C4_DIAGONAL:
            raise NotAvailable(
                f"alpha({x:.4g}) = 0 and covariance '{model.name}' is not declared four times "
                "differentiable on the diagonal"
            )
        case = NormalityCase.ODD_SMOOTH
        exponent = 2 * nu - 2
        variance = scale * model.rho11(x) * tableau.quadratic_form(tableau.A2, nu)
    return NormalityParams(
        case=case,
        scaling_exponent=exponent,
        variance=float(variance),
        decay_exponent=exponent + 2 * bias_order,
    )
