"""Covariance functions of the error process and their behaviour on the diagonal.

Every model answers three kinds of questions:

* ``model(x, y)`` evaluates rho on broadcastable arrays;
* ``partial_left(x)`` / ``partial_right(x)`` give the one-sided derivatives
  ``rho^(0,1)(x, x-)`` and ``rho^(0,1)(x, x+)`` whose difference is ``alpha(x)``;
* ``rho11`` / ``rho02`` / ``rho13`` give smooth diagonal partials when the model declares
  enough diagonal smoothness.

Models are immutable. Sums and scalings build new models, mirroring how Gaussian processes
compose under addition and scaling.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

DIFFERENCE_STEP = 1e-6


class NotAvailable(RuntimeError):
    """Raised when a model lacks the regularity a derivative or constant requires."""


class UnknownModel(ValueError):
    """Raised when a covariance id cannot be parsed."""


class Smoothness(IntEnum):
    """Regularity declared by a model; larger values imply the smaller ones."""

    UNSPECIFIED = 0
    OFF_DIAGONAL = 1  # first partials continuous off the diagonal, one-sided limits on it
    C2_DIAGONAL = 2
    C4_DIAGONAL = 3


class CovarianceModel:
    """Base class; subclasses override ``__call__`` and whatever closed forms they know."""

    name: str = "covariance"
    smoothness: Smoothness = Smoothness.UNSPECIFIED

    def __call__(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def variance(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self(x, x)

    def matrix(self, points: Sequence[float]) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.asarray(self(points[:, None], points[None, :]), dtype=float)

    # one-sided partials -------------------------------------------------

    def partial_left(self, x: float) -> float:
        return _one_sided(self, x, -1.0)

    def partial_right(self, x: float) -> float:
        return _one_sided(self, x, +1.0)

    def alpha(self, x: float) -> float:
        """``rho^(0,1)(x, x-) - rho^(0,1)(x, x+)``, the jump of the first partial."""
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"alpha point {x} outside [0, 1]")
        if self.smoothness < Smoothness.OFF_DIAGONAL:
            raise NotAvailable(f"covariance '{self.name}' declares no off-diagonal regularity")
        if self.smoothness >= Smoothness.C2_DIAGONAL:
            return 0.0
        return float(self.partial_left(x) - self.partial_right(x))

    # smooth diagonal partials -------------------------------------------

    def _require(self, level: Smoothness, what: str) -> None:
        if self.smoothness < level:
            raise NotAvailable(
                f"{what} requires {level.name} smoothness; covariance '{self.name}' "
                f"declares {self.smoothness.name}"
            )

    def rho11(self, x: float) -> float:
        self._require(Smoothness.C2_DIAGONAL, "rho^(1,1)")
        return self._rho11(x)

    def rho02(self, x: float) -> float:
        self._require(Smoothness.C2_DIAGONAL, "rho^(0,2)")
        return self._rho02(x)

    def rho13(self, x: float) -> float:
        self._require(Smoothness.C4_DIAGONAL, "rho^(1,3)")
        return self._rho13(x)

    def _rho11(self, x: float) -> float:
        raise NotAvailable(f"covariance '{self.name}' has no closed-form rho^(1,1)")

    def _rho02(self, x: float) -> float:
        raise NotAvailable(f"covariance '{self.name}' has no closed-form rho^(0,2)")

    def _rho13(self, x: float) -> float:
        raise NotAvailable(f"covariance '{self.name}' has no closed-form rho^(1,3)")

    def __add__(self, other: "CovarianceModel") -> "SumCovariance":
        return SumCovariance((self, other))

    def __mul__(self, factor: float) -> "ScaledCovariance":
        return ScaledCovariance(self, float(factor))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


def _one_sided(
    model: CovarianceModel, x: float, side: float, step: float = DIFFERENCE_STEP
) -> float:
    """One-sided difference in the second argument with one Richardson step."""

    def quotient(delta: float) -> float:
        here = float(model(x, x))
        there = float(model(x, x + side * delta))
        return side * (there - here) / delta

    return 2.0 * quotient(step / 2.0) - quotient(step)


@dataclass(frozen=True)
class DiagonalPartials:
    rho11: float
    rho02: float
    rho13: Optional[float] = None


def diagonal_partials(model: CovarianceModel, x: float) -> DiagonalPartials:
    """Smooth diagonal partials at ``(x, x)``; ``rho13`` is ``None`` below C4 smoothness."""
    rho13 = model.rho13(x) if model.smoothness >= Smoothness.C4_DIAGONAL else None
    return DiagonalPartials(rho11=model.rho11(x), rho02=model.rho02(x), rho13=rho13)


def alpha(model: CovarianceModel, x: float) -> float:
    return model.alpha(x)


class WienerCovariance(CovarianceModel):
    """``min(x, y)``: Brownian motion started at zero."""

    name = "wiener"
    smoothness = Smoothness.OFF_DIAGONAL

    def __call__(self, x, y) -> np.ndarray:
        return np.minimum(x, y)

    def partial_left(self, x: float) -> float:
        return 1.0

    def partial_right(self, x: float) -> float:
        return 0.0


@dataclass(frozen=True, repr=False)
class OrnsteinUhlenbeckCovariance(CovarianceModel):
    """Stationary ``exp(-lam |x - y|)`` with unit variance."""

    lam: float
    smoothness = Smoothness.OFF_DIAGONAL

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise UnknownModel("Ornstein-Uhlenbeck rate must be positive")

    @property
    def name(self) -> str:
        return f"ou:{_format_number(self.lam)}"

    def __call__(self, x, y) -> np.ndarray:
        return np.exp(-self.lam * np.abs(np.subtract(x, y)))

    def partial_left(self, x: float) -> float:
        return self.lam

    def partial_right(self, x: float) -> float:
        return -self.lam


@dataclass(frozen=True, repr=False)
class SquaredExponentialCovariance(CovarianceModel):
    """``exp(-theta (x - y)^2)``; infinitely smooth, so alpha vanishes."""

    theta: float
    smoothness = Smoothness.C4_DIAGONAL

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise UnknownModel("squared-exponential scale must be positive")

    @property
    def name(self) -> str:
        return f"sqexp:{_format_number(self.theta)}"

    def __call__(self, x, y) -> np.ndarray:
        return np.exp(-self.theta * np.subtract(x, y) ** 2)

    def partial_left(self, x: float) -> float:
        return 0.0

    def partial_right(self, x: float) -> float:
        return 0.0

    def _rho11(self, x: float) -> float:
        return 2.0 * self.theta

    def _rho02(self, x: float) -> float:
        return -2.0 * self.theta

    def _rho13(self, x: float) -> float:
        return -12.0 * self.theta**2


@dataclass(frozen=True, repr=False)
class ScaledCovariance(CovarianceModel):
    base: CovarianceModel
    factor: float

    def __post_init__(self) -> None:
        if self.factor < 0:
            raise UnknownModel("covariance scale factor must be non-negative")

    @property
    def name(self) -> str:
        return f"{self.base.name}*{_format_number(self.factor)}"

    @property
    def smoothness(self) -> Smoothness:  # type: ignore[override]
        return self.base.smoothness

    def __call__(self, x, y) -> np.ndarray:
        return self.factor * self.base(x, y)

    def partial_left(self, x: float) -> float:
        return self.factor * self.base.partial_left(x)

    def partial_right(self, x: float) -> float:
        return self.factor * self.base.partial_right(x)

    def _rho11(self, x: float) -> float:
        return self.factor * self.base.rho11(x)

    def _rho02(self, x: float) -> float:
        return self.factor * self.base.rho02(x)

    def _rho13(self, x: float) -> float:
        return self.factor * self.base.rho13(x)


@dataclass(frozen=True, repr=False)
class SumCovariance(CovarianceModel):
    """Covariance of a sum of independent processes; only as smooth as its roughest part."""

    parts: Tuple[CovarianceModel, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise UnknownModel("a covariance sum needs at least one part")

    @property
    def name(self) -> str:
        return "+".join(part.name for part in self.parts)

    @property
    def smoothness(self) -> Smoothness:  # type: ignore[override]
        return min(part.smoothness for part in self.parts)

    def __call__(self, x, y) -> np.ndarray:
        return sum(part(x, y) for part in self.parts)

    def partial_left(self, x: float) -> float:
        return float(sum(part.partial_left(x) for part in self.parts))

    def partial_right(self, x: float) -> float:
        return float(sum(part.partial_right(x) for part in self.parts))

    def _rho11(self, x: float) -> float:
        return float(sum(part.rho11(x) for part in self.parts))

    def _rho02(self, x: float) -> float:
        return float(sum(part.rho02(x) for part in self.parts))

    def _rho13(self, x: float) -> float:
        return float(sum(part.rho13(x) for part in self.parts))


class FunctionCovariance(CovarianceModel):
    """A covariance known only through its evaluator; alpha comes from one-sided differences."""

    def __init__(
        self,
        evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray],
        name: str = "function",
        smoothness: Smoothness = Smoothness.OFF_DIAGONAL,
    ) -> None:
        if smoothness > Smoothness.OFF_DIAGONAL:
            raise ValueError("diagonal partials of an evaluator-only covariance are not supported")
        self._evaluator = evaluator
        self.name = name
        self.smoothness = smoothness

    def __call__(self, x, y) -> np.ndarray:
        return np.asarray(self._evaluator(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))


def _format_number(value: float) -> str:
    return np.format_float_positional(float(value), trim="-")


_TERM = re.compile(r"^(?P<base>[a-z]+)(?::(?P<arg>[^*]+))?(?:\*(?P<factor>.+))?$")


def _parse_term(term: str) -> CovarianceModel:
    match = _TERM.match(term.strip())
    if match is None:
        raise UnknownModel(f"Cannot parse covariance term '{term}'")
    base, arg, factor = match.group("base"), match.group("arg"), match.group("factor")
    try:
        if base == "wiener" and arg is None:
            model: CovarianceModel = WienerCovariance()
        elif base == "ou" and arg is not None:
            model = OrnsteinUhlenbeckCovariance(float(arg))
        elif base == "sqexp" and arg is not None:
            model = SquaredExponentialCovariance(float(arg))
        else:
            raise UnknownModel(f"Unknown covariance id '{term}'")
        if factor is not None:
            model = ScaledCovariance(model, float(factor))
    except ValueError as exc:
        if isinstance(exc, UnknownModel):
            raise
        raise UnknownModel(f"Invalid number in covariance id '{term}'") from exc
    return model


def parse_model(identifier: str) -> CovarianceModel:
    """Parse ``wiener``, ``ou:<lambda>``, ``sqexp:<theta>``, ``<id>*<factor>`` and ``a+b`` sums."""
    terms = identifier.split("+")
    if not identifier.strip() or any(not term.strip() for term in terms):
        raise UnknownModel(f"Empty term in covariance id '{identifier}'")
    models = [_parse_term(term) for term in terms]
    if len(models) == 1:
        return models[0]
    return SumCovariance(tuple(models))
