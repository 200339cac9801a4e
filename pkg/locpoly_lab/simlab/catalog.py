"""Regression functions of the simulation study and the signal-to-noise ratio."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from locpoly_lab.covariance import CovarianceModel

SNR_MESH = 10_001

Evaluator = Callable[[int, np.ndarray], np.ndarray]


class UnknownId(ValueError):
    """Raised for a regression id the catalog does not know."""


@dataclass(frozen=True)
class Regression:
    """A mean function with closed-form derivatives of every order.

    ``regression[k]`` (or ``regression.derivative(k)``) evaluates ``m^(k)``, so a
    regression can be passed wherever a derivative table is expected.
    """

    name: str
    evaluator: Evaluator

    def derivative(self, k: int) -> Callable[[np.ndarray], np.ndarray]:
        if k < 0:
            raise ValueError(f"derivative order must be non-negative, got {k}")

        def evaluate(x):
            return self.evaluator(k, np.asarray(x, dtype=float))

        return evaluate

    def __getitem__(self, k: int) -> Callable[[np.ndarray], np.ndarray]:
        return self.derivative(k)

    def __call__(self, x):
        return self.evaluator(0, np.asarray(x, dtype=float))


def polynomial_regression(name: str, poly: Polynomial) -> Regression:
    cache: Dict[int, Polynomial] = {0: poly}

    def evaluate(k: int, x: np.ndarray) -> np.ndarray:
        if k not in cache:
            cache[k] = poly.deriv(k)
        return cache[k](x) * np.ones_like(x)

    return Regression(name=name, evaluator=evaluate)


@lru_cache(maxsize=None)
def _logistic_polynomial(rate: float, k: int) -> Polynomial:
    # d/dx P(s(x)) = P'(s) * rate * s (1 - s) for the logistic s
    if k == 0:
        return Polynomial([0.0, 1.0])
    return Polynomial([0.0, rate, -rate]) * _logistic_polynomial(rate, k - 1).deriv()


def logistic_sine_regression(
    name: str = "m2", rate: float = 10.0, amplitude: float = 0.03, frequency: float = 6.0
) -> Regression:
    """``1 / (1 + exp(-rate (x - 1/2))) + amplitude sin(frequency pi x)``."""
    omega = frequency * math.pi

    def evaluate(k: int, x: np.ndarray) -> np.ndarray:
        s = 1.0 / (1.0 + np.exp(-rate * (x - 0.5)))
        sine = amplitude * omega**k * np.sin(omega * x + k * math.pi / 2)
        return _logistic_polynomial(rate, k)(s) + sine

    return Regression(name=name, evaluator=evaluate)


def regression_catalog(identifier: str) -> Regression:
    """``m1`` (unit-range quartic), ``m2`` (logistic plus a small sine) or ``poly:<c0>,...``."""
    key = identifier.strip()
    if key == "m1":
        return polynomial_regression("m1", 16 * Polynomial([-0.5, 1.0]) ** 4)
    if key == "m2":
        return logistic_sine_regression("m2")
    family, _, argument = key.partition(":")
    if family == "poly" and argument:
        try:
            coefficients = [float(c) for c in argument.split(",")]
        except ValueError as exc:
            raise UnknownId(f"Invalid polynomial coefficients in '{identifier}'") from exc
        return polynomial_regression(key, Polynomial(coefficients))
    raise UnknownId(f"Unknown regression id '{identifier}' (expected m1, m2 or poly:<c0>,...)")


def snr(regression: Regression, model: CovarianceModel, n: int, mesh_size: int = SNR_MESH) -> float:
    """``sqrt(n) (max m - min m) / int rho(t, t) dt`` over [0, 1]."""
    if n < 1:
        raise ValueError("signal-to-noise ratio needs n >= 1")
    mesh = np.linspace(0.0, 1.0, mesh_size)
    values = regression(mesh)
    noise = float(integrate.simpson(np.asarray(model.variance(mesh), dtype=float), x=mesh))
    spread = float(values.max() - values.min())
    if noise == 0:
        return math.inf if spread else 0.0
    return math.sqrt(n) * spread / noise
