"""Compactly supported, symmetric kernel densities and their scalar moments."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import erf

MOMENT_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-9


class KernelFamily(Enum):
    """Kernel shapes the library knows how to build."""

    TRUNCATED_GAUSSIAN = "truncated-gaussian"
    EPANECHNIKOV = "epanechnikov"
    UNIFORM = "uniform"
    CUSTOM = "custom"


class UnknownKernel(ValueError):
    """Raised when a kernel id cannot be parsed."""


@dataclass(frozen=True)
class Kernel:
    """Kernel density supported on ``[-tau, tau]``.

    ``name`` is the id the kernel was built from (``truncated-gaussian:3``, ``epanechnikov``...)
    and doubles as the cache key for derived tableaus.
    """

    name: str
    family: KernelFamily
    tau: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    closed_moment: Optional[Callable[[int], float]] = None

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) <= self.tau
        values = np.zeros_like(u)
        values[inside] = self.evaluator(u[inside])
        return values


def truncated_gaussian(tau: float = 1.0) -> Kernel:
    """Standard normal density restricted to ``[-tau, tau]`` and renormalized."""
    if tau <= 0:
        raise UnknownKernel("truncated-gaussian half-width must be positive")
    mass = erf(tau / np.sqrt(2.0))

    def evaluator(u: np.ndarray) -> np.ndarray:
        return np.exp(-0.5 * u * u) / (np.sqrt(2.0 * np.pi) * mass)

    if tau == 1.0:
        name = "truncated-gaussian"
    else:
        name = f"truncated-gaussian:{np.format_float_positional(tau, trim='-')}"
    return Kernel(
        name=name, family=KernelFamily.TRUNCATED_GAUSSIAN, tau=float(tau), evaluator=evaluator
    )


def epanechnikov() -> Kernel:
    def evaluator(u: np.ndarray) -> np.ndarray:
        return 0.75 * (1.0 - u * u)

    def moment(k: int) -> float:
        return 0.0 if k % 2 else 3.0 / ((k + 1) * (k + 3))

    return Kernel(
        name="epanechnikov",
        family=KernelFamily.EPANECHNIKOV,
        tau=1.0,
        evaluator=evaluator,
        closed_moment=moment,
    )


def uniform() -> Kernel:
    def evaluator(u: np.ndarray) -> np.ndarray:
        return np.full_like(u, 0.5)

    def moment(k: int) -> float:
        return 0.0 if k % 2 else 1.0 / (k + 1)

    return Kernel(
        name="uniform",
        family=KernelFamily.UNIFORM,
        tau=1.0,
        evaluator=evaluator,
        closed_moment=moment,
    )


def custom_kernel(
    evaluator: Callable[[np.ndarray], np.ndarray], tau: float = 1.0, name: str = "custom"
) -> Kernel:
    """Wrap a user density; it is renormalized on ``[-tau, tau]`` by quadrature."""
    raw = Kernel(name=name, family=KernelFamily.CUSTOM, tau=float(tau), evaluator=evaluator)
    mass, _ = integrate.quad(lambda u: float(raw(u)), -tau, tau, epsabs=MOMENT_TOLERANCE, limit=200)
    if not mass > 0:
        raise UnknownKernel(f"custom kernel '{name}' has no positive mass on [-{tau}, {tau}]")
    mesh = np.linspace(0.0, tau, 1001)
    asymmetry = float(np.max(np.abs(raw(mesh) - raw(-mesh))))
    if asymmetry > SYMMETRY_TOLERANCE * mass:
        raise UnknownKernel(
            f"custom kernel '{name}' is not symmetric (|K(u) - K(-u)| up to {asymmetry:.3g})"
        )

    def normalized(u: np.ndarray) -> np.ndarray:
        return np.asarray(evaluator(u), dtype=float) / mass

    return Kernel(name=name, family=KernelFamily.CUSTOM, tau=float(tau), evaluator=normalized)


def kernel_from_id(identifier: str) -> Kernel:
    """Build a kernel from ``truncated-gaussian[:tau]``, ``epanechnikov`` or ``uniform``."""
    family, _, argument = identifier.strip().partition(":")
    if family == KernelFamily.TRUNCATED_GAUSSIAN.value:
        try:
            tau = float(argument) if argument else 1.0
        except ValueError as exc:
            raise UnknownKernel(f"Invalid truncation in kernel id '{identifier}'") from exc
        return truncated_gaussian(tau)
    if argument:
        raise UnknownKernel(f"Kernel '{family}' takes no parameter (got '{identifier}')")
    if family == KernelFamily.EPANECHNIKOV.value:
        return epanechnikov()
    if family == KernelFamily.UNIFORM.value:
        return uniform()
    raise UnknownKernel(f"Unknown kernel id '{identifier}'")


def kernel_moment(kernel: Kernel, k: int) -> float:
    """Return ``mu_k``, the integral of ``u**k K(u)`` over the support."""
    if k < 0:
        raise ValueError("moment order must be non-negative")
    # custom kernels are rejected unless symmetric
    if k % 2:
        return 0.0
    if kernel.closed_moment is not None:
        return kernel.closed_moment(k)
    value, _ = integrate.quad(
        lambda u: u**k * kernel.evaluator(np.asarray(u, dtype=float)),
        -kernel.tau,
        kernel.tau,
        epsabs=MOMENT_TOLERANCE,
        epsrel=MOMENT_TOLERANCE,
        limit=200,
    )
    return float(value)


def lipschitz_constant(kernel: Kernel, points: int = 20001) -> float:
    """Largest slope of ``K`` between neighbouring mesh points inside the support."""
    mesh = np.linspace(-kernel.tau, kernel.tau, points)
    values = kernel.evaluator(mesh)
    return float(np.max(np.abs(np.diff(values)) / np.diff(mesh)))
