"""Gauss-Legendre rules for integrals carrying the ``|u - v|`` kink."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from .functions import Kernel

DEFAULT_NODES = 64
KINK_IDENTITY = -8.0 / 15.0


@lru_cache(maxsize=8)
def _legendre(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    points, weights = np.polynomial.legendre.leggauss(nodes)
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def gauss_legendre(a: float, b: float, nodes: int = DEFAULT_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``nodes``-point rule mapped onto ``[a, b]``."""
    points, weights = _legendre(nodes)
    half = 0.5 * (b - a)
    return a + half * (points + 1.0), half * weights


def triangle_rules(
    tau: float, nodes: int = DEFAULT_NODES
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collapsed product rules for the two triangles ``v < u`` and ``v > u`` of ``[-tau, tau]^2``.

    Returns flattened ``(u, v, weight)`` arrays covering both triangles, so any function that is
    smooth on each side of the diagonal integrates at full Gauss order.
    """
    u, wu = gauss_legendre(-tau, tau, nodes)
    t, wt = _legendre(nodes)
    s = 0.5 * (t + 1.0)

    lower_v = -tau + np.outer(u + tau, s)
    lower_w = np.outer(wu * 0.5 * (u + tau), wt)
    upper_v = u[:, None] + np.outer(tau - u, s)
    upper_w = np.outer(wu * 0.5 * (tau - u), wt)

    uu = np.repeat(u, nodes)
    return (
        np.concatenate([uu, uu]),
        np.concatenate([lower_v.ravel(), upper_v.ravel()]),
        np.concatenate([lower_w.ravel(), upper_w.ravel()]),
    )


def abs_kink_integral(
    g: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tau: float = 1.0,
    nodes: int = DEFAULT_NODES,
) -> float:
    """Integral of ``|u - v| g(u, v)`` over ``[-tau, tau]^2``; ``g`` is called on flat arrays."""
    u, v, w = triangle_rules(tau, nodes)
    return float(np.sum(w * np.abs(u - v) * g(u, v)))


def cross_moment_abs(
    kernel: Kernel, k: int, l: int, nodes: int = DEFAULT_NODES  # noqa: E741
) -> float:
    """Entry ``(k, l)`` of the A matrix: half the kink integral of ``u^k v^l K(u) K(v)``."""
    if k < 0 or l < 0:
        raise ValueError("moment orders must be non-negative")
    return 0.5 * abs_kink_integral(
        lambda u, v: u**k * v**l * kernel(u) * kernel(v), kernel.tau, nodes
    )


def abs_moment_matrix(kernel: Kernel, p: int, nodes: int = DEFAULT_NODES) -> np.ndarray:
    """The full ``(p+1) x (p+1)`` A matrix from a single set of quadrature nodes."""
    u, v, w = triangle_rules(kernel.tau, nodes)
    base = 0.5 * w * np.abs(u - v) * kernel(u) * kernel(v)
    powers_u = np.vander(u, p + 1, increasing=True)
    powers_v = np.vander(v, p + 1, increasing=True)
    matrix = (powers_u * base[:, None]).T @ powers_v
    return 0.5 * (matrix + matrix.T)


def quadrature_self_test(nodes: int = DEFAULT_NODES) -> float:
    """Residual of the identity: the integral of ``uv|u-v|`` over ``[-1, 1]^2`` equals -8/15."""
    return abs_kink_integral(lambda u, v: u * v, 1.0, nodes) - KINK_IDENTITY
