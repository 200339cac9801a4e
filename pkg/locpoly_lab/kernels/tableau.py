"""Kernel moment tableau: every kernel-only constant of the bias and variance expansions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Tuple

import numpy as np
from scipy import linalg

from .functions import Kernel, KernelFamily, kernel_from_id, kernel_moment
from .quadrature import DEFAULT_NODES, abs_moment_matrix

MAX_ORDER = 4
MAX_CONDITION = 1e12


class SingularMoments(RuntimeError):
    """Raised when the moment matrix S is numerically singular."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class KernelTableau:
    """Moments and moment matrices of one kernel at fit order ``p``.

    Matrices are ``(p+1) x (p+1)`` read-only arrays indexed ``k, l = 0..p``; ``s_inv`` is the
    inverse of ``S`` obtained from its Cholesky factor.
    """

    kernel_name: str
    tau: float
    p: int
    moments: Tuple[float, ...]
    c: np.ndarray
    c_tilde: np.ndarray
    S: np.ndarray
    S_tilde: np.ndarray
    S_star: np.ndarray
    A: np.ndarray
    B: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    s_inv: np.ndarray

    def mu(self, k: int) -> float:
        return self.moments[k]

    def _check_nu(self, nu: int) -> None:
        if not 0 <= nu <= self.p:
            raise ValueError(f"derivative order {nu} outside 0..{self.p}")

    def quadratic_form(self, matrix: np.ndarray, nu: int) -> float:
        """``e_nu' S^-1 M S^-1 e_nu``."""
        self._check_nu(nu)
        row = self.s_inv[nu]
        return float(row @ matrix @ row)

    def bias_constant(self, nu: int) -> float:
        """``e_nu' S^-1 c``; exactly zero when ``p - nu`` is even."""
        self._check_nu(nu)
        if (self.p - nu) % 2 == 0:
            return 0.0
        return float(self.s_inv[nu] @ self.c)

    def second_bias_constants(self, nu: int) -> Tuple[float, float]:
        """``(e_nu' S^-1 c~, e_nu' S^-1 S~ S^-1 c)``; both vanish when ``p - nu`` is odd."""
        self._check_nu(nu)
        if (self.p - nu) % 2:
            return 0.0, 0.0
        row = self.s_inv[nu]
        return float(row @ self.c_tilde), float(row @ self.S_tilde @ self.s_inv @ self.c)

    def variance_constant(self, nu: int) -> float:
        """``e_nu' S^-1 S* S^-1 e_nu``; exactly zero for odd ``nu``."""
        if nu % 2:
            self._check_nu(nu)
            return 0.0
        return self.quadratic_form(self.S_star, nu)

    def abs_variance_constant(self, nu: int) -> float:
        """``e_nu' S^-1 A S^-1 e_nu``, the constant of the derivative-jump variance term."""
        return self.quadratic_form(self.A, nu)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view including the scalar forms for every ``nu``."""
        forms = {}
        for nu in range(self.p + 1):
            a, b = self.second_bias_constants(nu)
            forms[str(nu)] = {
                "bias": self.bias_constant(nu),
                "second_bias": [a, b],
                "variance": self.variance_constant(nu),
                "abs_variance": self.abs_variance_constant(nu),
                "A1": self.quadratic_form(self.A1, nu),
                "A2": self.quadratic_form(self.A2, nu),
                "A3": self.quadratic_form(self.A3, nu),
                "B": self.quadratic_form(self.B, nu),
            }
        return {
            "kernel": self.kernel_name,
            "tau": self.tau,
            "p": self.p,
            "moments": list(self.moments),
            "c": self.c.tolist(),
            "c_tilde": self.c_tilde.tolist(),
            "S": self.S.tolist(),
            "S_tilde": self.S_tilde.tolist(),
            "S_star": self.S_star.tolist(),
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "A1": self.A1.tolist(),
            "A2": self.A2.tolist(),
            "A3": self.A3.tolist(),
            "forms": forms,
        }


def moment_count(p: int) -> int:
    """Highest moment index the tableau at order ``p`` touches."""
    return max(2 * p + 2, p + 3)


def _assemble(kernel: Kernel, p: int, nodes: int) -> KernelTableau:
    if not 0 <= p <= MAX_ORDER:
        raise ValueError(f"fit order p={p} outside supported range 0..{MAX_ORDER}")
    mu = np.array([kernel_moment(kernel, k) for k in range(moment_count(p) + 1)])
    idx = np.arange(p + 1)
    k, l = np.meshgrid(idx, idx, indexing="ij")  # noqa: E741

    S = mu[k + l]
    condition = np.linalg.cond(S)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularMoments(
            f"moment matrix for kernel '{kernel.name}' at p={p} has condition {condition:.3g}"
        )
    factor = linalg.cho_factor(S)
    s_inv = linalg.cho_solve(factor, np.eye(p + 1))
    s_inv = 0.5 * (s_inv + s_inv.T)

    head = mu[idx]
    return KernelTableau(
        kernel_name=kernel.name,
        tau=kernel.tau,
        p=p,
        moments=tuple(float(m) for m in mu),
        c=_frozen(mu[idx + p + 1]),
        c_tilde=_frozen(mu[idx + p + 2]),
        S=_frozen(S),
        S_tilde=_frozen(mu[k + l + 1]),
        S_star=_frozen(np.outer(head, head)),
        A=_frozen(abs_moment_matrix(kernel, p, nodes)),
        B=_frozen(0.5 * (mu[k + 1] * mu[l] + mu[k] * mu[l + 1])),
        A1=_frozen(0.5 * (mu[k] * mu[l + 2] + mu[k + 2] * mu[l])),
        A2=_frozen(mu[k + 1] * mu[l + 1]),
        A3=_frozen((mu[k + 3] * mu[l + 1] + mu[k + 1] * mu[l + 3]) / 6.0),
        s_inv=_frozen(s_inv),
    )


@lru_cache(maxsize=64)
def _cached_tableau(kernel_id: str, p: int, nodes: int) -> KernelTableau:
    return _assemble(kernel_from_id(kernel_id), p, nodes)


def build_tableau(kernel: Kernel, p: int, nodes: int = DEFAULT_NODES) -> KernelTableau:
    """Build (or fetch from the per-process cache) the tableau of ``kernel`` at order ``p``.

    Custom kernels are never cached because their name does not pin down the evaluator.
    """
    if kernel.family is KernelFamily.CUSTOM:
        return _assemble(kernel, p, nodes)
    return _cached_tableau(kernel.name, p, nodes)
