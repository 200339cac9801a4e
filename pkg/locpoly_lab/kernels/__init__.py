"""Kernel densities, their moments and the derived moment tableau."""

from .functions import (
    Kernel,
    KernelFamily,
    UnknownKernel,
    custom_kernel,
    epanechnikov,
    kernel_from_id,
    kernel_moment,
    lipschitz_constant,
    truncated_gaussian,
    uniform,
)
from .quadrature import (
    KINK_IDENTITY,
    abs_kink_integral,
    abs_moment_matrix,
    cross_moment_abs,
    gauss_legendre,
    quadrature_self_test,
)
from .tableau import MAX_ORDER, KernelTableau, SingularMoments, build_tableau

__all__ = [
    "KINK_IDENTITY",
    "MAX_ORDER",
    "Kernel",
    "KernelFamily",
    "KernelTableau",
    "SingularMoments",
    "UnknownKernel",
    "abs_kink_integral",
    "abs_moment_matrix",
    "build_tableau",
    "cross_moment_abs",
    "custom_kernel",
    "epanechnikov",
    "gauss_legendre",
    "kernel_from_id",
    "kernel_moment",
    "lipschitz_constant",
    "quadrature_self_test",
    "truncated_gaussian",
    "uniform",
]
