import json

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from locpoly_lab.kernels import (
    SingularMoments,
    UnknownKernel,
    build_tableau,
    cross_moment_abs,
    custom_kernel,
    epanechnikov,
    kernel_from_id,
    kernel_moment,
    lipschitz_constant,
    quadrature_self_test,
)

BUILT_IN = ["truncated-gaussian", "truncated-gaussian:3", "epanechnikov", "uniform"]


@pytest.mark.parametrize("identifier", BUILT_IN)
def test_kernel_is_symmetric_density_on_support(identifier):
    kernel = kernel_from_id(identifier)
    grid = np.linspace(-kernel.tau, kernel.tau, 401)
    assert np.allclose(kernel(grid), kernel(-grid))
    assert np.all(kernel(grid) >= 0)
    assert np.all(kernel(np.array([-kernel.tau - 1e-3, kernel.tau + 0.5])) == 0)
    assert abs(kernel_moment(kernel, 0) - 1.0) < 1e-10
    for k in (1, 3, 5, 7, 9):
        direct, _ = integrate.quad(lambda u: u**k * kernel(u), -kernel.tau, kernel.tau)
        assert abs(direct) < 1e-10
        assert kernel_moment(kernel, k) == 0.0
    assert np.isfinite(lipschitz_constant(kernel))


def test_epanechnikov_closed_form_moments():
    kernel = epanechnikov()
    assert abs(kernel_moment(kernel, 2) - 1 / 5) < 1e-15
    assert abs(kernel_moment(kernel, 4) - 3 / 35) < 1e-15


def test_truncated_gaussian_second_moment():
    tau = 3.0
    kernel = kernel_from_id("truncated-gaussian:3")
    mass = 2 * norm.cdf(tau) - 1
    expected = 1 - 2 * tau * norm.pdf(tau) / mass
    assert kernel.name == "truncated-gaussian:3"
    assert abs(kernel_moment(kernel, 2) - expected) < 1e-10


def test_lipschitz_constants():
    assert lipschitz_constant(kernel_from_id("uniform")) == 0.0
    assert abs(lipschitz_constant(epanechnikov()) - 1.5) < 1e-3
    assert abs(lipschitz_constant(kernel_from_id("truncated-gaussian")) - 0.3544) < 1e-3


def test_custom_kernel_is_normalized():
    triangle = custom_kernel(lambda u: 2.0 * (1.0 - np.abs(u)), name="triangle")
    assert abs(kernel_moment(triangle, 0) - 1.0) < 1e-10
    assert abs(kernel_moment(triangle, 2) - 1 / 6) < 1e-10


def test_custom_kernel_rejects_skewed_density():
    with pytest.raises(UnknownKernel, match="not symmetric"):
        custom_kernel(lambda u: 1.0 + 0.9 * u, name="skewed")
    with pytest.raises(UnknownKernel):
        custom_kernel(lambda u: np.where(u > 0, 1.0, 0.5), tau=2.0)


def test_kernel_from_id_rejects_unknown_ids():
    with pytest.raises(UnknownKernel):
        kernel_from_id("biweight")
    with pytest.raises(UnknownKernel):
        kernel_from_id("epanechnikov:2")
    with pytest.raises(UnknownKernel):
        kernel_from_id("truncated-gaussian:wide")


def test_kink_identity():
    assert abs(quadrature_self_test()) < 1e-9


def test_uniform_abs_moments_closed_form():
    kernel = kernel_from_id("uniform")
    # K = 1/2 reduces the entries to multiples of the plain kink integrals 8/3 and -8/15.
    assert abs(cross_moment_abs(kernel, 0, 0) - 1 / 3) < 1e-10
    assert abs(cross_moment_abs(kernel, 1, 1) + 1 / 15) < 1e-10
    assert abs(cross_moment_abs(kernel, 0, 1)) < 1e-12


def test_epanechnikov_abs_moment_matches_monte_carlo():
    rng = np.random.default_rng(20240611)

    def draw(size):
        u1, u2, u3 = rng.uniform(-1.0, 1.0, size=(3, size))
        pick_u2 = (np.abs(u3) >= np.abs(u2)) & (np.abs(u3) >= np.abs(u1))
        return np.where(pick_u2, u2, u3)

    size = 2_000_000
    u, v = draw(size), draw(size)
    samples = 0.5 * np.abs(u - v) * u * v
    estimate = samples.mean()
    stderr = samples.std() / np.sqrt(size)
    assert abs(cross_moment_abs(epanechnikov(), 1, 1) - estimate) < 5 * stderr


def test_epanechnikov_tableau_at_order_one():
    tableau = build_tableau(epanechnikov(), 1)
    assert np.allclose(tableau.S, [[1.0, 0.0], [0.0, 0.2]])
    assert np.allclose(tableau.c, [0.2, 0.0])
    assert abs(tableau.bias_constant(0) - 0.2) < 1e-12
    assert tableau.bias_constant(1) == 0.0


@pytest.mark.parametrize("identifier", BUILT_IN)
def test_order_one_quadratic_forms_are_unity(identifier):
    tableau = build_tableau(kernel_from_id(identifier), 1)
    assert abs(tableau.variance_constant(0) - 1.0) < 1e-10
    assert abs(tableau.quadratic_form(tableau.A2, 1) - 1.0) < 1e-10
    assert tableau.variance_constant(1) == 0.0


@pytest.mark.parametrize("identifier", BUILT_IN)
def test_parity_structure(identifier):
    kernel = kernel_from_id(identifier)
    for p in range(5):
        tableau = build_tableau(kernel, p)
        k, l = np.meshgrid(np.arange(p + 1), np.arange(p + 1), indexing="ij")  # noqa: E741
        assert np.all(tableau.S[(k + l) % 2 == 1] == 0)
        assert np.all(tableau.S_tilde[(k + l) % 2 == 0] == 0)
        assert np.all(tableau.B[(k - l) % 2 == 0] == 0)
        for name in ("S", "S_star", "A", "B", "A1", "A2", "A3"):
            matrix = getattr(tableau, name)
            assert np.allclose(matrix, matrix.T, atol=1e-14)
        chain = tableau.S_tilde @ tableau.s_inv @ tableau.S_star
        for nu in range(p + 1):
            assert abs(tableau.quadratic_form(chain, nu)) < 1e-10
            assert abs(tableau.quadratic_form(tableau.B, nu)) < 1e-10


@pytest.mark.parametrize("identifier", BUILT_IN)
def test_abs_variance_constant_positive_for_low_orders(identifier):
    kernel = kernel_from_id(identifier)
    for p in (0, 1, 2):
        assert build_tableau(kernel, p).abs_variance_constant(0) > 0


def test_tableau_is_cached_and_read_only():
    first = build_tableau(epanechnikov(), 2)
    assert build_tableau(kernel_from_id("epanechnikov"), 2) is first
    with pytest.raises(ValueError):
        first.S[0, 0] = 2.0


def test_tableau_rejects_unsupported_order():
    with pytest.raises(ValueError):
        build_tableau(epanechnikov(), 5)


def test_degenerate_kernel_raises_singular_moments():
    spike = custom_kernel(lambda u: np.ones_like(u), tau=1e-4, name="spike")
    with pytest.raises(SingularMoments):
        build_tableau(spike, 4)


def test_tableau_serializes_to_json():
    payload = build_tableau(kernel_from_id("truncated-gaussian"), 2).to_dict()
    decoded = json.loads(json.dumps(payload))
    assert decoded["p"] == 2
    assert len(decoded["A"]) == 3
    assert set(decoded["forms"]) == {"0", "1", "2"}
