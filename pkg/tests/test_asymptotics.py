import math

import numpy as np
import pytest
from numpy.polynomial import Polynomial
from scipy import integrate, optimize

from locpoly_lab.asymptotics import (
    AlphaZero,
    NormalityCase,
    NotOptimizable,
    OptimalDensityInUse,
    Route,
    ZeroCurvature,
    asym_bias,
    asym_variance,
    asym_variance_regular,
    asymptotic_moments,
    asymptotic_mse,
    h_opt_global,
    h_opt_local,
    h_opt_regular,
    normality_params,
    select_route,
    sn_star_expansion,
    sn_star_finite,
)
from locpoly_lab.covariance import (
    CovarianceModel,
    NotAvailable,
    SquaredExponentialCovariance,
    parse_model,
)
from locpoly_lab.design import density_from_id, optimal_density, quantile_grid, uniform_density
from locpoly_lab.kernels import build_tableau, epanechnikov, kernel_from_id
from locpoly_lab.smoothing import FitSpec, exact_moments

QUARTIC = 16 * Polynomial([-0.5, 1.0]) ** 4


def _table(poly, count=8):
    return tuple(poly.deriv(k) if k else poly for k in range(count))


def _exponential(rate=2.0, count=8):
    return tuple((lambda x, k=k: rate**k * np.exp(rate * np.asarray(x))) for k in range(count))


class _Opaque(CovarianceModel):
    name = "opaque"

    def __call__(self, x, y):
        return np.exp(-np.abs(np.subtract(x, y)))


class _RisingDiagonal(SquaredExponentialCovariance):
    def _rho02(self, x):
        return 1.0


def _central_slope(objective, h, step=1e-5):
    delta = step * h
    return (objective(h + delta) - objective(h - delta)) / (2 * delta)


def test_bias_terms_at_low_orders():
    truth = _table(QUARTIC)
    tableau = build_tableau(epanechnikov(), 1)
    terms = asym_bias(tableau, truth, 0.25, 0.1, nu=0)
    assert abs(terms.leading.value - 12 / 2 * 0.2 * 0.1**2) < 1e-12
    assert terms.leading.h_power == 2
    assert terms.second.coefficient == 0.0

    constant = asym_bias(build_tableau(epanechnikov(), 0), truth, 0.25, 0.1, nu=0)
    assert constant.leading.value == 0.0
    assert abs(constant.second.value - terms.leading.value) < 1e-12


def test_bias_design_term_follows_density_slope():
    truth = _table(QUARTIC)
    tableau = build_tableau(epanechnikov(), 0)
    f = density_from_id("linear:1")
    x = 0.3
    terms = asym_bias(tableau, truth, x, 0.1, nu=0, f=f)
    flat = asym_bias(tableau, truth, x, 0.1, nu=0)
    extra = truth[1](x) * f.log_slope(x) * 0.2 * 0.1**2
    assert abs(terms.second.value - flat.second.value - extra) < 1e-12


def test_rough_variance_terms():
    tableau = build_tableau(epanechnikov(), 1)
    model = parse_model("wiener")
    terms = asym_variance(tableau, model, 0.4, 0.1, 20, nu=0)
    assert abs(terms.leading.value - 0.4 / 20) < 1e-12
    assert (terms.leading.h_power, terms.leading.n_power) == (0, -1)
    assert abs(terms.second.value + tableau.abs_variance_constant(0) * 0.1 / 20) < 1e-15

    slope = asym_variance(tableau, model, 0.4, 0.1, 20, nu=1)
    assert slope.leading.coefficient == 0.0
    assert slope.second.value > 0

    with pytest.raises(NotAvailable):
        asym_variance(tableau, _Opaque(), 0.4, 0.1, 20, nu=0)


def test_smooth_variance_terms():
    tableau = build_tableau(epanechnikov(), 1)
    model = parse_model("sqexp:1")
    odd = asym_variance_regular(tableau, model, 0.5, 0.1, 10, nu=1)
    assert abs(odd.leading.coefficient - 2.0) < 1e-10
    assert odd.second.coefficient < 0

    even = asym_variance_regular(tableau, model, 0.5, 0.1, 10, nu=0)
    assert abs(even.leading.value - 0.1) < 1e-12
    assert even.second.coefficient < 0

    with pytest.raises(NotAvailable):
        asym_variance_regular(tableau, parse_model("wiener"), 0.5, 0.1, 10, nu=0)


def test_route_selection_is_explicit():
    assert select_route(parse_model("ou:15"), 0.5, 0) is Route.ROUGH
    assert select_route(parse_model("sqexp:2"), 0.5, 0) is Route.SMOOTH_EVEN
    assert select_route(parse_model("sqexp:2"), 0.5, 1) is Route.SMOOTH_ODD
    with pytest.raises(NotAvailable):
        select_route(_Opaque(), 0.5, 0)

    tableau = build_tableau(epanechnikov(), 1)
    with pytest.raises(ValueError):
        asymptotic_moments(
            tableau,
            parse_model("sqexp:2"),
            _table(QUARTIC),
            0.3,
            0.1,
            5,
            0,
            f=density_from_id("linear:1"),
        )
    moments = asymptotic_moments(tableau, parse_model("ou:15"), _table(QUARTIC), 0.3, 0.1, 5, 0)
    assert moments.to_dict()["route"] == "rough-diagonal"


def test_local_linear_bandwidth_matches_closed_form_and_grid_search():
    tableau = build_tableau(epanechnikov(), 1)
    model = parse_model("wiener")
    truth = _table(QUARTIC)
    n = 100
    result = h_opt_local(tableau, model, truth, 0.25, n, nu=0)
    closed = (tableau.A[0, 0] / (0.2**2 * 12**2)) ** (1 / 3) * n ** (-1 / 3)
    assert abs(result.h - closed) < 1e-12
    assert abs(result.rate + 1 / 3) < 1e-15

    grid = np.linspace(1e-3, 1.0, 10_000)
    scores = [asymptotic_mse(tableau, model, truth, 0.25, h, n, 0) for h in grid]
    assert abs(grid[int(np.argmin(scores))] / result.h - 1) < 0.01


def test_local_bandwidth_homogeneity():
    tableau = build_tableau(epanechnikov(), 1)
    truth = _table(QUARTIC)
    base = h_opt_local(tableau, parse_model("wiener"), truth, 0.25, 100, nu=0).h
    doubled = h_opt_local(tableau, parse_model("wiener*2"), truth, 0.25, 100, nu=0).h
    assert abs(doubled / base - 2 ** (1 / 3)) < 1e-9
    more = h_opt_local(tableau, parse_model("wiener"), truth, 0.25, 800, nu=0).h
    assert abs(more / base - 0.5) < 1e-12


def test_local_derivative_bandwidth_closed_form():
    tableau = build_tableau(epanechnikov(), 1)
    truth = _table(QUARTIC)
    x, n = 0.25, 50
    result = h_opt_local(tableau, parse_model("ou:15"), truth, x, n, nu=1)
    mu4 = tableau.mu(4)
    cross = 2 * tableau.A[1, 1]
    closed = (-9 * 30 * cross / (2 * mu4**2 * truth[3](x) ** 2)) ** 0.2 * n ** (-0.2)
    assert abs(result.h / closed - 1) < 1e-9


@pytest.mark.parametrize("p, nu", [(0, 0), (1, 0), (2, 0), (1, 1), (2, 1)])
def test_local_bandwidth_is_stationary(p, nu):
    tableau = build_tableau(kernel_from_id("truncated-gaussian:3"), p)
    model = parse_model("ou:15")
    truth = _exponential()
    x, n = 0.2, 40
    h = h_opt_local(tableau, model, truth, x, n, nu).h

    def objective(value):
        return asymptotic_mse(tableau, model, truth, x, value, n, nu)

    assert abs(_central_slope(objective, h)) * h < 1e-6 * objective(h)


def _numerical_minimum(objective, h):
    result = optimize.minimize_scalar(
        objective, bounds=(h / 20, 20 * h), method="bounded", options={"xatol": 1e-9 * h}
    )
    return result.x


@pytest.mark.parametrize("p, nu", [(0, 0), (1, 1)])
def test_local_bandwidth_matches_numerical_minimum(p, nu):
    tableau = build_tableau(kernel_from_id("truncated-gaussian:3"), p)
    model = parse_model("ou:15")
    truth = _exponential()
    x, n = 0.3, 60
    h = h_opt_local(tableau, model, truth, x, n, nu).h

    def objective(value):
        return asymptotic_mse(tableau, model, truth, x, value, n, nu)

    assert abs(_numerical_minimum(objective, h) / h - 1) < 1e-4


@pytest.mark.parametrize("nu", [0, 1])
def test_regular_bandwidth_matches_numerical_minimum(nu):
    tableau = build_tableau(epanechnikov(), 1)
    model = parse_model("sqexp:2")
    truth = _exponential(rate=1.5)
    x, n = 0.6, 80
    h = h_opt_regular(tableau, model, truth, x, n, nu).h

    def objective(value):
        return asymptotic_mse(tableau, model, truth, x, value, n, nu)

    assert abs(_central_slope(objective, h)) * h < 1e-6 * objective(h)
    assert abs(_numerical_minimum(objective, h) / h - 1) < 1e-4


def test_global_bandwidth_minimizes_integrated_mse():
    tableau = build_tableau(epanechnikov(), 1)
    model = parse_model("ou:15")
    truth = _table(QUARTIC)
    n = 100
    h = h_opt_global(tableau, model, truth, n, nu=0).h
    mesh = np.linspace(0.0, 1.0, 201)

    def objective(value):
        pointwise = [asymptotic_mse(tableau, model, truth, x, value, n, 0) for x in mesh]
        return float(integrate.simpson(pointwise, x=mesh))

    assert abs(_central_slope(objective, h)) * h < 1e-6 * objective(h)
    assert abs(_numerical_minimum(objective, h) / h - 1) < 1e-4


def test_local_bandwidth_errors():
    tableau = build_tableau(epanechnikov(), 1)
    truth = _table(QUARTIC)
    with pytest.raises(ZeroCurvature):
        h_opt_local(tableau, parse_model("wiener"), truth, 0.5, 100, nu=0)
    with pytest.raises(AlphaZero):
        h_opt_local(tableau, parse_model("sqexp:1"), truth, 0.25, 100, nu=0)
    with pytest.raises(ValueError):
        h_opt_local(build_tableau(epanechnikov(), 2), parse_model("wiener"), truth, 0.3, 10, 2)


def test_optimal_design_blocks_the_even_order_formula():
    tableau = build_tableau(epanechnikov(), 0)
    truth = _exponential()
    f0 = optimal_density(tableau, 0, truth[1], truth[2])
    with pytest.raises(OptimalDensityInUse):
        h_opt_local(tableau, parse_model("wiener"), truth, 0.4, 100, nu=0, f=f0)
    assert h_opt_local(tableau, parse_model("wiener"), truth, 0.4, 100, nu=0).h > 0


def test_regular_bandwidth_closed_forms():
    tableau = build_tableau(epanechnikov(), 1)
    model = parse_model("sqexp:1")
    curvature = 4.0
    truth = _table(Polynomial([0.0, 0.0, curvature / 2]))
    result = h_opt_regular(tableau, model, truth, 0.4, 100, nu=0)
    assert abs(result.h - math.sqrt(20 / curvature**2) / 10) < 1e-12
    assert result.route is Route.SMOOTH_EVEN
    quadrupled = h_opt_regular(tableau, model, truth, 0.4, 400, nu=0)
    assert abs(quadrupled.h / result.h - 0.5) < 1e-12

    grid = np.linspace(1e-3, 1.0, 10_000)
    scores = [asymptotic_mse(tableau, model, truth, 0.4, h, 100, 0) for h in grid]
    assert abs(grid[int(np.argmin(scores))] / result.h - 1) < 0.01

    cubic = _table(Polynomial([0.0, 0.0, 0.0, 1.0]))
    slope = h_opt_regular(tableau, model, cubic, 0.4, 100, nu=1)
    closed = math.sqrt(-6 * 0.2 * -12.0 / (tableau.mu(4) * 6.0**2)) / 10
    assert abs(slope.h / closed - 1) < 1e-10

    def objective(value):
        return asymptotic_mse(tableau, model, cubic, 0.4, value, 100, 1)

    assert abs(_central_slope(objective, slope.h)) * slope.h < 1e-6 * objective(slope.h)


def test_regular_bandwidth_needs_decreasing_variance():
    tableau = build_tableau(epanechnikov(), 1)
    truth = _table(QUARTIC)
    with pytest.raises(NotOptimizable):
        h_opt_regular(tableau, _RisingDiagonal(theta=1.0), truth, 0.25, 100, nu=0)
    with pytest.raises(NotAvailable):
        h_opt_regular(tableau, parse_model("ou:15"), truth, 0.25, 100, nu=0)


def test_global_bandwidth_integrates_curvature():
    tableau = build_tableau(epanechnikov(), 1)
    truth = _table(QUARTIC)
    result = h_opt_global(tableau, parse_model("wiener"), truth, 100, nu=0)
    expected = 0.2**2 / 4 * 460.8
    assert abs(result.constants["bias_integral"] / expected - 1) < 1e-6
    assert abs(result.constants["alpha_integral"] - 1.0) < 1e-12
    closed = (tableau.A[0, 0] / (4 * expected * 100)) ** (1 / 3)
    assert abs(result.h / closed - 1) < 1e-6


def test_global_bandwidth_quadrature_is_converged():
    tableau = build_tableau(kernel_from_id("truncated-gaussian:3"), 2)
    truth = _exponential(rate=3.0)
    coarse = h_opt_global(tableau, parse_model("ou:15"), truth, 50, nu=0).h
    fine = h_opt_global(tableau, parse_model("ou:15"), truth, 50, nu=0, mesh_size=401).h
    assert abs(fine / coarse - 1) < 1e-6


def test_global_bandwidth_on_the_simulation_scale():
    tableau = build_tableau(kernel_from_id("truncated-gaussian:3"), 1)
    h = h_opt_global(tableau, parse_model("ou:15"), _table(QUARTIC), 50, nu=0).h
    assert 0.05 <= h <= 0.13


def test_global_bandwidth_with_supplied_integrals():
    tableau = build_tableau(epanechnikov(), 1)
    truth = _table(QUARTIC)
    model = parse_model("wiener")
    base = h_opt_global(tableau, model, truth, 100, nu=0, alpha_integral=1.0)
    doubled = h_opt_global(tableau, model, truth, 100, nu=0, alpha_integral=2.0)
    assert abs(doubled.h / base.h - 2 ** (1 / 3)) < 1e-9
    weighted = h_opt_global(tableau, model, truth, 100, nu=0, weight=lambda x: 2 + 0 * x)
    assert abs(weighted.h / base.h - 1) < 1e-9


def test_global_bandwidth_smooth_fallback_and_errors():
    tableau = build_tableau(epanechnikov(), 1)
    model = parse_model("sqexp:1")
    truth = _table(Polynomial([0.0, 0.0, 2.0]))
    pooled = h_opt_global(tableau, model, truth, 100, nu=0)
    local = h_opt_regular(tableau, model, truth, 0.5, 100, nu=0)
    assert pooled.route is Route.SMOOTH_EVEN
    assert abs(pooled.h / local.h - 1) < 1e-9

    with pytest.raises(ZeroCurvature):
        h_opt_global(tableau, parse_model("wiener"), _table(Polynomial([1.0, 2.0])), 100, 0)
    with pytest.raises(NotAvailable):
        h_opt_global(tableau, _Opaque(), truth, 100, 0)


def test_normality_parameters_by_case():
    tableau = build_tableau(epanechnikov(), 1)
    even = normality_params(tableau, parse_model("wiener"), 0.5, 0)
    assert even.case is NormalityCase.EVEN
    assert even.scaling_exponent == 0 and even.decay_exponent == 4
    assert abs(even.variance - 0.5) < 1e-10
    n = 400
    assert even.condition_holds(n, n**-0.3)
    assert not even.condition_holds(n, 0.5)

    rough = normality_params(tableau, parse_model("ou:15"), 0.5, 1)
    assert rough.case is NormalityCase.ODD_ROUGH
    assert (rough.scaling_exponent, rough.decay_exponent) == (1, 5)
    assert abs(rough.variance - 30 * abs(tableau.abs_variance_constant(1))) < 1e-10
    assert abs(rough.scale(100, 0.25) - 5.0) < 1e-12

    smooth = normality_params(tableau, parse_model("sqexp:1"), 0.5, 1)
    assert smooth.case is NormalityCase.ODD_SMOOTH
    assert (smooth.scaling_exponent, smooth.decay_exponent) == (0, 4)
    assert abs(smooth.variance - 2.0) < 1e-10

    quadratic_tableau = build_tableau(epanechnikov(), 2)
    quadratic = normality_params(quadratic_tableau, parse_model("ou:15"), 0.5, 1)
    assert quadratic.decay_exponent == 5
    even_quadratic = normality_params(quadratic_tableau, parse_model("wiener"), 0.5, 0)
    assert even_quadratic.decay_exponent == 8


def _design_sum_residuals(N, bandwidths):
    kernel = epanechnikov()
    tableau = build_tableau(kernel, 1)
    model = parse_model("ou:1")
    grid = quantile_grid(uniform_density(), N)
    ratios = []
    for h in bandwidths:
        residual = sn_star_finite(model, grid, kernel, 1, 0.5, h) - sn_star_expansion(
            tableau, model, uniform_density(), 0.5, h
        )
        ratios.append((abs(residual[0, 0]) / h, abs(residual[1, 1]) / h**3))
    return ratios


def test_design_sum_expansion_residual_vanishes_faster_than_h():
    ratios = _design_sum_residuals(2001, (0.4, 0.2, 0.1))
    for (a0, a1), (b0, b1) in zip(ratios, ratios[1:]):
        assert b0 < a0 and b1 < a1
    assert ratios[-1][0] < 0.05


@pytest.mark.slow
def test_design_sum_expansion_on_a_dense_grid():
    ratios = _design_sum_residuals(10_000, (0.2, 0.1, 0.05))
    for (a0, a1), (b0, b1) in zip(ratios, ratios[1:]):
        assert b0 < a0 and b1 < a1


@pytest.mark.parametrize("p, nu", [(1, 0), (2, 1)])
@pytest.mark.parametrize("x", [0.3, 0.5, 0.7])
def test_expansion_agrees_with_exact_moments(p, nu, x):
    grid = quantile_grid(uniform_density(), 4001)
    model = parse_model("wiener")
    truth = _exponential()
    tableau = build_tableau(epanechnikov(), p)
    spec = FitSpec(p=p, nu=nu, h=0.05, kernel="epanechnikov")
    n = 10_000
    exact = exact_moments(truth, model, grid, spec, x, n)
    predicted = asymptotic_moments(tableau, model, truth, x, 0.05, n, nu)
    assert 0.95 <= exact.bias / predicted.bias.total <= 1.05
    assert 0.95 <= exact.variance / predicted.variance.total <= 1.05


def test_bias_ratio_approaches_one():
    grid = quantile_grid(uniform_density(), 4001)
    truth = _exponential()
    tableau = build_tableau(epanechnikov(), 1)
    gaps = []
    for h in (0.2, 0.1, 0.05):
        spec = FitSpec(p=1, nu=0, h=h, kernel="epanechnikov")
        exact = exact_moments(truth, parse_model("wiener"), grid, spec, 0.5, 100)
        gaps.append(abs(exact.bias / asym_bias(tableau, truth, 0.5, h, 0).total - 1))
    assert gaps[0] > gaps[1] > gaps[2]


def test_smooth_covariance_variance_slope():
    grid = quantile_grid(uniform_density(), 4001)
    model = parse_model("sqexp:1")
    truth = _exponential()
    tableau = build_tableau(epanechnikov(), 1)
    n, h, step = 10_000, 0.05, 0.005

    def variance(value):
        spec = FitSpec(p=1, nu=0, h=value, kernel="epanechnikov")
        return exact_moments(truth, model, grid, spec, 0.5, n).variance

    measured = (variance(h + step) - variance(h - step)) / (2 * step)
    second = asym_variance_regular(tableau, model, 0.5, h, n, 0).second
    predicted = 2 * second.coefficient * h / n
    assert measured < 0
    assert abs(measured / predicted - 1) < 0.1
