import json
import math

import numpy as np
import pytest
from numpy.polynomial import Polynomial

from locpoly_lab.bandwidth import (
    AllCandidatesInfeasible,
    BandwidthResult,
    SelectionMethod,
    candidate_ladder,
    cross_validate,
    exact_optimal_bandwidth,
    imse_profile,
    parse_bandwidth,
    plugin_bandwidth,
    quadratic_variation,
    select_minimizer,
)
from locpoly_lab.covariance import FunctionCovariance, parse_model, sample_paths
from locpoly_lab.design import DesignGrid, quantile_grid, uniform_density
from locpoly_lab.kernels import build_tableau, kernel_from_id
from locpoly_lab.smoothing import UNBOUNDED, FitSpec, FunctionalSample, curve_estimate

QUARTIC = 16 * Polynomial([-0.5, 1.0]) ** 4


def _table(poly, count=6):
    return tuple(poly.deriv(k) if k else poly for k in range(count))


def _white_noise():
    return FunctionCovariance(lambda x, y: np.where(x == y, 1.0, 0.0), name="white")


def _grid(N):
    return quantile_grid(uniform_density(), N)


def test_candidate_ladder_shape():
    ladder = candidate_ladder(100, 1, 1.0)
    assert len(ladder) == 61
    assert ladder[-1] == UNBOUNDED
    assert abs(ladder[0] - 1 / 99) < 1e-15
    assert ladder[-2] == 1.0
    assert all(a < b for a, b in zip(ladder, ladder[1:]))
    assert abs(candidate_ladder(10, 1, 3.0)[0] - 1 / 27) < 1e-15
    assert abs(candidate_ladder(10, 0, 1.0, size=5)[0] - 0.5 / 9) < 1e-15


def test_minimizer_breaks_ties_toward_larger_bandwidth():
    curve = [(0.1, 1.0), (0.2, 0.5), (0.3, 0.5), (UNBOUNDED, 2.0)]
    assert select_minimizer(curve) == 2
    assert select_minimizer([(0.1, 0.0), (UNBOUNDED, 1e-30)]) == 1
    with pytest.raises(AllCandidatesInfeasible):
        select_minimizer([(0.1, math.inf), (0.2, math.inf)])


def test_bandwidth_result_serializes_unbounded():
    result = BandwidthResult(
        h=UNBOUNDED, method=SelectionMethod.CV, objective=((0.1, 2.0), (UNBOUNDED, 1.0))
    )
    payload = json.loads(json.dumps(result.to_dict()))
    assert payload["h"] == "inf"
    assert payload["objective"][1][0] == "inf"
    assert parse_bandwidth(payload["h"]) == UNBOUNDED
    assert parse_bandwidth("0.25") == 0.25


def test_exact_bandwidth_is_unbounded_for_lines():
    truth = _table(Polynomial([1.0, -2.0]))
    result = exact_optimal_bandwidth(truth, _white_noise(), _grid(20), n=10, nu=0, p=1)
    assert result.unbounded
    assert result.diagnostics["unbounded"]


def test_exact_bandwidth_minimizes_its_objective():
    result = exact_optimal_bandwidth(
        _table(QUARTIC),
        parse_model("wiener"),
        _grid(50),
        n=50,
        nu=0,
        p=1,
        kernel="truncated-gaussian:3",
    )
    scores = dict(result.objective)
    assert all(score >= scores[result.h] for score in scores.values())
    assert 0 < result.h < 1
    assert not result.diagnostics["at_lower_edge"]


def test_exact_bandwidth_shrinks_with_more_curves():
    grid = _grid(50)
    chosen = [
        exact_optimal_bandwidth(
            _table(QUARTIC),
            parse_model("wiener"),
            grid,
            n=n,
            nu=0,
            p=1,
            kernel="truncated-gaussian:3",
        ).h
        for n in (10, 50, 100)
    ]
    assert chosen[1] <= chosen[0] + 1e-3
    assert chosen[2] <= chosen[1] + 1e-3


def test_exact_bandwidth_parallel_matches_serial():
    args = (_table(QUARTIC), parse_model("ou:15"), _grid(30))
    serial = exact_optimal_bandwidth(*args, n=10, nu=0, p=1)
    parallel = exact_optimal_bandwidth(*args, n=10, nu=0, p=1, workers=4)
    assert serial.objective == parallel.objective


@pytest.mark.slow
def test_exact_bandwidth_on_the_simulation_scale():
    result = exact_optimal_bandwidth(
        _table(QUARTIC),
        parse_model("wiener"),
        _grid(100),
        n=100,
        nu=0,
        p=1,
        kernel="truncated-gaussian:3",
    )
    assert abs(result.h - 0.03) <= 0.015


def test_imse_profile_trades_bias_for_variance():
    profile = imse_profile(
        _table(QUARTIC),
        parse_model("wiener"),
        _grid(101),
        n=20,
        nu=0,
        p=1,
        candidates=[0.05, 0.1, 0.2],
    )
    assert [point.h for point in profile] == [0.05, 0.1, 0.2]
    assert profile[0].bias2 < profile[1].bias2 < profile[2].bias2
    assert profile[0].variance > profile[1].variance > profile[2].variance
    assert all(abs(point.imse - point.bias2 - point.variance) < 1e-15 for point in profile)


def _naive_cv(sample, p, h):
    total = 0.0
    spec = FitSpec(p=p, nu=0, h=h)
    for i in range(sample.n):
        rest = FunctionalSample(grid=sample.grid, values=np.delete(sample.values, i, axis=0))
        predictions = np.array([value for _, value in curve_estimate(rest, spec, sample.points)])
        total += np.sum((predictions - sample.values[i]) ** 2)
    return total / (sample.n * sample.N)


def test_fast_cross_validation_matches_refitting():
    rng = np.random.default_rng(42)
    candidates = [0.3, 0.6, UNBOUNDED]
    for _ in range(100):
        n = int(rng.integers(2, 11))
        N = int(rng.integers(8, 21))
        p = int(rng.integers(0, 3))
        sample = FunctionalSample(grid=_grid(N), values=rng.standard_normal((n, N)))
        result = cross_validate(sample, p, candidates=candidates)
        for h, score in result.objective:
            assert abs(score - _naive_cv(sample, p, h)) < 1e-10


def test_cross_validation_prefers_widest_window_on_exact_lines():
    grid = _grid(15)
    line = 0.5 + 2.0 * grid.points
    sample = FunctionalSample(grid=grid, values=np.vstack([line, line]))
    result = cross_validate(sample, 1)
    assert result.unbounded
    assert max(score for _, score in result.objective) < 1e-20


def test_cross_validation_rejects_impossible_fits():
    sample = FunctionalSample(grid=_grid(3), values=np.ones((2, 3)))
    with pytest.raises(AllCandidatesInfeasible):
        cross_validate(sample, 4)
    with pytest.raises(ValueError):
        cross_validate(FunctionalSample(grid=_grid(10), values=np.ones((1, 10))), 1)


def test_quadratic_variation_constant_curves():
    sample = FunctionalSample(grid=_grid(10), values=np.full((4, 10), 3.0))
    assert quadratic_variation(sample) == 0.0


def test_quadratic_variation_weight_is_linear():
    rng = np.random.default_rng(3)
    sample = FunctionalSample(grid=_grid(12), values=rng.standard_normal((5, 12)))
    base = quadratic_variation(sample)
    assert abs(quadratic_variation(sample, weight=lambda x: 2 + 0 * x) - 2 * base) < 1e-12


@pytest.mark.parametrize(
    "model_id, expected, tolerance", [("wiener", 1.0, 0.05), ("ou:15", 27.8, 1.0)]
)
def test_quadratic_variation_estimates_alpha(model_id, expected, tolerance):
    grid = _grid(100)
    values = sample_paths(parse_model(model_id), grid, 1000, seed=11)
    estimate = quadratic_variation(FunctionalSample(grid=grid, values=values))
    assert abs(estimate - expected) < tolerance


def test_plugin_recovers_curvature_from_noiseless_curves():
    grid = _grid(100)
    values = np.tile(QUARTIC(grid.points), (2, 1))
    result = plugin_bandwidth(FunctionalSample(grid=grid, values=values), nu=0, p=1)
    mu2 = build_tableau(kernel_from_id("truncated-gaussian"), 1).mu(2)
    expected = mu2**2 / 4 * 460.8
    assert abs(result.diagnostics["bias_integral"] / expected - 1) < 0.1
    assert result.method is SelectionMethod.PLUGIN


def test_plugin_alpha_comes_from_quadratic_variation():
    grid = _grid(100)
    noise = sample_paths(parse_model("wiener"), grid, 1000, seed=5)
    sample = FunctionalSample(grid=grid, values=2.0 * grid.points**2 + noise)
    result = plugin_bandwidth(sample, nu=0, p=1)
    assert abs(result.diagnostics["alpha_integral"] - 1.0) < 0.1
    assert 0 < result.h < 1

    weighted = plugin_bandwidth(sample, nu=0, p=1, weight=lambda x: 2 + 0 * x)
    assert abs(weighted.h / result.h - 1) < 1e-9


def test_plugin_rejects_tiny_samples():
    with pytest.raises(ValueError):
        plugin_bandwidth(FunctionalSample(grid=_grid(3), values=np.ones((2, 3))), nu=0, p=1)
    with pytest.raises(ValueError):
        plugin_bandwidth(FunctionalSample(grid=_grid(30), values=np.ones((1, 30))), nu=0, p=1)


def test_design_grid_ladder_uses_kernel_support():
    grid = DesignGrid(np.linspace(0.0, 1.0, 21))
    result = cross_validate(
        FunctionalSample(grid=grid, values=np.random.default_rng(1).standard_normal((3, 21))),
        1,
        kernel="truncated-gaussian:3",
    )
    finite = [h for h, _ in result.objective if h != UNBOUNDED]
    assert abs(finite[0] - 1 / 60) < 1e-15
