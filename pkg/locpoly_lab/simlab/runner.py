"""Monte Carlo replication engine.

Oracle bandwidths (exact IMSE and asymptotic formula) are computed once per experiment;
each replication then draws ``n`` error paths from its own seeded stream, selects the
data-driven bandwidths and records the L2 error of every selector.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from locpoly_lab.asymptotics import h_opt_global
from locpoly_lab.bandwidth import (
    LADDER_SIZE,
    AllCandidatesInfeasible,
    CrossValidator,
    SelectionMethod,
    exact_optimal_bandwidth,
    format_bandwidth,
    plugin_bandwidth,
)
from locpoly_lab.covariance import GaussianPathSampler, NotAvailable, parse_model, replication_rng
from locpoly_lab.design import density_from_id, optimal_density, quantile_grid
from locpoly_lab.kernels import build_tableau, kernel_from_id
from locpoly_lab.smoothing import FitSpec, FunctionalSample, LocalFitError, smoother_matrix
from locpoly_lab.telemetry import ReplicationLogger, ReplicationRecord

from .catalog import regression_catalog, snr
from .config import OPTIMAL_DENSITY, ExperimentConfig

logger = logging.getLogger(__name__)

FAILURE_FRACTION = 0.01
CHUNK_SIZE = 25
REPLICATION_ERRORS = (
    LocalFitError,
    AllCandidatesInfeasible,
    NotAvailable,
    ValueError,
    ArithmeticError,
)


class ExperimentFailed(RuntimeError):
    """Raised when an experiment cannot be set up or too many replications fail."""


@dataclass(frozen=True)
class Quartiles:
    q1: float
    median: float
    q3: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Quartiles":
        q1, median, q3 = np.quantile(
            np.sort(np.asarray(values, dtype=float)), [0.25, 0.5, 0.75], method="median_unbiased"
        )
        return cls(float(q1), float(median), float(q3))

    def to_dict(self) -> Dict[str, float]:
        return {"q1": self.q1, "median": self.median, "q3": self.q3}


@dataclass(frozen=True)
class MethodSummary:
    """Bandwidth (fixed, or median over replications) and L2 error quartiles of one selector.

    ``note`` explains why a selector produced no errors, e.g. an asymptotic formula that does
    not apply to the scenario.
    """

    method: SelectionMethod
    h: Optional[float]
    errors: Optional[Quartiles]
    note: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "h": None if self.h is None else format_bandwidth(self.h),
            "l2": None if self.errors is None else self.errors.to_dict(),
            "note": self.note,
        }


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    summaries: Dict[SelectionMethod, MethodSummary]
    snr: float
    failures: int
    runtime_s: float = field(default=0.0, compare=False)

    def bandwidth(self, method: SelectionMethod) -> Optional[float]:
        return self.summaries[method].h

    def errors(self, method: SelectionMethod) -> Optional[Quartiles]:
        return self.summaries[method].errors

    def to_dict(self) -> dict:
        return {
            "experiment": self.config.to_dict(),
            "snr": self.snr,
            "failures": self.failures,
            "methods": {m.value: summary.to_dict() for m, summary in self.summaries.items()},
        }


@dataclass
class Replication:
    index: int
    bandwidths: Dict[SelectionMethod, float] = field(default_factory=dict)
    errors: Dict[SelectionMethod, float] = field(default_factory=dict)
    failure: Optional[str] = None

    def records(self, experiment: str) -> List[ReplicationRecord]:
        if self.failure:
            return [ReplicationRecord(experiment, self.index, "-", failure=self.failure)]
        return [
            ReplicationRecord(experiment, self.index, m.value, h, self.errors.get(m))
            for m, h in self.bandwidths.items()
        ]


class ExperimentSetup:
    """Everything a replication needs that does not depend on the random draw."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config
        try:
            self.regression = regression_catalog(config.regression)
            self.model = parse_model(config.covariance)
            self.kernel = kernel_from_id(config.kernel)
            self.tableau = build_tableau(self.kernel, config.p)
            self.weight = None if config.weight == "uniform" else density_from_id(config.weight)
            self.density = self._design_density()
            self.grid = quantile_grid(self.density, config.N)
            self.sampler = GaussianPathSampler(self.model, self.grid)
        except (ValueError, RuntimeError) as exc:
            raise ExperimentFailed(f"experiment '{config.name}': {exc}") from exc
        points = self.grid.points
        if config.mesh_size is None:
            self.eval_points = points
        else:
            self.eval_points = np.linspace(0.0, 1.0, config.mesh_size)
        self.mean_values = np.asarray(self.regression(points), dtype=float)
        self.target = np.asarray(self.regression[config.nu](self.eval_points), dtype=float)
        self.spec = FitSpec(p=config.p, nu=config.nu, h=1.0, kernel=self.kernel)
        self._smoothers: Dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    def _design_density(self):
        config = self.config
        if config.density != OPTIMAL_DENSITY:
            return density_from_id(config.density)
        return optimal_density(
            self.tableau,
            config.nu,
            self.regression[config.p + 1],
            self.regression[config.p + 2],
        )

    def smoother(self, h: float) -> np.ndarray:
        """Weight matrix of ``m_hat^(nu)`` at the evaluation points, cached per bandwidth."""
        with self._lock:
            cached = self._smoothers.get(h)
        if cached is None:
            cached = smoother_matrix(self.grid, self.spec.with_bandwidth(h), self.eval_points)
            with self._lock:
                self._smoothers[h] = cached
        return cached

    def l2_error(self, estimate: np.ndarray) -> float:
        return float(integrate.simpson((estimate - self.target) ** 2, x=self.eval_points))

    def sample(self, index: int) -> FunctionalSample:
        rng = replication_rng(self.config.seed, index)
        values = self.mean_values + self.sampler.draw(rng, self.config.n)
        return FunctionalSample(grid=self.grid, values=values)


def oracle_bandwidths(
    setup: ExperimentSetup, workers: int = 1, ladder_size: int = LADDER_SIZE
) -> Tuple[Dict[SelectionMethod, float], Dict[SelectionMethod, str]]:
    """Exact-IMSE and asymptotic bandwidths, or a note saying why one is unavailable."""
    config = setup.config
    bandwidths: Dict[SelectionMethod, float] = {}
    notes: Dict[SelectionMethod, str] = {}
    if SelectionMethod.EXACT in config.methods:
        try:
            bandwidths[SelectionMethod.EXACT] = exact_optimal_bandwidth(
                setup.regression,
                setup.model,
                setup.grid,
                config.n,
                config.nu,
                config.p,
                kernel=setup.kernel,
                weight=setup.weight,
                ladder_size=ladder_size,
                workers=workers,
            ).h
        except (AllCandidatesInfeasible, ValueError) as exc:
            notes[SelectionMethod.EXACT] = str(exc)
    if SelectionMethod.ASYMPTOTIC in config.methods:
        try:
            bandwidths[SelectionMethod.ASYMPTOTIC] = h_opt_global(
                setup.tableau,
                setup.model,
                setup.regression,
                config.n,
                config.nu,
                weight=setup.weight,
                f=None if setup.density.is_uniform else setup.density,
            ).h
        except (NotAvailable, ValueError) as exc:
            notes[SelectionMethod.ASYMPTOTIC] = str(exc)
    for method, h in list(bandwidths.items()):
        try:
            setup.smoother(h)
        except LocalFitError as exc:
            del bandwidths[method]
            notes[method] = f"h={h:.4g} is infeasible on this design: {exc}"
    if config.n < 2:
        for method in (SelectionMethod.CV, SelectionMethod.PLUGIN):
            if method in config.methods:
                notes[method] = "data-driven selection needs n >= 2"
    for method, note in notes.items():
        logger.warning("experiment '%s': no %s bandwidth (%s)", config.name, method.value, note)
    return bandwidths, notes


def _replicate(
    setup: ExperimentSetup,
    index: int,
    fixed: Dict[SelectionMethod, float],
    validator: Optional[CrossValidator],
) -> Replication:
    config = setup.config
    outcome = Replication(index=index, bandwidths=dict(fixed))
    try:
        sample = setup.sample(index)
        if validator is not None:
            outcome.bandwidths[SelectionMethod.CV] = validator(sample).h
        if SelectionMethod.PLUGIN in config.methods and config.n >= 2:
            outcome.bandwidths[SelectionMethod.PLUGIN] = plugin_bandwidth(
                sample, config.nu, config.p, kernel=setup.kernel, weight=setup.weight
            ).h
        mean = sample.mean_curve()
        for method, h in outcome.bandwidths.items():
            outcome.errors[method] = setup.l2_error(setup.smoother(h) @ mean)
    except REPLICATION_ERRORS as exc:
        outcome.failure = f"{type(exc).__name__}: {exc}"
        logger.warning("experiment '%s' replication %d failed: %s", config.name, index, exc)
    return outcome


def _chunks(total: int, size: int) -> List[range]:
    return [range(start, min(start + size, total)) for start in range(0, total, size)]


def run_replications(
    setup: ExperimentSetup,
    fixed: Dict[SelectionMethod, float],
    validator: Optional[CrossValidator],
    indices: Iterable[int],
    workers: int = 1,
) -> List[Replication]:
    """Replications in index order, however they were distributed over workers."""
    indices = list(indices)
    chunks = _chunks(len(indices), CHUNK_SIZE)

    def run_chunk(chunk: range) -> List[Replication]:
        return [_replicate(setup, indices[i], fixed, validator) for i in chunk]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, chunks))
    else:
        parts = [run_chunk(chunk) for chunk in chunks]
    return sorted((rep for part in parts for rep in part), key=lambda rep: rep.index)


def summarize(
    config: ExperimentConfig,
    replications: Sequence[Replication],
    fixed: Dict[SelectionMethod, float],
    notes: Dict[SelectionMethod, str],
) -> Dict[SelectionMethod, MethodSummary]:
    completed = [rep for rep in replications if rep.failure is None]
    summaries: Dict[SelectionMethod, MethodSummary] = {}
    for method in config.methods:
        if method in notes:
            summaries[method] = MethodSummary(method, fixed.get(method), None, notes[method])
            continue
        errors = [rep.errors[method] for rep in completed]
        if method in fixed:
            h = fixed[method]
        else:
            h = float(np.median([rep.bandwidths[method] for rep in completed]))
        summaries[method] = MethodSummary(method, h, Quartiles.from_values(errors))
    return summaries


def run_experiment(
    config: ExperimentConfig,
    workers: int = 1,
    log_path: Optional[Path] = None,
    failure_fraction: float = FAILURE_FRACTION,
    ladder_size: int = LADDER_SIZE,
) -> ExperimentReport:
    """Run every replication of ``config``; the report depends on the seed only."""
    started = time.perf_counter()
    setup = ExperimentSetup(config)
    fixed, notes = oracle_bandwidths(setup, workers=workers, ladder_size=ladder_size)

    validator = None
    if SelectionMethod.CV in config.methods and SelectionMethod.CV not in notes:
        try:
            validator = CrossValidator(setup.grid, config.p, setup.kernel)
        except AllCandidatesInfeasible as exc:
            notes[SelectionMethod.CV] = str(exc)

    replications = run_replications(
        setup, fixed, validator, range(config.replications), workers=workers
    )
    if log_path is not None:
        with ReplicationLogger(Path(log_path)) as replication_log:
            for rep in replications:
                replication_log.log_many(rep.records(config.name))

    failures = sum(rep.failure is not None for rep in replications)
    if failures == config.replications or failures > failure_fraction * config.replications:
        raise ExperimentFailed(
            f"experiment '{config.name}': {failures} of {config.replications} replications "
            f"failed (limit {failure_fraction:.1%})"
        )

    report = ExperimentReport(
        config=config,
        summaries=summarize(config, replications, fixed, notes),
        snr=snr(setup.regression, setup.model, config.n),
        failures=failures,
        runtime_s=time.perf_counter() - started,
    )
    logger.info(
        "experiment '%s': %d replications in %.1f s (%d failed)",
        config.name,
        config.replications,
        report.runtime_s,
        failures,
    )
    return report
