"""Data series behind the study's figures, written as CSV for external plotting."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

from locpoly_lab.bandwidth import candidate_ladder, imse_profile
from locpoly_lab.covariance import parse_model
from locpoly_lab.design import quantile_grid, uniform_density
from locpoly_lab.io import atomic_write_text
from locpoly_lab.kernels import kernel_from_id
from locpoly_lab.smoothing import is_unbounded

from .catalog import regression_catalog

REGRESSION_MESH = 201
FIGURES = ("regressions", "linear-vs-quadratic")


@dataclass(frozen=True)
class FigureSeries:
    name: str
    columns: Tuple[str, ...]
    rows: Tuple[Tuple[float, ...], ...]

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.array([row[index] for row in self.rows], dtype=float)

    def to_csv(self, path: Path) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows([repr(float(value)) for value in row] for row in self.rows)
        return atomic_write_text(path, buffer.getvalue())


def regression_series(mesh_size: int = REGRESSION_MESH) -> FigureSeries:
    """``m1``, ``m2`` and their first derivatives on an even mesh."""
    mesh = np.linspace(0.0, 1.0, mesh_size)
    m1, m2 = regression_catalog("m1"), regression_catalog("m2")
    table = np.column_stack([mesh, m1(mesh), m2(mesh), m1[1](mesh), m2[1](mesh)])
    return FigureSeries(
        name="regressions",
        columns=("x", "m1", "m2", "m1_prime", "m2_prime"),
        rows=tuple(tuple(float(v) for v in row) for row in table),
    )


def imse_comparison_series(
    regression: str = "m2",
    covariance: str = "ou:15",
    n: int = 50,
    N: int = 50,
    nu: int = 1,
    orders: Sequence[int] = (1, 2),
    kernel: str = "truncated-gaussian:3",
    workers: int = 1,
) -> FigureSeries:
    """Integrated squared bias, variance and IMSE over the finite ladder, per fit order."""
    truth = regression_catalog(regression)
    model = parse_model(covariance)
    grid = quantile_grid(uniform_density(), N)
    resolved = kernel_from_id(kernel)
    rows = []
    for p in orders:
        candidates = [h for h in candidate_ladder(N, p, resolved.tau) if not is_unbounded(h)]
        profile = imse_profile(
            truth, model, grid, n, nu, p, kernel=resolved, candidates=candidates, workers=workers
        )
        rows.extend((float(p), pt.h, pt.bias2, pt.variance, pt.imse) for pt in profile)
    return FigureSeries(
        name="linear-vs-quadratic",
        columns=("p", "h", "bias2", "variance", "imse"),
        rows=tuple(rows),
    )


def figure_series(which: str, **options) -> FigureSeries:
    if which == "regressions":
        return regression_series(**options)
    if which == "linear-vs-quadratic":
        return imse_comparison_series(**options)
    raise ValueError(f"Unknown figure '{which}' (expected one of {', '.join(FIGURES)})")
