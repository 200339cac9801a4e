"""CSV exchange format for curves and estimates.

Curves: header ``x,<x_1>,...,<x_N>``, then one ``curve_<i>,<y_i1>,...,<y_iN>`` row per curve.
Estimates: header ``x,estimate`` and one row per evaluation point.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Tuple

import numpy as np

from locpoly_lab.design import DesignGrid
from locpoly_lab.io import atomic_write_text

from .sample import FunctionalSample


class CurveFormatError(ValueError):
    """Raised when a curves file does not follow the exchange format."""


def read_curves_csv(path: Path, density: str = "empirical") -> FunctionalSample:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            rows = [row for row in csv.reader(handle) if row]
    except OSError as exc:
        raise CurveFormatError(f"Failed to read curves file {path}: {exc}") from exc
    if len(rows) < 2:
        raise CurveFormatError(f"{path}: expected a header row and at least one curve")
    header, body = rows[0], rows[1:]
    if header[0].strip() != "x":
        raise CurveFormatError(f"{path}: header must start with 'x', got '{header[0]}'")
    try:
        grid = DesignGrid(np.array([float(v) for v in header[1:]]), density=density)
        values = np.array([[float(v) for v in row[1:]] for row in body])
    except ValueError as exc:
        raise CurveFormatError(f"{path}: {exc}") from exc
    if values.shape[1] != len(grid):
        raise CurveFormatError(f"{path}: curve rows must have {len(grid)} values")
    return FunctionalSample(grid=grid, values=values)


def _render(rows: Iterable[Iterable]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def write_curves_csv(path: Path, sample: FunctionalSample) -> Path:
    header = ["x"] + [repr(float(x)) for x in sample.points]
    rows = [header]
    for i, curve in enumerate(sample.values, start=1):
        rows.append([f"curve_{i}"] + [repr(float(y)) for y in curve])
    return atomic_write_text(path, _render(rows))


def write_estimate_csv(path: Path, estimates: Iterable[Tuple[float, float]]) -> Path:
    rows = [["x", "estimate"]]
    rows.extend([repr(float(x)), repr(float(value))] for x, value in estimates)
    return atomic_write_text(path, _render(rows))
