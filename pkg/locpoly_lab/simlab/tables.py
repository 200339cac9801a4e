"""Result tables: one row per experiment, bandwidths and L2 error quartiles per selector.

CSV cells follow the published layout, ``0.07`` for a bandwidth and ``0.031 (0.015-0.061)``
for the median L2 error with its first and third quartiles. JSON carries the same rounded
values as numbers.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from locpoly_lab.bandwidth import SelectionMethod, format_bandwidth, parse_bandwidth
from locpoly_lab.io import atomic_write_text
from locpoly_lab.smoothing import is_unbounded

from .runner import ExperimentReport, Quartiles

COLUMN_SUFFIX: Dict[SelectionMethod, str] = {
    SelectionMethod.EXACT: "ex",
    SelectionMethod.ASYMPTOTIC: "as",
    SelectionMethod.CV: "cv",
    SelectionMethod.PLUGIN: "pi",
}
BASE_METHODS = (SelectionMethod.EXACT, SelectionMethod.ASYMPTOTIC, SelectionMethod.CV)
ERROR_CELL = re.compile(r"^\s*([^\s()]+)\s*\(\s*([^\s()-]+)-([^\s()-]+)\s*\)\s*$")


class TableFormatError(ValueError):
    """Raised when a table file cannot be parsed."""


def _methods(reports: Sequence[ExperimentReport]) -> List[SelectionMethod]:
    methods = list(BASE_METHODS)
    if any(SelectionMethod.PLUGIN in report.summaries for report in reports):
        methods.append(SelectionMethod.PLUGIN)
    return methods


def table_columns(methods: Sequence[SelectionMethod] = BASE_METHODS) -> List[str]:
    suffixes = [COLUMN_SUFFIX[m] for m in methods]
    return ["n", "N"] + [f"h_{s}" for s in suffixes] + [f"L2_{s}" for s in suffixes]


def round_bandwidth(h: float) -> float:
    return h if is_unbounded(h) else round(float(h), 2)


def round_error(value: float) -> float:
    return float(_significant(value))


def _significant(value: float) -> str:
    return np.format_float_positional(value, precision=3, unique=False, fractional=False, trim="-")


def format_error_cell(errors: Quartiles) -> str:
    return (
        f"{_significant(errors.median)} "
        f"({_significant(errors.q1)}-{_significant(errors.q3)})"
    )


def parse_error_cell(cell: str) -> Quartiles:
    match = ERROR_CELL.match(cell)
    if not match:
        raise TableFormatError(f"Cannot parse error cell '{cell}'")
    median, q1, q3 = (float(group) for group in match.groups())
    return Quartiles(q1=q1, median=median, q3=q3)


@dataclass(frozen=True)
class TableRow:
    """One parsed table row; selectors absent from the experiment map to ``None``."""

    n: int
    N: int
    bandwidths: Dict[str, Optional[float]] = field(default_factory=dict)
    errors: Dict[str, Optional[Quartiles]] = field(default_factory=dict)


def _csv_cells(report: ExperimentReport, methods: Sequence[SelectionMethod]) -> List[str]:
    bandwidths, errors = [], []
    for method in methods:
        summary = report.summaries.get(method)
        h = None if summary is None else summary.h
        if h is None:
            bandwidths.append("")
        else:
            bandwidths.append("inf" if is_unbounded(h) else f"{h:.2f}")
        if summary is None or summary.errors is None:
            errors.append("")
        else:
            errors.append(format_error_cell(summary.errors))
    return [str(report.config.n), str(report.config.N)] + bandwidths + errors


def _json_row(report: ExperimentReport, methods: Sequence[SelectionMethod]) -> dict:
    row = {"n": report.config.n, "N": report.config.N}
    for method in methods:
        suffix = COLUMN_SUFFIX[method]
        summary = report.summaries.get(method)
        h = None if summary is None or summary.h is None else round_bandwidth(summary.h)
        row[f"h_{suffix}"] = None if h is None else format_bandwidth(h)
        if summary is None or summary.errors is None:
            row[f"L2_{suffix}"] = None
        else:
            row[f"L2_{suffix}"] = {
                key: round_error(value) for key, value in summary.errors.to_dict().items()
            }
    return row


def render_table(reports: Sequence[ExperimentReport], fmt: str = "csv") -> str:
    methods = _methods(reports)
    columns = table_columns(methods)
    if fmt == "json":
        payload = {"columns": columns, "rows": [_json_row(r, methods) for r in reports]}
        return json.dumps(payload, indent=2)
    if fmt != "csv":
        raise ValueError(f"Unsupported table format '{fmt}' (expected csv or json)")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(_csv_cells(report, methods) for report in reports)
    return buffer.getvalue()


def _format_for(path: Path, fmt: Optional[str]) -> str:
    return fmt or ("json" if path.suffix.lower() == ".json" else "csv")


def emit_table(
    reports: Sequence[ExperimentReport], path: Path, fmt: Optional[str] = None
) -> Path:
    """Write the table as CSV or JSON (chosen from the suffix unless ``fmt`` is given)."""
    path = Path(path)
    return atomic_write_text(path, render_table(reports, _format_for(path, fmt)))


def _optional_bandwidth(value) -> Optional[float]:
    if value is None or value == "":
        return None
    return parse_bandwidth(value)


def _split_columns(columns: Sequence[str]) -> List[str]:
    if list(columns[:2]) != ["n", "N"]:
        raise TableFormatError(f"Table must start with columns n, N; got {list(columns[:2])}")
    return [column[2:] for column in columns if column.startswith("h_")]


def _read_csv(text: str) -> List[TableRow]:
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise TableFormatError("Table file is empty")
    header, body = rows[0], rows[1:]
    suffixes = _split_columns(header)
    parsed = []
    for row in body:
        if len(row) != len(header):
            raise TableFormatError(f"Row {row} has {len(row)} cells, expected {len(header)}")
        cells = dict(zip(header, row))
        parsed.append(
            TableRow(
                n=int(cells["n"]),
                N=int(cells["N"]),
                bandwidths={s: _optional_bandwidth(cells[f"h_{s}"]) for s in suffixes},
                errors={
                    s: parse_error_cell(cells[f"L2_{s}"]) if cells[f"L2_{s}"] else None
                    for s in suffixes
                },
            )
        )
    return parsed


def _read_json(text: str) -> List[TableRow]:
    payload = json.loads(text)
    suffixes = _split_columns(payload.get("columns", []))
    parsed = []
    for row in payload.get("rows", []):
        errors = {}
        for s in suffixes:
            cell = row.get(f"L2_{s}")
            errors[s] = None if cell is None else Quartiles(cell["q1"], cell["median"], cell["q3"])
        parsed.append(
            TableRow(
                n=int(row["n"]),
                N=int(row["N"]),
                bandwidths={s: _optional_bandwidth(row.get(f"h_{s}")) for s in suffixes},
                errors=errors,
            )
        )
    return parsed


def read_table(path: Path, fmt: Optional[str] = None) -> List[TableRow]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableFormatError(f"Failed to read table {path}: {exc}") from exc
    try:
        if _format_for(path, fmt) == "json":
            return _read_json(text)
        return _read_csv(text)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, TableFormatError):
            raise
        raise TableFormatError(f"{path}: {exc}") from exc
