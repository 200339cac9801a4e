"""Append-only CSV log of replication records."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Optional

from locpoly_lab.telemetry.records import ReplicationRecord

HEADER = ["experiment", "replication", "method", "h", "l2_error", "failure"]


def _number(value: Optional[float], precision: int) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    return f"{value:.{precision}g}"


class ReplicationLogger:
    """Writes one CSV row per record; the header goes out only when the file is new."""

    def __init__(self, path: Path, write_header: bool = True) -> None:
        self.path = Path(path)
        self._file = None
        self._writer = None
        self._write_header = write_header

    def __enter__(self):
        self.open()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()

    def open(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        exists = self.path.exists() and self.path.stat().st_size > 0
        self._file = self.path.open("a", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file, lineterminator="\n")
        if self._write_header and not exists:
            self._writer.writerow(HEADER)

    def close(self) -> None:
        if self._file:
            self._file.close()
        self._file = None
        self._writer = None

    def log(self, record: ReplicationRecord) -> None:
        if not self._writer:
            self.open()
        self._writer.writerow([
            record.experiment,
            record.replication,
            record.method,
            _number(record.h, 6),
            _number(record.l2_error, 10),
            record.failure or "",
        ])
        self._file.flush()

    def log_many(self, records: Iterable[ReplicationRecord]) -> None:
        for record in records:
            self.log(record)
