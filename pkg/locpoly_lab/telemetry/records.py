"""Per-replication outcomes of a Monte Carlo experiment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class ReplicationRecord:
    """Bandwidth and L2 error of one selector in one replication.

    ``failure`` holds the error message when the replication could not be completed;
    ``h`` and ``l2_error`` are then ``None``.
    """

    experiment: str
    replication: int
    method: str
    h: Optional[float] = None
    l2_error: Optional[float] = None
    failure: Optional[str] = None
