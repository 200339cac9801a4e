"""Bandwidth selection results and the candidate ladder shared by every selector."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from locpoly_lab.smoothing import UNBOUNDED, is_unbounded

LADDER_SIZE = 60
TIE_TOLERANCE = 1e-12


class SelectionMethod(str, Enum):
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"
    CV = "cv"
    PLUGIN = "plugin"


class AllCandidatesInfeasible(RuntimeError):
    """Every candidate bandwidth failed the local fit."""


def format_bandwidth(h: float):
    """JSON-friendly bandwidth: ``"inf"`` for ``UNBOUNDED``."""
    return "inf" if is_unbounded(h) else float(h)


def parse_bandwidth(value) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "unbounded"):
        return UNBOUNDED
    return float(value)


@dataclass(frozen=True)
class BandwidthResult:
    """Selected ``h`` with the objective curve it minimizes, in candidate order."""

    h: float
    method: SelectionMethod
    objective: Tuple[Tuple[float, float], ...] = ()
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def unbounded(self) -> bool:
        return is_unbounded(self.h)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "h": format_bandwidth(self.h),
            "method": self.method.value,
            "objective": [[format_bandwidth(h), score] for h, score in self.objective],
            "diagnostics": self.diagnostics,
        }


def ladder_floor(N: int, p: int, tau: float) -> float:
    """Smallest half-window that still reaches ``p + 1`` design points on an even grid."""
    if N < 2:
        raise ValueError("a bandwidth ladder needs N >= 2")
    return max(p, (p + 1) / 2) / (tau * (N - 1))


def candidate_ladder(N: int, p: int, tau: float, size: int = LADDER_SIZE) -> List[float]:
    """``size`` log-spaced bandwidths from the feasibility floor to 1, then ``UNBOUNDED``."""
    if size < 2:
        raise ValueError("a bandwidth ladder needs at least two finite candidates")
    floor = ladder_floor(N, p, tau)
    finite = np.geomspace(min(floor, 1.0), 1.0, size) if floor < 1.0 else np.array([1.0])
    return [float(h) for h in finite] + [UNBOUNDED]


def select_minimizer(curve: Sequence[Tuple[float, float]]) -> int:
    """Index of the smallest score; near-ties go to the larger bandwidth."""
    scores = np.array([score for _, score in curve], dtype=float)
    finite = np.isfinite(scores)
    if not finite.any():
        raise AllCandidatesInfeasible("no candidate bandwidth produced a finite score")
    best = scores[finite].min()
    slack = TIE_TOLERANCE * max(abs(best), 1.0)
    ties = [i for i in np.flatnonzero(finite) if scores[i] <= best + slack]
    return max(ties, key=lambda i: (curve[i][0], i))


def diagnostics_for(curve: Sequence[Tuple[float, float]], index: int, skipped: int) -> Dict:
    finite_h = [h for h, _ in curve if not math.isinf(h)]
    return {
        "lower": min(finite_h) if finite_h else None,
        "upper": max(finite_h) if finite_h else None,
        "at_lower_edge": bool(finite_h) and curve[index][0] == min(finite_h),
        "at_upper_edge": bool(finite_h) and curve[index][0] == max(finite_h),
        "unbounded": is_unbounded(curve[index][0]),
        "skipped": skipped,
    }
