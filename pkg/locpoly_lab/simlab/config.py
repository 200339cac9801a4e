"""Experiment configuration and the scenario files under ``experiments/``.

An experiment is one ``(n, N)`` cell; a scenario bundles shared settings with its rows and the
published reference cells they are compared against.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import yaml

from locpoly_lab.bandwidth import SelectionMethod
from locpoly_lab.covariance import UnknownModel, parse_model
from locpoly_lab.design import BadDensity, density_from_id
from locpoly_lab.io import find_project_root
from locpoly_lab.kernels import MAX_ORDER, UnknownKernel, kernel_from_id

from .catalog import UnknownId, regression_catalog

EXPERIMENTS_DIR = Path("experiments")
DEFAULT_REPLICATIONS = 1000
DEFAULT_SEED = 20_100_501
OPTIMAL_DENSITY = "optimal"

METHOD_NAMES: Dict[str, SelectionMethod] = {
    "exact": SelectionMethod.EXACT,
    "asym": SelectionMethod.ASYMPTOTIC,
    "asymptotic": SelectionMethod.ASYMPTOTIC,
    "cv": SelectionMethod.CV,
    "plugin": SelectionMethod.PLUGIN,
}
DEFAULT_METHODS = (SelectionMethod.EXACT, SelectionMethod.ASYMPTOTIC, SelectionMethod.CV)


class ExperimentConfigError(RuntimeError):
    """Raised when an experiment or scenario file is invalid."""


def parse_methods(names: Sequence[str] | str) -> Tuple[SelectionMethod, ...]:
    if isinstance(names, str):
        names = [part for part in names.replace(",", " ").split() if part]
    methods: List[SelectionMethod] = []
    for name in names:
        key = name.value if isinstance(name, SelectionMethod) else str(name).strip().lower()
        if key not in METHOD_NAMES:
            raise ExperimentConfigError(
                f"Unknown bandwidth method '{name}' (expected one of {sorted(METHOD_NAMES)})"
            )
        if METHOD_NAMES[key] not in methods:
            methods.append(METHOD_NAMES[key])
    return tuple(methods)


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo scenario: model, design, estimator, selectors and seeding."""

    regression: str
    covariance: str
    n: int
    N: int
    nu: int = 0
    p: int = 1
    kernel: str = "truncated-gaussian"
    methods: Tuple[SelectionMethod, ...] = DEFAULT_METHODS
    replications: int = DEFAULT_REPLICATIONS
    seed: int = DEFAULT_SEED
    mesh_size: Optional[int] = None  # None integrates on the design grid
    weight: str = "uniform"
    density: str = "uniform"
    name: str = "experiment"

    def __post_init__(self) -> None:
        for key in ("n", "N", "replications"):
            if getattr(self, key) < 1:
                raise ExperimentConfigError(f"'{key}' must be positive, got {getattr(self, key)}")
        if self.N < 2:
            raise ExperimentConfigError("'N' must be at least 2")
        if not 0 <= self.nu <= self.p <= MAX_ORDER:
            raise ExperimentConfigError(
                f"need 0 <= nu <= p <= {MAX_ORDER}, got nu={self.nu}, p={self.p}"
            )
        if not self.methods:
            raise ExperimentConfigError("'methods' must name at least one bandwidth selector")
        if self.mesh_size is not None and self.mesh_size < 3:
            raise ExperimentConfigError("'mesh_size' must be at least 3")
        if self.seed < 0:
            raise ExperimentConfigError("'seed' must be non-negative")

    def with_overrides(self, **changes: Any) -> "ExperimentConfig":
        changes = {key: value for key, value in changes.items() if value is not None}
        if "methods" in changes:
            changes["methods"] = parse_methods(changes["methods"])
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["methods"] = [method.value for method in self.methods]
        return data


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ExperimentConfig))
INTEGER_FIELDS = ("n", "N", "nu", "p", "replications", "seed")


def _check_ids(config: ExperimentConfig) -> None:
    try:
        regression_catalog(config.regression)
        parse_model(config.covariance)
        kernel_from_id(config.kernel)
        density_from_id(config.weight)
        if config.density != OPTIMAL_DENSITY:
            density_from_id(config.density)
    except (UnknownId, UnknownModel, UnknownKernel, BadDensity) as exc:
        raise ExperimentConfigError(f"experiment '{config.name}': {exc}") from exc


def experiment_config_from_dict(
    data: Mapping[str, Any], defaults: Optional[Mapping[str, Any]] = None, name: str = "experiment"
) -> ExperimentConfig:
    """Build and validate a config; ``defaults`` fills fields the mapping leaves out."""
    merged: Dict[str, Any] = {"name": name}
    merged.update({k: v for k, v in (defaults or {}).items() if v is not None})
    merged.update(data)
    unknown = sorted(set(merged) - set(FIELD_NAMES))
    if unknown:
        raise ExperimentConfigError(f"Unknown experiment keys: {', '.join(unknown)}")
    for key in ("regression", "covariance", "n", "N"):
        if key not in merged:
            raise ExperimentConfigError(f"Missing required key '{key}' in experiment '{name}'")
    try:
        for key in INTEGER_FIELDS:
            if key in merged:
                merged[key] = int(merged[key])
        if merged.get("mesh_size") is not None:
            merged["mesh_size"] = int(merged["mesh_size"])
    except (TypeError, ValueError) as exc:
        raise ExperimentConfigError(f"experiment '{name}': {exc}") from exc
    if "methods" in merged:
        merged["methods"] = parse_methods(merged["methods"])
    for key in ("regression", "covariance", "kernel", "weight", "density", "name"):
        if key in merged:
            merged[key] = str(merged[key])
    config = ExperimentConfig(**merged)
    _check_ids(config)
    return config


def _load_yaml(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except OSError as exc:
        raise ExperimentConfigError(f"Failed to read experiment file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ExperimentConfigError(f"Invalid YAML/JSON in experiment file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ExperimentConfigError(f"{path}: top level must be a mapping")
    return data


def load_experiment_config(
    path: Path, defaults: Optional[Mapping[str, Any]] = None
) -> ExperimentConfig:
    """Read one experiment from YAML or JSON, at top level or under an ``experiment`` key."""
    path = Path(path)
    data = _load_yaml(path)
    body = data.get("experiment", data)
    if not isinstance(body, dict):
        raise ExperimentConfigError(f"{path}: 'experiment' must be a mapping")
    return experiment_config_from_dict(body, defaults, name=str(body.get("name", path.stem)))


@dataclass(frozen=True)
class ScenarioRow:
    n: int
    N: int
    reference: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    """A published table: shared settings plus one ``(n, N)`` row per experiment."""

    name: str
    description: str
    base: Dict[str, Any]
    rows: Tuple[ScenarioRow, ...]

    def configs(self, defaults: Optional[Mapping[str, Any]] = None, **overrides: Any):
        configs = []
        for row in self.rows:
            data = dict(self.base, n=row.n, N=row.N)
            label = f"{self.name}:{row.n}x{row.N}"
            config = experiment_config_from_dict(data, defaults, name=label)
            configs.append(config.with_overrides(**overrides))
        return configs

    def row(self, n: int, N: int) -> ScenarioRow:
        for row in self.rows:
            if row.n == n and row.N == N:
                return row
        raise ExperimentConfigError(f"scenario '{self.name}' has no row n={n}, N={N}")


def _parse_scenario(name: str, data: dict) -> Scenario:
    metadata = data.get("metadata", {})
    base = data.get("experiment", {})
    rows_raw = data.get("rows", [])
    if not isinstance(base, dict):
        raise ExperimentConfigError(f"scenario '{name}': 'experiment' must be a mapping")
    if not isinstance(rows_raw, list) or not rows_raw:
        raise ExperimentConfigError(f"scenario '{name}': 'rows' must be a non-empty list")
    rows = []
    for entry in rows_raw:
        if not isinstance(entry, dict) or "n" not in entry or "N" not in entry:
            raise ExperimentConfigError(f"scenario '{name}': every row needs 'n' and 'N'")
        reference = {str(k): str(v) for k, v in (entry.get("reference") or {}).items()}
        rows.append(ScenarioRow(n=int(entry["n"]), N=int(entry["N"]), reference=reference))
    scenario = Scenario(
        name=name,
        description=str(metadata.get("description", f"Scenario {name}")),
        base=dict(base),
        rows=tuple(rows),
    )
    scenario.configs()
    return scenario


class ScenarioLoader:
    """Loads the built-in scenario tables from the experiments directory."""

    def __init__(self, experiments_dir: Optional[Path] = None) -> None:
        root = find_project_root()
        self.experiments_dir = root / (experiments_dir or EXPERIMENTS_DIR)

    def list(self) -> List[str]:
        if not self.experiments_dir.exists():
            return []
        entries = [path.stem for path in self.experiments_dir.glob("*.yml")]
        entries += [path.stem for path in self.experiments_dir.glob("*.yaml")]
        return sorted(set(entries))

    def load(self, name: str) -> Scenario:
        candidates = [
            self.experiments_dir / f"{name}.yml",
            self.experiments_dir / f"{name}.yaml",
        ]
        path = next((p for p in candidates if p.exists()), None)
        if path is None:
            raise ExperimentConfigError(f"Scenario '{name}' not found in {self.experiments_dir}")
        return _parse_scenario(name, _load_yaml(path))


def list_scenarios() -> List[str]:
    return ScenarioLoader().list()


def load_scenario(name: str) -> Scenario:
    return ScenarioLoader().load(name)
