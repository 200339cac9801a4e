"""Simulation laboratory: scenarios, replication engine, normality checks and result tables."""

from .catalog import Regression, UnknownId, regression_catalog, snr
from .config import (
    EXPERIMENTS_DIR,
    ExperimentConfig,
    ExperimentConfigError,
    Scenario,
    ScenarioLoader,
    ScenarioRow,
    experiment_config_from_dict,
    list_scenarios,
    load_experiment_config,
    load_scenario,
    parse_methods,
)
from .figures import FIGURES, FigureSeries, figure_series
from .normality import ConditionViolated, NormalityResult, normality_check
from .runner import (
    ExperimentFailed,
    ExperimentReport,
    ExperimentSetup,
    MethodSummary,
    Quartiles,
    run_experiment,
)
from .tables import (
    COLUMN_SUFFIX,
    TableFormatError,
    TableRow,
    emit_table,
    format_error_cell,
    parse_error_cell,
    read_table,
    render_table,
    round_bandwidth,
)

__all__ = [
    "COLUMN_SUFFIX",
    "EXPERIMENTS_DIR",
    "FIGURES",
    "ConditionViolated",
    "ExperimentConfig",
    "ExperimentConfigError",
    "ExperimentFailed",
    "ExperimentReport",
    "ExperimentSetup",
    "FigureSeries",
    "MethodSummary",
    "NormalityResult",
    "Quartiles",
    "Regression",
    "Scenario",
    "ScenarioLoader",
    "ScenarioRow",
    "TableFormatError",
    "TableRow",
    "UnknownId",
    "emit_table",
    "experiment_config_from_dict",
    "figure_series",
    "format_error_cell",
    "list_scenarios",
    "load_experiment_config",
    "load_scenario",
    "normality_check",
    "parse_error_cell",
    "parse_methods",
    "read_table",
    "regression_catalog",
    "render_table",
    "round_bandwidth",
    "run_experiment",
    "snr",
]
