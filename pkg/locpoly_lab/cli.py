"""Command-line interface: kernel tables, fits, bandwidths and the simulation laboratory."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from locpoly_lab.asymptotics import h_opt_global
from locpoly_lab.bandwidth import (
    AllCandidatesInfeasible,
    cross_validate,
    exact_optimal_bandwidth,
    format_bandwidth,
    parse_bandwidth,
    plugin_bandwidth,
)
from locpoly_lab.covariance import parse_model
from locpoly_lab.design import density_from_id, quantile_grid, uniform_density
from locpoly_lab.io import atomic_write_text, load_settings, resolve_path, settings_value
from locpoly_lab.kernels import build_tableau, kernel_from_id, lipschitz_constant
from locpoly_lab.simlab import (
    COLUMN_SUFFIX,
    FIGURES,
    ExperimentReport,
    emit_table,
    figure_series,
    format_error_cell,
    load_experiment_config,
    load_scenario,
    normality_check,
    regression_catalog,
    round_bandwidth,
    run_experiment,
)
from locpoly_lab.smoothing import (
    FitSpec,
    FunctionalSample,
    curve_estimate,
    read_curves_csv,
    write_estimate_csv,
)

logger = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)
SELECTED_BANDWIDTHS = ("cv", "asym", "plugin")


def _emit(payload: Any, output: Optional[str]) -> None:
    text = json.dumps(payload, indent=2)
    if output:
        atomic_write_text(output, text)
    else:
        print(text)


def _kernel(args: argparse.Namespace, settings: Dict[str, Any]):
    return kernel_from_id(
        args.kernel or settings_value(settings, "kernel.default", "truncated-gaussian")
    )


def _weight(identifier: Optional[str]):
    if identifier in (None, "uniform"):
        return None
    return density_from_id(identifier)


def parse_eval_points(spec: Optional[str], sample: FunctionalSample) -> np.ndarray:
    """``design`` (default), ``linspace:<count>`` or a comma-separated list of points."""
    if spec in (None, "", "design"):
        return sample.points
    family, _, argument = spec.partition(":")
    if family == "linspace":
        return np.linspace(0.0, 1.0, int(argument))
    return np.array([float(value) for value in spec.split(",")])


def _fit_bandwidth(args: argparse.Namespace, sample: FunctionalSample, kernel) -> float:
    choice = args.h.strip().lower()
    if choice not in SELECTED_BANDWIDTHS:
        return parse_bandwidth(choice)
    if choice == "cv":
        return cross_validate(sample, args.p, kernel).h
    if choice == "plugin":
        return plugin_bandwidth(sample, args.nu, args.p, kernel).h
    if not (args.model and args.m):
        raise SystemExit("--h asym needs --model and --m to evaluate the asymptotic formula")
    tableau = build_tableau(kernel, args.p)
    truth = regression_catalog(args.m)
    return h_opt_global(tableau, parse_model(args.model), truth, sample.n, args.nu).h


def cmd_kernel_info(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    kernel = _kernel(args, settings)
    nodes = int(settings_value(settings, "kernel.quadrature_nodes", 64))
    payload = build_tableau(kernel, args.p, nodes=nodes).to_dict()
    payload["lipschitz"] = lipschitz_constant(kernel)
    _emit(payload, args.output)
    return 0


def cmd_fit(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    sample = read_curves_csv(Path(args.input))
    kernel = _kernel(args, settings)
    h = _fit_bandwidth(args, sample, kernel)
    spec = FitSpec(p=args.p, nu=args.nu, h=h, kernel=kernel)
    estimates = curve_estimate(sample, spec, parse_eval_points(args.eval, sample))
    path = write_estimate_csv(Path(args.output), estimates)
    logger.info("wrote %d estimates with h=%s to %s", len(estimates), h, path)
    return 0


def cmd_bandwidth(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    kernel = _kernel(args, settings)
    weight = _weight(args.weight)
    if args.method in ("cv", "plugin"):
        if not args.input:
            raise SystemExit(f"--method {args.method} needs --input curves.csv")
        sample = read_curves_csv(Path(args.input))
        if args.method == "cv":
            result = cross_validate(sample, args.p, kernel)
        else:
            result = plugin_bandwidth(sample, args.nu, args.p, kernel, weight=weight)
        _emit(result.to_dict(), args.output)
        return 0

    if not (args.model and args.m and args.n):
        raise SystemExit(f"--method {args.method} needs --model, --m and --n")
    model = parse_model(args.model)
    truth = regression_catalog(args.m)
    if args.method == "asym":
        tableau = build_tableau(kernel, args.p)
        result = h_opt_global(tableau, model, truth, args.n, args.nu, weight=weight)
        _emit(result.to_dict(), args.output)
        return 0
    if not args.N:
        raise SystemExit("--method exact needs --N (design size)")
    result = exact_optimal_bandwidth(
        truth,
        model,
        quantile_grid(uniform_density(), args.N),
        args.n,
        args.nu,
        args.p,
        kernel=kernel,
        weight=weight,
        ladder_size=int(settings_value(settings, "bandwidth.ladder_size", 60)),
        tolerance=float(settings_value(settings, "bandwidth.refine_tolerance", 1e-4)),
        workers=args.workers or int(settings_value(settings, "simulation.workers", 1)),
    )
    _emit(result.to_dict(), args.output)
    return 0


def _simulation_defaults(settings: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "replications": settings_value(settings, "simulation.replications"),
        "seed": settings_value(settings, "simulation.seed"),
    }


def _run_all(configs, args: argparse.Namespace, settings: Dict[str, Any]) -> List[ExperimentReport]:
    workers = args.workers or int(settings_value(settings, "simulation.workers", 1))
    failure_fraction = float(settings_value(settings, "simulation.failure_fraction", 0.01))
    ladder_size = int(settings_value(settings, "bandwidth.ladder_size", 60))
    reports = []
    for config in configs:
        reports.append(
            run_experiment(
                config,
                workers=workers,
                log_path=args.log_replications,
                failure_fraction=failure_fraction,
                ladder_size=ladder_size,
            )
        )
    return reports


def _table_output(args: argparse.Namespace, settings: Dict[str, Any], stem: str) -> Path:
    if args.out:
        return Path(args.out)
    suffix = ".json" if args.format == "json" else ".csv"
    return resolve_path(settings_value(settings, "paths.output_dir", "results")) / (stem + suffix)


def _write_table(reports, path: Path, fmt: Optional[str]) -> None:
    path = emit_table(reports, path, fmt)
    print(f"Wrote {len(reports)} row(s) to {path}")


def cmd_simulate(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    config = load_experiment_config(Path(args.config), _simulation_defaults(settings))
    config = config.with_overrides(
        seed=args.seed, replications=args.replications, density=args.density, methods=args.methods
    )
    reports = _run_all([config], args, settings)
    _write_table(reports, _table_output(args, settings, config.name), args.format)
    return 0


def _row_filter(spec: Optional[str]):
    if not spec:
        return None
    wanted = set()
    for token in spec.split(","):
        n, _, N = token.strip().partition("x")
        wanted.add((int(n), int(N)))
    return wanted


def compare_row(report: ExperimentReport, reference: Dict[str, str]) -> str:
    """One line per experiment: measured cell, then the published value in brackets."""
    cells = []
    for method, summary in report.summaries.items():
        suffix = COLUMN_SUFFIX[method]
        h = "-" if summary.h is None else format_bandwidth(round_bandwidth(summary.h))
        error = "-" if summary.errors is None else format_error_cell(summary.errors)
        cells.append(f"h_{suffix}={h} [{reference.get('h_' + suffix, '?')}]")
        cells.append(f"L2_{suffix}={error} [{reference.get('L2_' + suffix, '?')}]")
    return f"n={report.config.n} N={report.config.N}: " + ", ".join(cells)


def cmd_table(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    scenario = load_scenario(args.reproduce)
    configs = scenario.configs(
        _simulation_defaults(settings),
        seed=args.seed,
        replications=args.replications,
        methods=args.methods,
    )
    wanted = _row_filter(args.rows)
    if wanted is not None:
        configs = [c for c in configs if (c.n, c.N) in wanted]
        if not configs:
            raise SystemExit(f"no row of '{scenario.name}' matches --rows {args.rows}")
    reports = _run_all(configs, args, settings)
    _write_table(reports, _table_output(args, settings, scenario.name), args.format)
    for report in reports:
        print(compare_row(report, scenario.row(report.config.n, report.config.N).reference))
    return 0


def cmd_normality(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    config = load_experiment_config(Path(args.config), _simulation_defaults(settings))
    if args.n:
        config = config.with_overrides(n=args.n)
    result = normality_check(config, args.x, args.M, args.h, sigma=args.sigma, seed=args.seed)
    _emit(result.to_dict(), args.output)
    return 0


def cmd_figure(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    options = {}
    if args.which == "linear-vs-quadratic" and args.workers:
        options["workers"] = args.workers
    path = figure_series(args.which, **options).to_csv(Path(args.out))
    print(f"Wrote figure series '{args.which}' to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locpoly-lab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug.")
    parser.add_argument("--settings", help="Optional path to a settings YAML file.")
    commands = parser.add_subparsers(dest="command", required=True)

    info = commands.add_parser("kernel-info", help="Print the kernel moment tableau as JSON.")
    info.add_argument("--kernel", help="Kernel id, e.g. truncated-gaussian:3 or epanechnikov.")
    info.add_argument("--p", type=int, required=True, help="Local polynomial order.")
    info.add_argument("--output", help="Write JSON here instead of stdout.")
    info.set_defaults(handler=cmd_kernel_info)

    fit = commands.add_parser("fit", help="Estimate m^(nu) from a curves CSV.")
    fit.add_argument("--input", required=True, help="Curves CSV (header x,<x1>,...).")
    fit.add_argument("--p", type=int, default=1)
    fit.add_argument("--nu", type=int, default=0)
    fit.add_argument("--h", default="cv", help="Bandwidth: a number, inf, cv, plugin or asym.")
    fit.add_argument("--kernel")
    fit.add_argument("--eval", help="design, linspace:<count> or comma-separated points.")
    fit.add_argument("--model", help="Covariance id for --h asym.")
    fit.add_argument("--m", help="Regression id for --h asym.")
    fit.add_argument("--output", required=True, help="Estimate CSV (x,estimate).")
    fit.set_defaults(handler=cmd_fit)

    bw = commands.add_parser("bandwidth", help="Select a bandwidth and print it as JSON.")
    bw.add_argument("--method", choices=("asym", "exact", "cv", "plugin"), required=True)
    bw.add_argument("--model", help="Covariance id (asym, exact).")
    bw.add_argument("--m", help="Regression id: m1, m2 or poly:<c0>,... (asym, exact).")
    bw.add_argument("--n", type=int, help="Number of curves (asym, exact).")
    bw.add_argument("--N", type=int, help="Design size (exact).")
    bw.add_argument("--p", type=int, default=1)
    bw.add_argument("--nu", type=int, default=0)
    bw.add_argument("--kernel")
    bw.add_argument("--weight", help="IMSE weight: uniform or linear:<a>.")
    bw.add_argument("--input", help="Curves CSV (cv, plugin).")
    bw.add_argument("--workers", type=int)
    bw.add_argument("--output", help="Write JSON here instead of stdout.")
    bw.set_defaults(handler=cmd_bandwidth)

    def add_run_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--out", help="Table path (default: <paths.output_dir>/<name>.csv).")
        sub.add_argument("--format", choices=("csv", "json"))
        sub.add_argument("--workers", type=int)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--replications", type=int)
        sub.add_argument("--methods", help="Comma-separated subset of exact, asym, cv, plugin.")
        sub.add_argument("--log-replications", help="Append per-replication records to a CSV.")

    simulate = commands.add_parser("simulate", help="Run one experiment config.")
    simulate.add_argument("--config", required=True, help="Experiment YAML or JSON.")
    simulate.add_argument("--density", help="Design density: uniform, linear:<a> or optimal.")
    add_run_options(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    table = commands.add_parser("table", help="Reproduce a built-in scenario table.")
    table.add_argument("--reproduce", required=True, help="Scenario name, e.g. table1.")
    table.add_argument("--rows", help="Subset of rows as nxN, e.g. 10x10,50x50.")
    add_run_options(table)
    table.set_defaults(handler=cmd_table)

    normal = commands.add_parser("normality", help="KS check of the pointwise limit law.")
    normal.add_argument("--config", required=True, help="Experiment YAML or JSON.")
    normal.add_argument("--x", type=float, required=True)
    normal.add_argument("--M", type=int, default=2000, help="Number of simulated estimates.")
    normal.add_argument("--h", type=float, required=True)
    normal.add_argument("--n", type=int, help="Override the number of curves.")
    normal.add_argument("--sigma", type=float, help="Limit standard deviation to test against.")
    normal.add_argument("--seed", type=int)
    normal.add_argument("--output", help="Write JSON here instead of stdout.")
    normal.set_defaults(handler=cmd_normality)

    figure = commands.add_parser("figure", help="Write the data series behind a figure.")
    figure.add_argument("--which", choices=FIGURES, required=True)
    figure.add_argument("--out", required=True)
    figure.add_argument("--workers", type=int)
    figure.set_defaults(handler=cmd_figure)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = load_settings(args.settings)
        return args.handler(args, settings)
    except AllCandidatesInfeasible as exc:
        raise SystemExit(f"No feasible bandwidth: {exc}") from exc
    except (ValueError, RuntimeError, OSError) as exc:
        raise SystemExit(f"{type(exc).__name__}: {exc}") from exc


if __name__ == "__main__":
    sys.exit(main())
