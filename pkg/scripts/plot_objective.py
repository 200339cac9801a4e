#!/usr/bin/env python3
"""Plot the figure series (regression functions or the IMSE objective per fit order)."""

from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from locpoly_lab.simlab import FIGURES, figure_series  # noqa: E402


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--which", choices=FIGURES, default="linear-vs-quadratic")
    parser.add_argument(
        "--bandwidth-json",
        type=Path,
        help="Plot the objective curve of a `locpoly-lab bandwidth` result instead.",
    )
    parser.add_argument("--workers", type=int, default=1, help="Threads for the IMSE profile.")
    parser.add_argument("--output", type=Path, required=True, help="Target image (.png, .pdf).")
    return parser.parse_args()


def plot_regressions(series, axs) -> None:
    x = series.column("x")
    for name in ("m1", "m2"):
        axs[0].plot(x, series.column(name), label=name)
        axs[1].plot(x, series.column(f"{name}_prime"), label=f"{name}'")
    axs[0].set_title("Regression functions")
    axs[1].set_title("First derivatives")
    for ax in axs:
        ax.set_xlabel("x")
        ax.legend()
        ax.grid(True)


def plot_objective(series, axs) -> None:
    orders = series.column("p")
    for ax, p in zip(axs, np.unique(orders)):
        rows = orders == p
        h = series.column("h")[rows]
        for name, style in (("bias2", "b--"), ("variance", "r:"), ("imse", "k-")):
            ax.plot(h, series.column(name)[rows], style, label=name)
        best = int(np.argmin(series.column("imse")[rows]))
        ax.axvline(h[best], color="g", ls="--", label=f"h = {h[best]:.3f}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("Bandwidth (h)")
        ax.set_title(f"p = {int(p)}")
        ax.legend()
        ax.grid(True)


def plot_bandwidth_result(path: Path, ax) -> None:
    payload = json.loads(path.read_text(encoding="utf-8"))
    curve = sorted(
        (float(h), score)
        for h, score in payload["objective"]
        if h != "inf" and score is not None and math.isfinite(score)
    )
    ax.plot([h for h, _ in curve], [score for _, score in curve], "k-", marker="o", ms=3)
    if payload["h"] != "inf":
        ax.axvline(payload["h"], color="g", ls="--", label=f"h = {payload['h']:.3f}")
    ax.set_xscale("log")
    ax.set_xlabel("Bandwidth (h)")
    ax.set_ylabel(f"{payload['method']} score")
    ax.legend()
    ax.grid(True)


def main() -> None:
    args = parse_args()
    if args.bandwidth_json:
        fig, ax = plt.subplots(figsize=(7, 5))
        plot_bandwidth_result(args.bandwidth_json, ax)
        args.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(args.output)
        print(f"Figure saved to {args.output}")
        return
    options = {"workers": args.workers} if args.which == "linear-vs-quadratic" else {}
    series = figure_series(args.which, **options)
    fig, axs = plt.subplots(1, 2, figsize=(12, 5))
    if args.which == "regressions":
        plot_regressions(series, axs)
    else:
        plot_objective(series, axs)
    plt.tight_layout()
    args.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(args.output)
    print(f"Figure saved to {args.output}")


if __name__ == "__main__":
    main()
