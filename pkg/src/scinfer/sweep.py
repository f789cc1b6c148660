"""Experiment harness: sweep one instance parameter over a grid.

Each cell of the sweep is (grid value, trial). A cell regenerates the
instance with the swept field substituted and ``seed = base_seed +
trial``, so trial t sees the same random draws at every grid value and
across methods; curves over the grid are paired per trial. Budgets left
as ``auto`` are taken from the ground truth of each cell.

Outputs in ``out_dir``: ``results.csv`` (one row per cell and method,
deterministic order) and two charts ``nerr_l0.svg`` / ``nerr_lu.svg``
showing per-method means with standard-error whiskers. A failed cell
keeps its rows: numeric columns hold nan and the ``status`` column
carries the error text, "ok" otherwise. The ``seconds`` column is wall
time and is the only column not reproducible bit-for-bit.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .baselines import BaselineConfig, run_rc, run_sep_scl
from .config import SweepSpec
from .evaluation import evaluate
from .learner import HyperParams, run_greedy_scl
from .svgplot import line_plot_svg
from .synth import generate_instance

__all__ = ["CSV_COLUMNS", "run_sweep", "write_results_csv"]

CSV_COLUMNS = (
    "sweep_value",
    "trial",
    "method",
    "nerr_l0",
    "nerr_lu",
    "edge_f1",
    "triangle_f1",
    "closure_violations",
    "seconds",
    "status",
)

_METRIC_KEYS = ("nerr_l0", "nerr_lu", "edge_f1", "triangle_f1", "closure_violations")


def _error_row(value: float, trial: int, method: str, exc: Exception) -> dict:
    row = {"sweep_value": value, "trial": trial, "method": method, "seconds": float("nan")}
    for key in _METRIC_KEYS:
        row[key] = float("nan")
    row["status"] = f"{type(exc).__name__}: {exc}"
    return row


def _run_method(method: str, truth, signals, params: HyperParams):
    """Return the estimated Selection for one method on one instance."""
    if method == "GreedySCL":
        state = run_greedy_scl(
            truth.skeleton, signals.x0, signals.x1_obs, signals.observed_edges, params
        )
        return state.selection
    if method == "SepSCL":
        state = run_sep_scl(
            truth.skeleton, signals.x0, signals.x1_obs, signals.observed_edges, params
        )
        return state.selection
    if method == "RC":
        config = BaselineConfig(method="RC", e_min=params.e_min, t_min=params.t_min)
        return run_rc(truth.skeleton, signals.x0, config)
    raise ValueError(f"unknown method {method!r}")


def _cell_rows(spec: SweepSpec, grid_index: int, trial: int) -> list[dict]:
    """All rows of one (grid value, trial) cell, in method order."""
    value = spec.grid[grid_index]
    seed = spec.base_seed + trial
    instance = replace(spec.instance, **{spec.variable: value})
    try:
        truth, signals = generate_instance(instance, seed)
    except Exception as exc:
        return [_error_row(value, trial, m, exc) for m in spec.methods]

    params = spec.params
    if params.e_min is None:
        params = replace(params, e_min=int(truth.selection.w1.sum()))
    if params.t_min is None:
        params = replace(params, t_min=int(truth.selection.w2.sum()))

    rows = []
    for method in spec.methods:
        start = time.perf_counter()
        try:
            est = _run_method(method, truth, signals, params)
            report = evaluate(truth.skeleton, est, truth.selection)
        except Exception as exc:
            rows.append(_error_row(value, trial, method, exc))
            continue
        rows.append(
            {
                "sweep_value": value,
                "trial": trial,
                "method": method,
                "nerr_l0": report.nerr_l0,
                "nerr_lu": report.nerr_lu,
                "edge_f1": report.edge_f1,
                "triangle_f1": report.triangle_f1,
                "closure_violations": report.closure_violations,
                "seconds": time.perf_counter() - start,
                "status": "ok",
            }
        )
    return rows


def _cell_worker(args) -> list[dict]:
    return _cell_rows(*args)


def _fmt_cell(key: str, value) -> str:
    if key in ("trial", "closure_violations"):
        return str(value) if isinstance(value, (int, np.integer)) else f"{value:.12g}"
    if key in ("method", "status"):
        return str(value)
    return f"{float(value):.12g}"


def write_results_csv(path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt_cell(key, row[key]) for key in CSV_COLUMNS])


def _series_stats(rows: list[dict], spec: SweepSpec, metric: str):
    """Per-method (means, stderrs) over the grid, skipping failed rows."""
    series = []
    for method in spec.methods:
        means, errs = [], []
        for value in spec.grid:
            samples = [
                row[metric]
                for row in rows
                if row["method"] == method
                and row["sweep_value"] == value
                and row["status"] == "ok"
                and math.isfinite(row[metric])
            ]
            if samples:
                arr = np.asarray(samples, dtype=float)
                means.append(float(arr.mean()))
                errs.append(float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0)
            else:
                means.append(float("nan"))
                errs.append(0.0)
        series.append((method, means, errs))
    return series


_AXIS_LABEL = {"node_noise_std": "node signal noise std", "observed_fraction": "observed edge fraction"}


def run_sweep(spec: SweepSpec, out_dir, jobs: int = 1) -> list[dict]:
    """Run the sweep, write results.csv and the two charts, return rows.

    ``jobs > 1`` distributes cells over worker processes; the rows come
    back in the same deterministic (grid, trial, method) order either
    way.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    tasks = [
        (spec, grid_index, trial)
        for grid_index in range(len(spec.grid))
        for trial in range(spec.n_trials)
    ]
    if jobs == 1:
        per_cell = [_cell_worker(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_cell = list(pool.map(_cell_worker, tasks))
    rows = [row for cell in per_cell for row in cell]

    os.makedirs(out_dir, exist_ok=True)
    write_results_csv(os.path.join(out_dir, "results.csv"), rows)
    x_label = _AXIS_LABEL.get(spec.variable, spec.variable)
    for metric, fname, title in (
        ("nerr_l0", "nerr_l0.svg", "Node Laplacian error"),
        ("nerr_lu", "nerr_lu.svg", "Upper Laplacian error"),
    ):
        line_plot_svg(
            os.path.join(out_dir, fname),
            spec.grid,
            _series_stats(rows, spec, metric),
            title,
            x_label,
            "normalized squared error",
        )
    return rows
