"""Command line entry point.

Subcommands: ``generate`` (write a synthetic dataset bundle), ``learn``
(fit a method to a bundle and write result.json), ``eval`` (score an
estimated complex against a reference), ``sweep`` (run a configured
experiment grid).

Failures exit with status 1 and a single machine-parsable stderr line:
``error: generation-failure: ...``, ``error: missing-file: ...`` or
``error: invalid-argument: ...``. Unknown flags or methods are argparse
usage errors (exit status 2).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace

import numpy as np

from .baselines import BaselineConfig, run_rc, run_sep_scl
from .config import METHOD_NAMES, load_config, parse_hyperparams, parse_instance, parse_sweep
from .evaluation import evaluate
from .learner import HyperParams, LearnState, run_greedy_scl
from .sweep import run_sweep
from .synth import (
    GenerationError,
    InstanceParams,
    generate_instance,
    read_dataset,
    write_dataset,
    write_matrix_csv,
)
from .topology import complex_from_dict, complex_to_dict, read_complex_json

__all__ = ["main", "build_parser"]


def _default_jobs() -> int:
    raw = os.environ.get("SCINFER_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scinfer",
        description="Learn simplicial complex topology from node signals and edge flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a synthetic dataset bundle")
    p_gen.add_argument("--config", help="INI file with an [instance] section")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.add_argument("--seed", type=int, help="override the config seed")
    p_gen.set_defaults(func=_cmd_generate)

    p_learn = sub.add_parser("learn", help="fit a method to a dataset bundle")
    p_learn.add_argument("dataset", help="dataset bundle directory")
    p_learn.add_argument("--method", choices=METHOD_NAMES, default="GreedySCL")
    p_learn.add_argument("--config", help="INI file with a [params] section")
    p_learn.add_argument("--out", help="output directory (default: the bundle)")
    p_learn.add_argument("--e-min", type=int, help="edge budget (default: from ground truth)")
    p_learn.add_argument("--t-min", type=int, help="triangle budget (default: from ground truth)")
    p_learn.add_argument(
        "--strict-lemma", action="store_true", help="edge step keeps exactly e_min edges"
    )
    p_learn.add_argument(
        "--no-prune-closure", action="store_true", help="skip the final closure prune"
    )
    p_learn.add_argument(
        "--save-x1", action="store_true", help="also write the interpolated flows (x1_est.csv)"
    )
    p_learn.set_defaults(func=_cmd_learn)

    p_eval = sub.add_parser("eval", help="score an estimated complex against a reference")
    p_eval.add_argument("--est", required=True, help="complex.json or result.json")
    p_eval.add_argument("--truth", required=True, help="complex.json or a bundle directory")
    p_eval.add_argument("--out", help="also write the report as JSON")
    p_eval.set_defaults(func=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="run a configured experiment grid")
    p_sweep.add_argument("--config", required=True, help="INI file with a [sweep] section")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument(
        "--jobs",
        type=int,
        default=_default_jobs(),
        help="worker processes (default: $SCINFER_JOBS or 1)",
    )
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def _cmd_generate(args) -> int:
    if args.config is not None:
        instance, seed = parse_instance(load_config(args.config))
    else:
        instance, seed = InstanceParams(), 0
    if args.seed is not None:
        seed = args.seed
    truth, signals = generate_instance(instance, seed)
    write_dataset(args.out, truth, signals, instance)
    print(
        f"wrote dataset to {args.out} "
        f"(nodes={truth.skeleton.n_nodes}, edges={int(truth.selection.w1.sum())}, "
        f"triangles={int(truth.selection.w2.sum())}, "
        f"observed={signals.observed_edges.size})"
    )
    return 0


def _resolve_params(args, n_active_edges: int, n_active_triangles: int) -> HyperParams:
    if args.config is not None:
        params = parse_hyperparams(load_config(args.config))
    else:
        params = HyperParams()
    overrides = {}
    if args.e_min is not None:
        overrides["e_min"] = args.e_min
    if args.t_min is not None:
        overrides["t_min"] = args.t_min
    if args.strict_lemma:
        overrides["strict_lemma_mode"] = True
    if args.no_prune_closure:
        overrides["prune_closure"] = False
    if overrides:
        params = replace(params, **overrides)
    if params.e_min is None:
        params = replace(params, e_min=n_active_edges)
    if params.t_min is None:
        params = replace(params, t_min=n_active_triangles)
    return params


def _cmd_learn(args) -> int:
    ds = read_dataset(args.dataset)
    params = _resolve_params(args, int(ds.truth.w1.sum()), int(ds.truth.w2.sum()))

    if args.method == "RC":
        start = time.perf_counter()
        selection = run_rc(ds.skeleton, ds.x0, BaselineConfig(e_min=params.e_min, t_min=params.t_min))
        state = LearnState(
            selection=selection,
            x1_est=np.zeros((0, 0)),
            objective_trace=(),
            iterations_run=1,
            converged=True,
            closure_violations=0,
            pruned_triangles=0,
            phase_seconds={"total": time.perf_counter() - start},
        )
    elif args.method == "SepSCL":
        state = run_sep_scl(ds.skeleton, ds.x0, ds.x1_obs, ds.observed_edges, params)
    else:
        state = run_greedy_scl(ds.skeleton, ds.x0, ds.x1_obs, ds.observed_edges, params)

    report = evaluate(ds.skeleton, state.selection, ds.truth)
    result = {
        "method": args.method,
        "complex": complex_to_dict(ds.skeleton, state.selection),
        "objective_trace": list(state.objective_trace),
        "iterations_run": state.iterations_run,
        "converged": state.converged,
        "closure_violations": state.closure_violations,
        "pruned_triangles": state.pruned_triangles,
        "phase_seconds": state.phase_seconds,
        "eval": report.to_dict(),
    }
    out_dir = args.out if args.out is not None else args.dataset
    os.makedirs(out_dir, exist_ok=True)
    result_path = os.path.join(out_dir, "result.json")
    with open(result_path, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.save_x1 and state.x1_est.size:
        write_matrix_csv(os.path.join(out_dir, "x1_est.csv"), state.x1_est)
    print(
        f"{args.method}: nerr_l0={report.nerr_l0:.6g} nerr_lu={report.nerr_lu:.6g} "
        f"edge_f1={report.edge_f1:.4f} triangle_f1={report.triangle_f1:.4f} "
        f"closure_violations={report.closure_violations} -> {result_path}"
    )
    return 0


def _load_complex(path):
    """Accept a complex.json, a result.json, or a bundle directory."""
    if os.path.isdir(path):
        return read_complex_json(os.path.join(path, "complex.json"))
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in {path}: {exc}") from exc
    if isinstance(data, dict) and "complex" in data:
        data = data["complex"]
    return complex_from_dict(data)


def _cmd_eval(args) -> int:
    est_skel, est_sel = _load_complex(args.est)
    truth_skel, truth_sel = _load_complex(args.truth)
    if est_skel.n_nodes != truth_skel.n_nodes:
        raise ValueError(
            f"node count mismatch: estimate has {est_skel.n_nodes}, "
            f"reference has {truth_skel.n_nodes}"
        )
    report = evaluate(truth_skel, est_sel, truth_sel)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    print(text)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
    return 0


def _cmd_sweep(args) -> int:
    spec = parse_sweep(load_config(args.config))
    rows = run_sweep(spec, args.out, jobs=args.jobs)
    failed = sum(1 for row in rows if row["status"] != "ok")
    print(
        f"wrote {os.path.join(args.out, 'results.csv')} "
        f"({len(rows)} rows, {failed} failed) and nerr_l0.svg / nerr_lu.svg"
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GenerationError as exc:
        print(f"error: generation-failure: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        missing = exc.filename if exc.filename else exc
        print(f"error: missing-file: {missing}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: invalid-argument: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
