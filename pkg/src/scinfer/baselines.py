"""Reference methods the joint learner is compared against.

The separate-estimation baseline reuses the learner's score machinery
with the closure coupling switched off and never interpolates: edges
come from node-signal smoothness alone (the observed-edge set plays no
role in its edge step, so its graph estimate cannot improve with more
observed flows), unobserved edge signals stay zero, and triangles are
scored against that zero-filled matrix. The correlation baseline
thresholds pairwise node correlations and fills every 3-clique.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .learner import (
    HyperParams,
    LearnState,
    edge_scores,
    objective_value,
    select_edges,
    select_triangles,
    triangle_scores,
)
from .topology import ComplexSkeleton, Selection, closure_violations, make_selection

__all__ = ["BaselineConfig", "run_sep_scl", "run_rc"]

_NO_OBS = np.array([], dtype=np.int64)


@dataclass(frozen=True)
class BaselineConfig:
    """Settings of the correlation baseline.

    ``rc_threshold_mode`` is either "budget" (activate the e_min
    strongest pairs, keep the t_min best cliques) or "absolute"
    (activate every pair above ``rc_abs_threshold``, keep all cliques).
    ``t_min=None`` keeps every clique in budget mode too.
    """

    method: str = "RC"
    e_min: int = 0
    t_min: int | None = None
    rc_threshold_mode: str = "budget"
    rc_abs_threshold: float = 0.7


def run_sep_scl(
    skeleton: ComplexSkeleton,
    x0: np.ndarray,
    x1_obs: np.ndarray,
    observed_edges,
    params: HyperParams,
) -> LearnState:
    """Single-pass decoupled estimate of edges then triangles.

    Runs the learner's edge and triangle blocks once each with the
    closure weight zeroed. Unobserved edge signals are zero-filled, not
    interpolated. Triangles are pruned against the method's own edge set
    before returning, so the output is always downward closed.
    """
    t_start = time.perf_counter()
    if params.e_min is None or params.t_min is None:
        raise ValueError("params.e_min and params.t_min must be set")
    decoupled = replace(params, gamma=0.0)
    obs = np.asarray(observed_edges, dtype=np.int64)

    no_triangles = np.zeros(skeleton.n_triangles)
    s1 = edge_scores(skeleton, x0, no_triangles, _NO_OBS, decoupled)
    w1 = select_edges(s1, _NO_OBS, int(params.e_min))

    x1_filled = np.zeros((skeleton.n_edges, x1_obs.shape[1]))
    x1_filled[obs] = x1_obs

    s2 = triangle_scores(skeleton, x1_filled, w1, decoupled)
    w2 = select_triangles(s2, int(params.t_min))

    report = closure_violations(skeleton, w1, w2)
    pruned = 0
    if report.count:
        w2 = w2.copy()
        for t_idx, _ in report.items:
            w2[t_idx] = 0
        pruned = len(report.items)

    objective = objective_value(skeleton, x0, x1_filled, w1, w2, obs, x1_obs, decoupled)
    elapsed = time.perf_counter() - t_start
    return LearnState(
        selection=make_selection(skeleton, w1, w2),
        x1_est=x1_filled,
        objective_trace=(objective,),
        iterations_run=1,
        converged=True,
        closure_violations=0,
        pruned_triangles=pruned,
        phase_seconds={"total": elapsed},
    )


def _node_correlations(x0: np.ndarray) -> np.ndarray:
    """Pearson correlations between node rows; zero-variance rows
    correlate with nothing (0) instead of propagating NaN."""
    x = np.asarray(x0, dtype=np.float64)
    centered = x - x.mean(axis=1, keepdims=True)
    cov = centered @ centered.T
    std = np.sqrt(np.diag(cov))
    denom = np.outer(std, std)
    corr = np.divide(cov, denom, out=np.zeros_like(cov), where=denom > 0.0)
    return np.clip(corr, -1.0, 1.0)


def run_rc(skeleton: ComplexSkeleton, x0: np.ndarray, config: BaselineConfig) -> Selection:
    """Correlation-thresholding baseline with clique-filled triangles.

    Edge strength is the absolute Pearson correlation of the endpoint
    signals. Triangles are the 3-cliques of the resulting graph; in
    budget mode with a finite ``t_min``, the cliques with the largest
    minimum edge strength survive.
    """
    if config.rc_threshold_mode not in ("budget", "absolute"):
        raise ValueError(f"unknown rc_threshold_mode {config.rc_threshold_mode!r}")
    corr = _node_correlations(x0)
    strength = np.array([abs(corr[i, j]) for i, j in skeleton.edges])

    w1 = np.zeros(skeleton.n_edges, dtype=np.int8)
    if config.rc_threshold_mode == "budget":
        if not 0 <= config.e_min <= skeleton.n_edges:
            raise ValueError(f"e_min must be in [0, {skeleton.n_edges}]")
        order = np.argsort(-strength, kind="stable")
        w1[order[: config.e_min]] = 1
    else:
        w1[strength > config.rc_abs_threshold] = 1

    clique = skeleton.b2_unsigned.T @ w1.astype(float) == 3.0
    w2 = np.zeros(skeleton.n_triangles, dtype=np.int8)
    w2[clique] = 1
    if (
        config.rc_threshold_mode == "budget"
        and config.t_min is not None
        and int(w2.sum()) > config.t_min
    ):
        clique_idx = np.flatnonzero(clique)
        min_strengths = np.array(
            [
                strength[np.flatnonzero(skeleton.b2_unsigned[:, t])].min()
                for t in clique_idx
            ]
        )
        keep = clique_idx[np.argsort(-min_strengths, kind="stable")[: config.t_min]]
        w2 = np.zeros(skeleton.n_triangles, dtype=np.int8)
        w2[keep] = 1
    return make_selection(skeleton, w1, w2)
