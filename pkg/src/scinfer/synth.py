"""Synthetic ground-truth complexes and signals.

Instances follow one protocol: an Erdos-Renyi edge set resampled until
connected, a uniformly chosen subset of the eligible triangles filled,
node signals drawn from the inverse spectrum of the true graph
Laplacian, edge flows drawn white and then curl-attenuated against the
true filled triangles, and a uniform subset of active edges marked as
observed. All randomness flows through a caller-supplied Generator, so
a seed pins every byte of the output.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .topology import (
    ComplexSkeleton,
    Selection,
    build_skeleton,
    make_selection,
    node_laplacian,
    read_complex_json,
    write_complex_json,
)

__all__ = [
    "GenerationError",
    "GroundTruth",
    "SignalSet",
    "InstanceParams",
    "Dataset",
    "sample_er_selection",
    "fill_triangles",
    "gen_smooth_node_signals",
    "gen_low_curl_edge_signals",
    "sample_observed_edges",
    "generate_instance",
    "write_dataset",
    "read_dataset",
    "write_matrix_csv",
    "read_matrix_csv",
]

_EIG_CUTOFF = 1e-9
_MAX_ER_ATTEMPTS = 1000


class GenerationError(RuntimeError):
    """Raised when instance generation cannot satisfy its constraints."""


@dataclass(frozen=True)
class GroundTruth:
    skeleton: ComplexSkeleton
    selection: Selection
    seed: int


@dataclass(frozen=True)
class SignalSet:
    """Signals attached to a ground-truth instance.

    ``x1_full`` carries the noisy flows on all candidate edges (zeros on
    inactive ones); ``x1_obs`` is its restriction to ``observed_edges``,
    rows ordered by ascending candidate index.
    """

    x0: np.ndarray
    x1_full: np.ndarray
    x1_obs: np.ndarray
    observed_edges: np.ndarray
    node_noise_std: float
    edge_noise_std: float


@dataclass(frozen=True)
class InstanceParams:
    """Knobs of the generation protocol."""

    n_nodes: int = 20
    edge_prob: float = 0.4
    fill_fraction: float = 0.5
    n_node_signals: int = 100
    n_edge_signals: int = 100
    curl_atten: float = 0.05
    node_noise_std: float = 0.0
    edge_noise_std: float = 0.0
    observed_fraction: float = 0.8


@dataclass(frozen=True)
class Dataset:
    """A dataset bundle as read back from disk."""

    skeleton: ComplexSkeleton
    truth: Selection
    x0: np.ndarray
    x1_obs: np.ndarray
    observed_edges: np.ndarray
    meta: dict


def sample_er_selection(
    skeleton: ComplexSkeleton, edge_prob: float, rng: np.random.Generator
) -> np.ndarray:
    """Bernoulli edge indicators, resampled until the graph is connected.

    Raises GenerationError after 1000 failed attempts.
    """
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError(f"edge_prob must be in [0, 1], got {edge_prob}")
    for _ in range(_MAX_ER_ATTEMPTS):
        w1 = (rng.random(skeleton.n_edges) < edge_prob).astype(np.int8)
        if _connected(skeleton, w1):
            return w1
    raise GenerationError(
        f"no connected graph on {skeleton.n_nodes} nodes with edge_prob={edge_prob} "
        f"after {_MAX_ER_ATTEMPTS} attempts"
    )


def _connected(skeleton: ComplexSkeleton, w1: np.ndarray) -> bool:
    n = skeleton.n_nodes
    adj: list[list[int]] = [[] for _ in range(n)]
    for idx in np.flatnonzero(w1):
        i, j = skeleton.edges[idx]
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def fill_triangles(
    skeleton: ComplexSkeleton,
    w1,
    fraction: float,
    rng: np.random.Generator,
    max_attempts: int = 200,
) -> np.ndarray:
    """Activate a uniform subset of the triangles supported by ``w1``.

    Exactly ``floor(fraction * n_eligible)`` triangles are filled, so
    the output is downward closed by construction. Among uniform draws,
    the first one whose unfilled eligible triangles are all circulation-
    independent of the filled set is kept: an unfilled triangle whose
    boundary lies in the span of the filled boundaries is invisible to
    any low-curl flow, so such fills are unidentifiable from edge data.
    If no independent fill shows up within ``max_attempts`` draws (dense
    graphs may admit none), the final draw is returned as is.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    w1a = np.asarray(w1, dtype=np.float64)
    eligible = np.flatnonzero(skeleton.b2_unsigned.T @ w1a == 3.0)
    count = math.floor(fraction * eligible.size)
    w2 = np.zeros(skeleton.n_triangles, dtype=np.int8)
    if count == 0:
        return w2
    active_rows = np.flatnonzero(np.asarray(w1) != 0)
    for _ in range(max(1, max_attempts)):
        chosen = rng.choice(eligible, size=count, replace=False)
        w2[:] = 0
        w2[chosen] = 1
        if _fill_identifiable(skeleton, active_rows, eligible, w2):
            break
    return w2


def _fill_identifiable(skeleton, active_rows, eligible, w2) -> bool:
    """True when no unfilled eligible triangle's boundary is spanned by
    the filled boundaries (restricted to active edges)."""
    spurious = eligible[w2[eligible] == 0]
    filled = eligible[w2[eligible] == 1]
    if spurious.size == 0 or filled.size == 0:
        return True
    basis_cols = skeleton.b2_full[np.ix_(active_rows, filled)].astype(np.float64)
    u_basis, sv, _ = np.linalg.svd(basis_cols, full_matrices=False)
    rank = int((sv > 1e-10 * sv[0]).sum())
    u_basis = u_basis[:, :rank]
    probe = skeleton.b2_full[np.ix_(active_rows, spurious)].astype(np.float64)
    residual = probe - u_basis @ (u_basis.T @ probe)
    return bool((np.linalg.norm(residual, axis=0) > 1e-8).all())


def gen_smooth_node_signals(
    skeleton: ComplexSkeleton,
    w1,
    n_signals: int,
    noise_std: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Low-frequency node signals on the active graph.

    Gaussian coefficients are shaped by the inverse nonzero spectrum of
    the graph Laplacian (filter 1/lambda above a 1e-9 cutoff, zero
    below), each column is normalized to unit energy, then white noise
    of the given standard deviation is added entrywise.
    """
    l0 = node_laplacian(skeleton, np.asarray(w1, dtype=np.float64))
    lam, basis = np.linalg.eigh(l0)
    filt = np.where(lam > _EIG_CUTOFF, 1.0 / np.maximum(lam, _EIG_CUTOFF), 0.0)
    coeff = np.sqrt(filt)[:, None] * rng.standard_normal((skeleton.n_nodes, n_signals))
    x0 = basis @ coeff
    x0 = _normalize_columns(x0)
    x0 += noise_std * rng.standard_normal(x0.shape)
    return x0


def gen_low_curl_edge_signals(
    skeleton: ComplexSkeleton,
    w1,
    w2,
    n_signals: int,
    curl_atten: float,
    noise_std: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Edge flows whose curl against the true triangles is attenuated.

    White flows on the active edges are split along the curl subspace of
    the true filled triangles; the curl component is scaled by
    ``curl_atten`` and the flow reassembled, normalized per column, and
    embedded into the candidate-edge axis (zeros on inactive edges).
    Noise is then added on active edges only.

    Returns ``(noisy, clean)``, both of shape (n_candidate_edges, n_signals).
    """
    if curl_atten < 0.0:
        raise ValueError(f"curl_atten must be nonnegative, got {curl_atten}")
    w1a = np.asarray(w1, dtype=np.float64)
    w2a = np.asarray(w2, dtype=np.float64)
    active_e = np.flatnonzero(w1a)
    active_t = np.flatnonzero(w2a)

    white = rng.standard_normal((active_e.size, n_signals))
    if active_t.size:
        b2a = skeleton.b2_full[np.ix_(active_e, active_t)]
        u, s, _ = np.linalg.svd(b2a, full_matrices=False)
        rank = int(np.sum(s > 1e-10 * s[0])) if s.size else 0
        basis = u[:, :rank]
        curl = basis @ (basis.T @ white)
    else:
        curl = np.zeros_like(white)
    flows = white - (1.0 - curl_atten) * curl
    flows = _normalize_columns(flows)

    clean = np.zeros((skeleton.n_edges, n_signals))
    clean[active_e] = flows
    noisy = clean.copy()
    noisy[active_e] += noise_std * rng.standard_normal((active_e.size, n_signals))
    return noisy, clean


def sample_observed_edges(
    w1, fraction: float, rng: np.random.Generator
) -> np.ndarray:
    """Uniform subset of the active edges, ``ceil(fraction * |E|)`` of them, sorted."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"observed fraction must be in (0, 1], got {fraction}")
    active = np.flatnonzero(np.asarray(w1, dtype=np.float64))
    if active.size == 0:
        raise ValueError("w1 has no active edges to observe")
    count = math.ceil(fraction * active.size)
    chosen = rng.choice(active, size=count, replace=False)
    return np.sort(chosen).astype(np.int64)


def _normalize_columns(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=0, keepdims=True)
    norms = np.where(norms == 0.0, 1.0, norms)
    return x / norms


def generate_instance(
    params: InstanceParams, seed: int
) -> tuple[GroundTruth, SignalSet]:
    """Run the full generation protocol for one seed."""
    skeleton = build_skeleton(params.n_nodes)
    rng = np.random.default_rng(seed)
    w1 = sample_er_selection(skeleton, params.edge_prob, rng)
    w2 = fill_triangles(skeleton, w1, params.fill_fraction, rng)
    x0 = gen_smooth_node_signals(
        skeleton, w1, params.n_node_signals, params.node_noise_std, rng
    )
    x1_noisy, _ = gen_low_curl_edge_signals(
        skeleton,
        w1,
        w2,
        params.n_edge_signals,
        params.curl_atten,
        params.edge_noise_std,
        rng,
    )
    observed = sample_observed_edges(w1, params.observed_fraction, rng)
    truth = GroundTruth(skeleton, make_selection(skeleton, w1, w2), int(seed))
    signals = SignalSet(
        x0=x0,
        x1_full=x1_noisy,
        x1_obs=x1_noisy[observed],
        observed_edges=observed,
        node_noise_std=params.node_noise_std,
        edge_noise_std=params.edge_noise_std,
    )
    return truth, signals


# ---------------------------------------------------------------------------
# dataset bundles on disk


def write_matrix_csv(path, arr: np.ndarray) -> None:
    """Row-major CSV, 17 significant digits, no header."""
    arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
    with open(path, "w", encoding="utf-8") as fh:
        for row in arr:
            fh.write(",".join(f"{v:.16e}" for v in row))
            fh.write("\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: bad float field: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows")
    return np.array(rows, dtype=np.float64)


def write_dataset(
    out_dir, truth: GroundTruth, signals: SignalSet, params: InstanceParams
) -> None:
    """Write the on-disk bundle: complex.json, x0.csv, x1_obs.csv,
    observed_edges.csv, meta.json."""
    os.makedirs(out_dir, exist_ok=True)
    write_complex_json(os.path.join(out_dir, "complex.json"), truth.skeleton, truth.selection)
    write_matrix_csv(os.path.join(out_dir, "x0.csv"), signals.x0)
    write_matrix_csv(os.path.join(out_dir, "x1_obs.csv"), signals.x1_obs)
    with open(os.path.join(out_dir, "observed_edges.csv"), "w", encoding="utf-8") as fh:
        for idx in signals.observed_edges:
            fh.write(f"{int(idx)}\n")
    meta = dict(asdict(params))
    meta["seed"] = truth.seed
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_dataset(in_dir) -> Dataset:
    """Read a bundle back; raises FileNotFoundError naming the missing piece."""
    paths = {
        name: os.path.join(in_dir, name)
        for name in ("complex.json", "x0.csv", "x1_obs.csv", "observed_edges.csv", "meta.json")
    }
    for name, path in paths.items():
        if not os.path.exists(path):
            raise FileNotFoundError(path)
    skeleton, truth = read_complex_json(paths["complex.json"])
    x0 = read_matrix_csv(paths["x0.csv"])
    x1_obs = read_matrix_csv(paths["x1_obs.csv"])
    observed = []
    with open(paths["observed_edges.csv"], "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                observed.append(int(line))
            except ValueError as exc:
                raise ValueError(
                    f"{paths['observed_edges.csv']}:{line_no}: bad edge index"
                ) from exc
    observed_arr = np.array(observed, dtype=np.int64)
    if observed_arr.size and (
        np.any(np.diff(observed_arr) <= 0)
        or observed_arr[0] < 0
        or observed_arr[-1] >= skeleton.n_edges
    ):
        raise ValueError("observed_edges.csv must list strictly increasing valid indices")
    if x1_obs.shape[0] != observed_arr.size:
        raise ValueError(
            f"x1_obs.csv has {x1_obs.shape[0]} rows but {observed_arr.size} edges are observed"
        )
    with open(paths["meta.json"], "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    return Dataset(skeleton, truth, x0, x1_obs, observed_arr, meta)
