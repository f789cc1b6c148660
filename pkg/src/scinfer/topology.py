"""Combinatorial scaffolding for order-2 simplicial complexes.

Everything downstream is phrased against the *complete* complex on
``n_nodes`` vertices: every vertex pair is a candidate edge and every
vertex triple a candidate triangle, both enumerated in lexicographic
order. A concrete complex is then just a pair of binary indicator
vectors over those candidate lists, which keeps topology selection,
Laplacian assembly and subset scoring in plain array land.

Orientation convention (fixed): edge ``(i, j)`` with ``i < j`` runs from
``i`` to ``j``, so its incidence column carries ``-1`` at row ``i`` and
``+1`` at row ``j``. Triangle ``(i, j, k)`` with ``i < j < k`` traverses
its boundary as ``i -> j -> k -> i``, contributing ``+1`` to edges
``(i, j)`` and ``(j, k)`` and ``-1`` to edge ``(i, k)``. Under this
convention the chain property ``b1_full @ b2_full == 0`` holds exactly
in integer arithmetic.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_NODES",
    "ComplexSkeleton",
    "Selection",
    "HodgeParts",
    "ClosureReport",
    "build_skeleton",
    "edge_index",
    "triangle_index",
    "make_selection",
    "node_laplacian",
    "upper_laplacian",
    "hodge_laplacian",
    "hodge_decompose",
    "closure_violations",
    "is_closed",
    "complex_to_dict",
    "complex_from_dict",
    "write_complex_json",
    "read_complex_json",
]

# Dense incidence matrices of the complete complex grow as C(n,2) x C(n,3);
# 40 nodes is ~61 MB per matrix and is where we draw the line.
MAX_NODES = 40

_SV_CUTOFF = 1e-10


@dataclass(frozen=True)
class ComplexSkeleton:
    """Complete order-2 complex on ``n_nodes`` vertices.

    Attributes
    ----------
    n_nodes : int
        Number of vertices.
    edges : tuple of (int, int)
        All candidate edges ``(i, j)``, ``i < j``, lexicographic.
    triangles : tuple of (int, int, int)
        All candidate triangles ``(i, j, k)``, ``i < j < k``, lexicographic.
    b1_full : ndarray, shape (n_nodes, n_edges)
        Node-to-edge incidence of the complete complex.
    b2_full : ndarray, shape (n_edges, n_triangles)
        Edge-to-triangle incidence of the complete complex.
    b2_unsigned : ndarray, shape (n_edges, n_triangles)
        Entrywise absolute value of ``b2_full``; used by the closure
        penalty and coverage counts.

    All arrays are read-only after construction.
    """

    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[int, int, int], ...]
    b1_full: np.ndarray
    b2_full: np.ndarray
    b2_unsigned: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)


@dataclass(frozen=True)
class Selection:
    """Binary indicators over the candidate edge and triangle lists."""

    w1: np.ndarray
    w2: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.w1.sum())

    @property
    def triangle_count(self) -> int:
        return int(self.w2.sum())


@dataclass(frozen=True)
class HodgeParts:
    """Orthogonal decomposition of an edge flow on the active edges.

    ``gradient + curl + harmonic`` reconstructs the input;
    ``node_potential`` and ``triangle_potential`` are least-squares
    preimages of the gradient and curl parts.
    """

    gradient: np.ndarray
    curl: np.ndarray
    harmonic: np.ndarray
    node_potential: np.ndarray
    triangle_potential: np.ndarray


@dataclass(frozen=True)
class ClosureReport:
    """Downward-closure violations of a selection.

    ``count`` totals missing-edge incidences over active triangles, i.e.
    ``(1 - w1)^T b2_unsigned w2``. ``items`` lists each offending
    triangle index with the candidate-edge indices it is missing.
    """

    count: int
    items: tuple[tuple[int, tuple[int, ...]], ...]


# Per-skeleton index lookups; keyed by id() would leak, so key by n_nodes.
_EDGE_POS: dict[int, dict[tuple[int, int], int]] = {}
_TRI_POS: dict[int, dict[tuple[int, int, int], int]] = {}


def build_skeleton(n_nodes: int) -> ComplexSkeleton:
    """Enumerate the complete complex and assemble incidence matrices.

    Parameters
    ----------
    n_nodes : int
        Vertex count, ``2 <= n_nodes <= MAX_NODES``.

    Returns
    -------
    ComplexSkeleton
        Immutable skeleton with ``C(n,2)`` candidate edges and
        ``C(n,3)`` candidate triangles in lexicographic order.
    """
    if not isinstance(n_nodes, (int, np.integer)):
        raise ValueError(f"n_nodes must be an integer, got {type(n_nodes).__name__}")
    if n_nodes < 2 or n_nodes > MAX_NODES:
        raise ValueError(f"n_nodes must be in [2, {MAX_NODES}], got {n_nodes}")
    n_nodes = int(n_nodes)

    edges = tuple(itertools.combinations(range(n_nodes), 2))
    triangles = tuple(itertools.combinations(range(n_nodes), 3))
    edge_pos = {e: idx for idx, e in enumerate(edges)}

    b1 = np.zeros((n_nodes, len(edges)), dtype=np.float64)
    for idx, (i, j) in enumerate(edges):
        b1[i, idx] = -1.0
        b1[j, idx] = 1.0

    b2 = np.zeros((len(edges), len(triangles)), dtype=np.float64)
    for idx, (i, j, k) in enumerate(triangles):
        b2[edge_pos[(i, j)], idx] = 1.0
        b2[edge_pos[(j, k)], idx] = 1.0
        b2[edge_pos[(i, k)], idx] = -1.0

    b2_abs = np.abs(b2)
    for arr in (b1, b2, b2_abs):
        arr.flags.writeable = False

    _EDGE_POS[n_nodes] = edge_pos
    _TRI_POS[n_nodes] = {t: idx for idx, t in enumerate(triangles)}
    return ComplexSkeleton(n_nodes, edges, triangles, b1, b2, b2_abs)


def edge_index(skeleton: ComplexSkeleton, i: int, j: int) -> int:
    """Position of edge ``(i, j)`` in the candidate list; requires ``i < j``."""
    if not (0 <= i < j < skeleton.n_nodes):
        raise ValueError(f"invalid edge ({i}, {j}) for {skeleton.n_nodes} nodes")
    return _edge_pos(skeleton)[(i, j)]


def triangle_index(skeleton: ComplexSkeleton, i: int, j: int, k: int) -> int:
    """Position of triangle ``(i, j, k)`` in the candidate list; requires ``i < j < k``."""
    if not (0 <= i < j < k < skeleton.n_nodes):
        raise ValueError(f"invalid triangle ({i}, {j}, {k}) for {skeleton.n_nodes} nodes")
    return _tri_pos(skeleton)[(i, j, k)]


def _edge_pos(skeleton: ComplexSkeleton) -> dict[tuple[int, int], int]:
    pos = _EDGE_POS.get(skeleton.n_nodes)
    if pos is None:
        pos = {e: idx for idx, e in enumerate(skeleton.edges)}
        _EDGE_POS[skeleton.n_nodes] = pos
    return pos


def _tri_pos(skeleton: ComplexSkeleton) -> dict[tuple[int, int, int], int]:
    pos = _TRI_POS.get(skeleton.n_nodes)
    if pos is None:
        pos = {t: idx for idx, t in enumerate(skeleton.triangles)}
        _TRI_POS[skeleton.n_nodes] = pos
    return pos


def _as_indicator(vec, size: int, name: str) -> np.ndarray:
    arr = np.asarray(vec)
    if arr.shape != (size,):
        raise ValueError(f"{name} must have shape ({size},), got {arr.shape}")
    arr = arr.astype(np.float64)
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError(f"{name} must be binary (entries in {{0, 1}})")
    return arr


def make_selection(skeleton: ComplexSkeleton, w1, w2) -> Selection:
    """Validate and freeze a pair of indicator vectors into a Selection."""
    w1a = _as_indicator(w1, skeleton.n_edges, "w1").astype(np.int8)
    w2a = _as_indicator(w2, skeleton.n_triangles, "w2").astype(np.int8)
    w1a.flags.writeable = False
    w2a.flags.writeable = False
    return Selection(w1a, w2a)


def node_laplacian(skeleton: ComplexSkeleton, w1) -> np.ndarray:
    """Weighted node Laplacian ``b1_full diag(w1) b1_full^T``.

    ``w1`` may be any nonnegative edge weighting; binary vectors give
    the combinatorial graph Laplacian of the active edge set.
    """
    w = np.asarray(w1, dtype=np.float64)
    if w.shape != (skeleton.n_edges,):
        raise ValueError(f"w1 must have shape ({skeleton.n_edges},), got {w.shape}")
    return (skeleton.b1_full * w) @ skeleton.b1_full.T


def upper_laplacian(skeleton: ComplexSkeleton, w2) -> np.ndarray:
    """Upper edge Laplacian ``b2_full diag(w2) b2_full^T`` on all candidate edges."""
    w = np.asarray(w2, dtype=np.float64)
    if w.shape != (skeleton.n_triangles,):
        raise ValueError(f"w2 must have shape ({skeleton.n_triangles},), got {w.shape}")
    return (skeleton.b2_full * w) @ skeleton.b2_full.T


def hodge_laplacian(skeleton: ComplexSkeleton, w1, w2) -> np.ndarray:
    """Hodge Laplacian ``B1^T B1 + B2 B2^T`` restricted to the active edges.

    Requires a downward-closed selection; the restriction of ``b2_full``
    to active rows/columns is only a boundary operator in that case.
    """
    w1a = _as_indicator(w1, skeleton.n_edges, "w1")
    w2a = _as_indicator(w2, skeleton.n_triangles, "w2")
    if _violation_count(skeleton, w1a, w2a) != 0:
        raise ValueError("selection is not downward closed; cannot restrict b2")
    active_e = np.flatnonzero(w1a)
    active_t = np.flatnonzero(w2a)
    b1 = skeleton.b1_full[:, active_e]
    b2 = skeleton.b2_full[np.ix_(active_e, active_t)]
    return b1.T @ b1 + b2 @ b2.T


def hodge_decompose(
    skeleton: ComplexSkeleton, w1, w2, x, sv_cutoff: float = _SV_CUTOFF
) -> HodgeParts:
    """Split an edge flow into gradient, curl and harmonic parts.

    Parameters
    ----------
    w1, w2 : array-like
        Binary selection; must be downward closed.
    x : ndarray, shape (n_active_edges,)
        Flow on the active edges, ordered by ascending candidate index.
    sv_cutoff : float
        Relative singular-value cutoff of the least-squares solves.

    Returns
    -------
    HodgeParts
        Parts are mutually orthogonal and sum to ``x``; closure of the
        selection makes the gradient and curl ranges orthogonal.
    """
    w1a = _as_indicator(w1, skeleton.n_edges, "w1")
    w2a = _as_indicator(w2, skeleton.n_triangles, "w2")
    if _violation_count(skeleton, w1a, w2a) != 0:
        raise ValueError("selection is not downward closed")
    active_e = np.flatnonzero(w1a)
    active_t = np.flatnonzero(w2a)
    xa = np.asarray(x, dtype=np.float64)
    if xa.shape != (active_e.size,):
        raise ValueError(f"x must have shape ({active_e.size},), got {xa.shape}")

    b1 = skeleton.b1_full[:, active_e]
    b2 = skeleton.b2_full[np.ix_(active_e, active_t)]

    v, *_ = np.linalg.lstsq(b1.T, xa, rcond=sv_cutoff)
    gradient = b1.T @ v
    if active_t.size:
        t, *_ = np.linalg.lstsq(b2, xa - gradient, rcond=sv_cutoff)
        curl = b2 @ t
    else:
        t = np.zeros(0)
        curl = np.zeros_like(xa)
    harmonic = xa - gradient - curl
    return HodgeParts(gradient, curl, harmonic, v, t)


def _violation_count(skeleton: ComplexSkeleton, w1: np.ndarray, w2: np.ndarray) -> int:
    missing = (1.0 - w1) @ skeleton.b2_unsigned @ w2
    return int(round(missing))


def closure_violations(skeleton: ComplexSkeleton, w1, w2) -> ClosureReport:
    """Report active triangles whose supporting edges are not all active."""
    w1a = _as_indicator(w1, skeleton.n_edges, "w1")
    w2a = _as_indicator(w2, skeleton.n_triangles, "w2")
    per_tri = skeleton.b2_unsigned.T @ (1.0 - w1a)
    items = []
    for t_idx in np.flatnonzero(w2a):
        n_missing = int(round(per_tri[t_idx]))
        if n_missing == 0:
            continue
        edge_rows = np.flatnonzero(skeleton.b2_unsigned[:, t_idx])
        missing = tuple(int(e) for e in edge_rows if w1a[e] == 0.0)
        items.append((int(t_idx), missing))
    count = sum(len(m) for _, m in items)
    return ClosureReport(count, tuple(items))


def is_closed(skeleton: ComplexSkeleton, w1, w2) -> bool:
    """True when every active triangle has all three edges active."""
    w1a = _as_indicator(w1, skeleton.n_edges, "w1")
    w2a = _as_indicator(w2, skeleton.n_triangles, "w2")
    return _violation_count(skeleton, w1a, w2a) == 0


def complex_to_dict(skeleton: ComplexSkeleton, selection: Selection) -> dict:
    """Serialize the active simplices of a selection."""
    w1 = _as_indicator(selection.w1, skeleton.n_edges, "w1")
    w2 = _as_indicator(selection.w2, skeleton.n_triangles, "w2")
    return {
        "n_nodes": skeleton.n_nodes,
        "edges": [list(skeleton.edges[i]) for i in np.flatnonzero(w1)],
        "triangles": [list(skeleton.triangles[i]) for i in np.flatnonzero(w2)],
    }


def complex_from_dict(data: dict) -> tuple[ComplexSkeleton, Selection]:
    """Parse and validate a serialized complex.

    Rejects out-of-range vertices, unsorted simplices, duplicate or
    non-lexicographic listings, and triangles missing a listed edge.
    """
    if not isinstance(data, dict):
        raise ValueError("complex document must be a JSON object")
    for key in ("n_nodes", "edges", "triangles"):
        if key not in data:
            raise ValueError(f"complex document missing key '{key}'")
    n_nodes = data["n_nodes"]
    skeleton = build_skeleton(n_nodes)

    w1 = np.zeros(skeleton.n_edges, dtype=np.int8)
    prev = None
    for entry in data["edges"]:
        pair = tuple(int(v) for v in entry)
        if len(pair) != 2:
            raise ValueError(f"edge entry {entry!r} must have two vertices")
        idx = edge_index(skeleton, *pair)
        if prev is not None and idx <= prev:
            raise ValueError(f"edges must be strictly lexicographic; saw {entry!r} out of order")
        prev = idx
        w1[idx] = 1

    w2 = np.zeros(skeleton.n_triangles, dtype=np.int8)
    prev = None
    for entry in data["triangles"]:
        trip = tuple(int(v) for v in entry)
        if len(trip) != 3:
            raise ValueError(f"triangle entry {entry!r} must have three vertices")
        idx = triangle_index(skeleton, *trip)
        if prev is not None and idx <= prev:
            raise ValueError(
                f"triangles must be strictly lexicographic; saw {entry!r} out of order"
            )
        prev = idx
        w2[idx] = 1

    report = closure_violations(skeleton, w1, w2)
    if report.count:
        t_idx, missing = report.items[0]
        raise ValueError(
            f"triangle {skeleton.triangles[t_idx]} lists inactive edge(s) "
            f"{[skeleton.edges[e] for e in missing]}; complex is not downward closed"
        )
    return skeleton, make_selection(skeleton, w1, w2)


def write_complex_json(path, skeleton: ComplexSkeleton, selection: Selection) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(complex_to_dict(skeleton, selection), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_complex_json(path) -> tuple[ComplexSkeleton, Selection]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in {path}: {exc}") from exc
    return complex_from_dict(data)
