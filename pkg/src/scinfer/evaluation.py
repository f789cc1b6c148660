"""Recovery metrics: normalized Laplacian errors and support scores.

Laplacian errors always compare the full candidate-axis embeddings
(node-by-node for the graph Laplacian, candidate-edge-by-candidate-edge
for the upper one), so estimates with different active sets stay
directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .topology import (
    ComplexSkeleton,
    Selection,
    closure_violations,
    node_laplacian,
    upper_laplacian,
)

__all__ = ["EvalReport", "nerr", "evaluate"]


@dataclass(frozen=True)
class EvalReport:
    nerr_l0: float
    nerr_lu: float
    edge_precision: float
    edge_recall: float
    edge_f1: float
    triangle_precision: float
    triangle_recall: float
    triangle_f1: float
    closure_violations: int

    def to_dict(self) -> dict:
        return asdict(self)


def nerr(l_est: np.ndarray, l_true: np.ndarray) -> float:
    """Squared-Frobenius error of an estimate, normalized by the truth.

    ``||l_true - l_est||_F^2 / ||l_true||_F^2``; raises on shape
    mismatch or an identically zero reference.
    """
    a = np.asarray(l_est, dtype=np.float64)
    b = np.asarray(l_true, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    denom = np.sum(b * b)
    if denom == 0.0:
        raise ValueError("reference matrix is identically zero")
    return float(np.sum((b - a) ** 2) / denom)


def _nerr_or_degenerate(l_est: np.ndarray, l_true: np.ndarray) -> float:
    if np.sum(l_true * l_true) == 0.0:
        return 0.0 if np.sum(l_est * l_est) == 0.0 else math.inf
    return nerr(l_est, l_true)


def _support_metrics(est: np.ndarray, true: np.ndarray) -> tuple[float, float, float]:
    est_b = est.astype(bool)
    true_b = true.astype(bool)
    tp = int(np.sum(est_b & true_b))
    pred = int(est_b.sum())
    actual = int(true_b.sum())
    if pred == 0:
        precision = 1.0 if actual == 0 else 0.0
    else:
        precision = tp / pred
    if actual == 0:
        recall = 1.0 if pred == 0 else 0.0
    else:
        recall = tp / actual
    f1 = 0.0 if precision + recall == 0.0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def evaluate(skeleton: ComplexSkeleton, est: Selection, truth: Selection) -> EvalReport:
    """Compare an estimated selection against the ground truth."""
    nerr_l0 = _nerr_or_degenerate(
        node_laplacian(skeleton, est.w1.astype(float)),
        node_laplacian(skeleton, truth.w1.astype(float)),
    )
    nerr_lu = _nerr_or_degenerate(
        upper_laplacian(skeleton, est.w2.astype(float)),
        upper_laplacian(skeleton, truth.w2.astype(float)),
    )
    e_p, e_r, e_f1 = _support_metrics(est.w1, truth.w1)
    t_p, t_r, t_f1 = _support_metrics(est.w2, truth.w2)
    report = closure_violations(skeleton, est.w1, est.w2)
    return EvalReport(
        nerr_l0=nerr_l0,
        nerr_lu=nerr_lu,
        edge_precision=e_p,
        edge_recall=e_r,
        edge_f1=e_f1,
        triangle_precision=t_p,
        triangle_recall=t_r,
        triangle_f1=t_f1,
        closure_violations=report.count,
    )
