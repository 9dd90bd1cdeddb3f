"""
Minimum-norm point of a convex hull (Wolfe's active-set method).

The norm of that point equals max over unit u of min over the generators of <v, u>,
which is how the symmetric-error model decides whether a vertex set fits in a
halfspace at distance a.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MNP_TOL = 1e-10
_WEIGHT_TOL = 1e-12
_MAX_MAJOR = 1000


def affine_min_norm(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Minimum-norm point of the affine hull of the rows of points.

    Returns (point, weights) with weights summing to one. Solves the KKT system
    [[Q Q^T, 1], [1^T, 0]] [w; mu] = [0; 1] by least squares so affinely
    dependent rows still produce an answer.
    """
    q = np.atleast_2d(np.asarray(points, dtype=np.float64))
    k = q.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = q @ q.T
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    weights = solution[:k]
    return weights @ q, weights


def min_norm_point(points: Sequence[Sequence[float]]) -> np.ndarray:
    """Point of smallest Euclidean norm in conv(points); rows are points."""
    p = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if p.size == 0:
        raise ValueError("min_norm_point needs at least one point")
    # lexicographic order fixes tie-breaking
    p = p[np.lexsort(p.T[::-1])]
    scale = max(1.0, float(np.max(np.einsum("ij,ij->i", p, p))))

    start = int(np.argmin(np.einsum("ij,ij->i", p, p)))
    corral = [start]
    weights = np.array([1.0])
    x = p[start].copy()

    for _ in range(_MAX_MAJOR):
        dots = p @ x
        j = int(np.argmin(dots))
        if float(x @ x) - float(dots[j]) <= MNP_TOL * scale or j in corral:
            break
        corral.append(j)
        weights = np.append(weights, 0.0)
        while True:
            y, alpha = affine_min_norm(p[corral])
            if np.all(alpha > _WEIGHT_TOL):
                x, weights = y, alpha
                break
            # move from the current weights toward alpha until one weight hits zero
            shrinking = (alpha <= _WEIGHT_TOL) & (weights - alpha > 0)
            theta = float(np.min(weights[shrinking] / (weights[shrinking] - alpha[shrinking]))) if shrinking.any() else 0.0
            theta = min(max(theta, 0.0), 1.0)
            weights = weights + theta * (alpha - weights)
            drop = np.flatnonzero(weights <= _WEIGHT_TOL)
            if drop.size == 0:
                drop = np.array([int(np.argmin(weights))])
            keep = np.setdiff1d(np.arange(len(corral)), drop)
            corral = [corral[i] for i in keep]
            weights = weights[keep]
            weights = weights / weights.sum()
            x = weights @ p[corral]
    else:
        logger.warning("min_norm_point stopped after %d major cycles", _MAX_MAJOR)
    return x
