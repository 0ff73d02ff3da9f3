"""Exact reference solvers.

Small-instance ground truth used to validate the heuristics: Held-Karp
dynamic programming for shortest open paths (both endpoints free), full
subset enumeration for the prize-collecting variant, and a least-squares
polynomial fit.  The DP is O(2^n * n^2), so instances are capped at
max_n vertices.
"""

from __future__ import annotations

import numpy as np

MAX_EXACT = 12
TOO_LARGE = "instance too large for exact solver"
DEGENERATE = "degenerate design matrix"


def _held_karp_table(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """dp[mask, j] = weight of the cheapest open path visiting exactly the
    vertices in mask and ending at j; parent[mask, j] reconstructs it."""
    n = dist.shape[0]
    size = 1 << n
    dp = np.full((size, n), np.inf)
    parent = np.full((size, n), -1, dtype=np.int64)
    for j in range(n):
        dp[1 << j, j] = 0.0
    for mask in range(1, size):
        if mask & (mask - 1) == 0:
            continue
        for j in range(n):
            bit = 1 << j
            if not mask & bit:
                continue
            cand = dp[mask ^ bit] + dist[:, j]
            i = int(np.argmin(cand))
            dp[mask, j] = cand[i]
            parent[mask, j] = i
    return dp, parent


def _reconstruct(parent: np.ndarray, mask: int, j: int) -> list[int]:
    path = [j]
    while parent[mask, j] >= 0:
        i = int(parent[mask, j])
        mask ^= 1 << j
        j = i
        path.append(j)
    path.reverse()
    return path


def exact_tsp_path(instance, subset=None, max_n: int = MAX_EXACT) -> tuple[np.ndarray, float]:
    """Optimal open path over `subset` (default: all vertices).

    Returns (tour of global vertex ids, weight).  Endpoints are free.
    """
    if subset is None:
        subset = np.arange(instance.n)
    subset = np.asarray(subset, dtype=np.int64)
    if subset.size > max_n:
        raise ValueError(TOO_LARGE)
    if subset.size == 0:
        return subset.copy(), 0.0
    if subset.size == 1:
        return subset.copy(), 0.0
    dist = instance.dist[np.ix_(subset, subset)]
    dp, parent = _held_karp_table(dist)
    full = (1 << subset.size) - 1
    j = int(np.argmin(dp[full]))
    local = _reconstruct(parent, full, j)
    return subset[np.array(local)], float(dp[full, j])


def exact_soft_tsp(instance, penalties, max_n: int = MAX_EXACT) -> tuple[np.ndarray, float]:
    """Optimal prize-collecting open path by enumerating all vertex subsets.

    Cost of a subset = its optimal path weight + penalties of the skipped
    vertices.  Returns (tour of global ids, cost); the empty tour is a
    valid solution with cost sum(penalties).
    """
    penalties = np.asarray(penalties, dtype=float)
    n = instance.n
    if penalties.shape != (n,):
        raise ValueError("penalty length mismatch")
    if n > max_n:
        raise ValueError(TOO_LARGE)
    dp, parent = _held_karp_table(instance.dist)
    pen_total = float(penalties.sum())
    masks = np.arange(1 << n)
    path_best = dp.min(axis=1)
    path_best[0] = 0.0  # empty tour walks nothing
    visited_pen = (((masks[:, None] >> np.arange(n)) & 1) * penalties).sum(axis=1)
    total = path_best + (pen_total - visited_pen)
    m = int(np.argmin(total))
    cost = float(total[m])
    if m == 0:
        return np.empty(0, dtype=np.int64), cost
    j = int(np.argmin(dp[m]))
    local = _reconstruct(parent, m, j)
    return np.array(local, dtype=np.int64), cost


def least_squares_fit(dataset, degree: int) -> np.ndarray:
    """Least-squares polynomial coefficients [a_0 .. a_degree].

    Raises on rank-deficient designs and when degree + 1 exceeds the
    number of samples.
    """
    xs = np.asarray(dataset.xs, dtype=float)
    ys = np.asarray(dataset.ys, dtype=float)
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if degree + 1 > xs.size:
        raise ValueError("degree + 1 exceeds the number of samples")
    vand = np.vander(xs, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(vand, ys, rcond=None)
    if rank < degree + 1:
        raise ValueError(DEGENERATE)
    return coeffs
