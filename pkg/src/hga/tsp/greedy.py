"""MST double-tree baseline.

Prim's algorithm over the subset followed by a depth-first preorder walk
gives an open path at most twice the optimal length on metric instances.
Tie rules are fixed so the baseline is reproducible: Prim starts at the
lowest vertex id, the next tree vertex is the closest one with ties to
the lower id, an equal-weight connection moves a vertex's parent to the
newest tree member, and the walk visits children in ascending id order.
"""

from __future__ import annotations

import numpy as np

from .instance import EuclideanInstance


def greedy_two_approx(inst: EuclideanInstance, subset=None) -> np.ndarray:
    """Preorder walk of the subset's minimum spanning tree (global ids)."""
    if subset is None:
        subset = np.arange(inst.n)
    subset = np.sort(np.asarray(subset, dtype=np.int64))
    if subset.size == 0:
        raise ValueError("empty subset")
    L = subset.size
    if L == 1:
        return subset.copy()
    d = inst.dist[np.ix_(subset, subset)]

    in_tree = np.zeros(L, dtype=bool)
    dist_to = d[0].copy()
    parent = np.zeros(L, dtype=np.int64)
    in_tree[0] = True
    children: list[list[int]] = [[] for _ in range(L)]
    for _ in range(L - 1):
        best = -1
        for v in range(L):
            if not in_tree[v] and (best < 0 or dist_to[v] < dist_to[best]):
                best = v
        in_tree[best] = True
        children[parent[best]].append(best)
        for v in range(L):
            if not in_tree[v] and d[best, v] <= dist_to[v]:
                dist_to[v] = d[best, v]
                parent[v] = best

    order = []
    stack = [0]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(sorted(children[v], reverse=True))
    return subset[np.array(order)]
