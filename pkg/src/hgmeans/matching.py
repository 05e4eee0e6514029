"""Exact minimum-cost assignment on a square cost matrix.

Shortest-augmenting-path variant of the Hungarian method, O(m^3). Ties
between optimal matchings are broken by the fixed column scan order of
the algorithm, so results are deterministic.
"""

import numpy as np

from . import _kernels


def solve_assignment(cost):
    """Minimum-cost perfect matching.

    ``perm[i]`` is the column matched to row ``i``; ``total`` is the
    globally minimal sum of ``cost[i, perm[i]]``.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {cost.shape}")
    if cost.shape[0] == 0:
        raise ValueError("cost matrix is empty")
    if not np.isfinite(cost).all():
        raise ValueError("cost matrix contains NaN or Inf")
    if (cost < 0).any():
        raise ValueError("cost matrix must be nonnegative")
    perm = np.asarray(_kernels.solve_assignment(cost), dtype=np.int64)
    total = float(cost[np.arange(cost.shape[0]), perm].sum())
    return perm, total
