"""Pure-NumPy kernel backend.

Mirrors the API of the compiled ``hgmeans._core`` extension. Distance
scans are chunked so temporaries stay bounded, and every exact nearest
scan goes through the same elementwise formula, which keeps tie-breaking
(lowest index wins) consistent between the Lloyd and Hamerly paths.
"""

import numpy as np

# cap on elements of the (chunk, m, d) distance temporaries (~64 MB of f64)
_CHUNK_ELEMS = 8_000_000


def _row_chunk(m, d):
    return max(1, _CHUNK_ELEMS // max(1, m * d))


def nearest_center(points, centers):
    """Index of the nearest center per point plus the squared distance.

    Ties are broken toward the lowest center index.
    """
    n, d = points.shape
    m = centers.shape[0]
    assign = np.empty(n, dtype=np.int64)
    d2min = np.empty(n, dtype=np.float64)
    step = _row_chunk(m, d)
    for lo in range(0, n, step):
        block = points[lo : lo + step]
        d2 = ((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        idx = np.argmin(d2, axis=1)
        assign[lo : lo + step] = idx
        d2min[lo : lo + step] = d2[np.arange(block.shape[0]), idx]
    return assign, d2min


def nearest_two(points, centers):
    """Nearest-center index plus squared distances to the two closest centers.

    The second distance is ``inf`` when only one center exists.
    """
    n, d = points.shape
    m = centers.shape[0]
    assign = np.empty(n, dtype=np.int64)
    d2_first = np.empty(n, dtype=np.float64)
    d2_second = np.empty(n, dtype=np.float64)
    step = _row_chunk(m, d)
    for lo in range(0, n, step):
        block = points[lo : lo + step]
        d2 = ((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        idx = np.argmin(d2, axis=1)
        rows = np.arange(block.shape[0])
        first = d2[rows, idx]
        if m > 1:
            d2[rows, idx] = np.inf
            second = d2.min(axis=1)
        else:
            second = np.full(block.shape[0], np.inf)
        assign[lo : lo + step] = idx
        d2_first[lo : lo + step] = first
        d2_second[lo : lo + step] = second
    return assign, d2_first, d2_second


def centroid_sums(points, assign, m):
    """Per-cluster coordinate sums and member counts."""
    d = points.shape[1]
    sums = np.zeros((m, d), dtype=np.float64)
    np.add.at(sums, assign, points)
    counts = np.bincount(assign, minlength=m).astype(np.int64)
    return sums, counts


def hamerly_pass(points, centers, assign, upper, lower, s):
    """One bounded reassignment sweep; mutates assign/upper/lower in place.

    Points whose upper bound clears ``max(s[assign], lower)`` are skipped;
    the rest first tighten the upper bound, then fall back to an exact
    scan identical to the plain Lloyd assignment step.
    """
    bound = np.maximum(s[assign], lower)
    cand = np.nonzero(upper > bound)[0]
    if cand.size == 0:
        return 0
    diff = points[cand] - centers[assign[cand]]
    exact = np.sqrt((diff * diff).sum(axis=1))
    upper[cand] = exact
    hard = cand[exact > bound[cand]]
    if hard.size == 0:
        return 0
    new_assign, d2_first, d2_second = nearest_two(points[hard], centers)
    changed = int(np.count_nonzero(new_assign != assign[hard]))
    assign[hard] = new_assign
    upper[hard] = np.sqrt(d2_first)
    lower[hard] = np.sqrt(d2_second)
    return changed


def update_min_d2(points, center, d2):
    """Lower d2 in place with the squared distances to one more center."""
    diff = points - center[None, :]
    np.minimum(d2, (diff * diff).sum(axis=1), out=d2)


def cost_of(points, centers, assign):
    """Sum of squared distances from each point to its assigned center."""
    diff = points - centers[assign]
    return float((diff * diff).sum())


def solve_assignment(cost):
    """Minimum-cost perfect matching on a square matrix.

    Shortest-augmenting-path method with row/column potentials; O(m^3).
    Returns ``perm`` with ``perm[i]`` the column matched to row ``i``.
    """
    n = cost.shape[0]
    u = np.zeros(n + 1, dtype=np.float64)
    v = np.zeros(n + 1, dtype=np.float64)
    # col -> assigned row, 1-based; column 0 is the virtual root
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = np.nonzero(~used[1:])[0] + 1
            cur = cost[i0 - 1, free - 1] - u[i0] - v[free]
            better = cur < minv[free]
            if better.any():
                upd = free[better]
                minv[upd] = cur[better]
                way[upd] = j0
            k = int(np.argmin(minv[free]))
            j1 = int(free[k])
            delta = minv[j1]
            used_idx = np.nonzero(used)[0]
            u[p[used_idx]] += delta
            v[used_idx] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.int64)
    perm[p[1:] - 1] = np.arange(n, dtype=np.int64)
    return perm
