"""Lloyd and Hamerly-accelerated K-means, seeding, and empty-cluster repair.

Both local-search variants share the kernel backend, the lowest-index
tie rule, and the centroid update, so from the same start they converge
to identical assignments; the Hamerly variant only skips distance
evaluations that provably cannot change the result.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dataset import Dataset

# safety net; the normal exit is "no assignment changed"
MAX_ITER = 5000


class ClusterRepairError(RuntimeError):
    """Empty-cluster repair exhausted its retry budget."""


def as_points(data):
    """Accept a Dataset or a raw (n, d) array; return C-contiguous float64."""
    if isinstance(data, Dataset):
        return data.points
    pts = np.ascontiguousarray(data, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError(f"expected an (n, d) matrix, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class KmeansResult:
    centers: np.ndarray
    assign: np.ndarray
    cost: float
    iterations: int

    @property
    def m(self):
        return self.centers.shape[0]

    @property
    def empty_clusters(self):
        """Indices of clusters with no assigned sample."""
        counts = np.bincount(self.assign, minlength=self.m)
        return np.nonzero(counts == 0)[0]


def _check_assign(assign, n, m):
    assign = np.ascontiguousarray(assign, dtype=np.int64)
    if assign.shape != (n,):
        raise ValueError("assignment length does not match the sample count")
    if assign.size and (assign.min() < 0 or assign.max() >= m):
        raise ValueError(f"assignment indices must lie in [0, {m})")
    return assign


def mssc_cost(data, centers, assign):
    """Sum of squared Euclidean distances to the assigned centers."""
    points = as_points(data)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[1] != points.shape[1]:
        raise ValueError("center dimension does not match the data")
    assign = _check_assign(assign, points.shape[0], centers.shape[0])
    return float(_kernels.cost_of(points, centers, assign))


def decode_membership(data, centers):
    """Assign every sample to its nearest center (lowest index on ties)."""
    points = as_points(data)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    assign, _ = _kernels.nearest_center(points, centers)
    return assign


def decode_centers(data, assign, m, prev_centers=None):
    """Centroid of each cluster.

    A cluster with no members keeps its row from ``prev_centers`` when
    supplied, otherwise its row is NaN. Returns ``(centers, empty)``
    where ``empty`` lists the memberless cluster indices.
    """
    points = as_points(data)
    assign = _check_assign(assign, points.shape[0], m)
    sums, counts = _kernels.centroid_sums(points, assign, m)
    empty = np.nonzero(counts == 0)[0]
    centers = np.empty((m, points.shape[1]), dtype=np.float64)
    nz = counts > 0
    centers[nz] = sums[nz] / counts[nz, None]
    if empty.size:
        if prev_centers is not None:
            centers[empty] = prev_centers[empty]
        else:
            centers[empty] = np.nan
    return centers, empty


def _updated_centers(points, assign, m, prev):
    sums, counts = _kernels.centroid_sums(points, assign, m)
    centers = prev.copy()
    nz = counts > 0
    centers[nz] = sums[nz] / counts[nz, None]
    return centers


def _check_init(points, init):
    centers = np.array(init, dtype=np.float64, order="C", copy=True)
    if centers.ndim != 2 or centers.shape[1] != points.shape[1]:
        raise ValueError("initial centers must be an (m, d) matrix matching the data")
    if centers.shape[0] > points.shape[0]:
        raise ValueError("more centers than samples")
    if not np.isfinite(centers).all():
        raise ValueError("initial centers contain NaN or Inf")
    return centers


def lloyd_kmeans(data, init, max_iter=MAX_ITER):
    """Plain alternating K-means run until no assignment changes."""
    points = as_points(data)
    centers = _check_init(points, init)
    m = centers.shape[0]
    assign, _ = _kernels.nearest_center(points, centers)
    iterations = 0
    while iterations < max_iter:
        centers = _updated_centers(points, assign, m, centers)
        new_assign, _ = _kernels.nearest_center(points, centers)
        iterations += 1
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    cost = float(_kernels.cost_of(points, centers, assign))
    return KmeansResult(centers=centers, assign=assign, cost=cost, iterations=iterations)


def hamerly_kmeans(data, init, max_iter=MAX_ITER):
    """K-means with Hamerly's distance bounds.

    Keeps one upper bound (distance to the assigned center) and one lower
    bound (distance to the second-closest center) per sample; samples
    whose bounds prove the assignment unchanged skip the exact scan.
    Result matches :func:`lloyd_kmeans` from the same start.
    """
    points = as_points(data)
    centers = _check_init(points, init)
    m = centers.shape[0]
    assign, d2_first, d2_second = _kernels.nearest_two(points, centers)
    upper = np.sqrt(d2_first)
    lower = np.sqrt(d2_second)
    iterations = 0
    while iterations < max_iter:
        new_centers = _updated_centers(points, assign, m, centers)
        move = np.sqrt(((new_centers - centers) ** 2).sum(axis=1))
        centers = new_centers
        upper += move[assign]
        if m > 1:
            order = np.argsort(move, kind="stable")
            longest_idx = order[-1]
            second_longest = move[order[-2]]
            shrink = np.where(assign == longest_idx, second_longest, move[longest_idx])
            lower -= shrink
            # half the distance to each center's nearest other center
            _, _, c2 = _kernels.nearest_two(centers, centers)
            s = 0.5 * np.sqrt(c2)
        else:
            lower -= move[0]
            s = np.full(1, np.inf)
        changed = _kernels.hamerly_pass(points, centers, assign, upper, lower, s)
        iterations += 1
        if changed == 0:
            break
    cost = float(_kernels.cost_of(points, centers, assign))
    return KmeansResult(centers=centers, assign=assign, cost=cost, iterations=iterations)


def seed_random_samples(data, m, rng):
    """m distinct samples chosen uniformly without replacement."""
    points = as_points(data)
    if m > points.shape[0]:
        raise ValueError(f"cannot place {m} centers on {points.shape[0]} samples")
    idx = rng.choice(points.shape[0], size=m, replace=False)
    return points[idx].copy()


def weighted_index(weights, rng):
    """Roulette draw: index i with probability weights[i] / sum(weights)."""
    total = float(weights.sum())
    if not total > 0.0:
        raise ValueError("weights must have positive sum")
    u = rng.random() * total
    cum = np.cumsum(weights)
    return int(min(np.searchsorted(cum, u, side="right"), len(weights) - 1))


def seed_kmeanspp(data, m, rng):
    """D^2 seeding: first center uniform, each next one drawn with
    probability proportional to the squared distance to its nearest
    already-chosen center."""
    points = as_points(data)
    n = points.shape[0]
    if m > n:
        raise ValueError(f"cannot place {m} centers on {n} samples")
    centers = np.empty((m, points.shape[1]), dtype=np.float64)
    centers[0] = points[int(rng.integers(n))]
    d2 = np.full(n, np.inf)
    _kernels.update_min_d2(points, centers[0], d2)
    for k in range(1, m):
        total = float(d2.sum())
        if total > 0.0:
            j = weighted_index(d2, rng)
        else:
            # every sample already coincides with a center
            j = int(rng.integers(n))
        centers[k] = points[j]
        _kernels.update_min_d2(points, centers[k], d2)
    return centers


def relocation_probabilities(dists, alpha):
    """Mixture of a uniform and a distance-proportional distribution.

    P(i) = (1 - alpha)/n + alpha * dists[i] / sum(dists). When every
    distance is zero the distance component is degenerate and the draw
    falls back to uniform.
    """
    dists = np.asarray(dists, dtype=np.float64)
    n = dists.shape[0]
    total = float(dists.sum())
    if total > 0.0:
        return (1.0 - alpha) / n + alpha * dists / total
    return np.full(n, 1.0 / n)


def sample_relocation(dists, alpha, rng):
    """Draw a sample index from :func:`relocation_probabilities`."""
    return weighted_index(relocation_probabilities(dists, alpha), rng)


def repair_empty_clusters(data, centers, assign, alpha, rng, max_retries=100):
    """Relocate memberless centers and rerun K-means until none remain.

    Each empty center moves onto a sample drawn by the relocation
    roulette (distances taken to the nearest non-empty center, refreshed
    after each placement); K-means then restarts from the full center
    set. Fails once the retry budget runs out, which requires more
    clusters than distinct points.
    """
    points = as_points(data)
    centers = np.array(centers, dtype=np.float64, order="C", copy=True)
    m = centers.shape[0]
    assign = _check_assign(assign, points.shape[0], m)
    for _ in range(max_retries):
        counts = np.bincount(assign, minlength=m)
        empty = np.nonzero(counts == 0)[0]
        if empty.size == 0:
            cost = float(_kernels.cost_of(points, centers, assign))
            return KmeansResult(centers=centers, assign=assign, cost=cost, iterations=0)
        occupied = np.ascontiguousarray(centers[counts > 0])
        _, d2 = _kernels.nearest_center(points, occupied)
        for k in empty:
            j = sample_relocation(np.sqrt(d2), alpha, rng)
            centers[k] = points[j]
            _kernels.update_min_d2(points, centers[k], d2)
        result = hamerly_kmeans(points, centers)
        if result.empty_clusters.size == 0:
            return result
        centers = result.centers.copy()
        assign = result.assign
    raise ClusterRepairError(
        f"could not populate all {m} clusters in {max_retries} attempts"
    )
