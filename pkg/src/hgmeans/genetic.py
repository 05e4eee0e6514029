"""Hybrid genetic search for minimum sum-of-squares clustering.

Population of K-means local optima evolved by binary tournaments, a
matching-based crossover, an adaptive center-relocation mutation, and
clone-first survivor selection.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels, matching
from .dataset import Dataset
from .kmeans import (
    as_points,
    hamerly_kmeans,
    repair_empty_clusters,
    sample_relocation,
    seed_random_samples,
)
from .metrics import RunReport


@dataclass(frozen=True)
class Individual:
    """One candidate solution: center positions, the assignment they
    induce, the self-adaptive mutation weight, and the cached objective."""

    centers: np.ndarray  # (m, d)
    assign: np.ndarray  # (n,)
    alpha: float
    cost: float

    @property
    def m(self):
        return self.centers.shape[0]


@dataclass(frozen=True)
class HgParams:
    """Search parameters.

    Defaults are the calibrated setting: population bounds (10, 20) and
    termination after 500 consecutive non-improving iterations or 5000
    iterations total. :meth:`fast` gives the reduced-effort preset
    (5, 10) / (50, 500).
    """

    m: int
    pi_min: int = 10
    pi_max: int = 20
    n1: int = 500
    n2: int = 5000
    seed: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not (1 <= self.pi_min <= self.pi_max):
            raise ValueError("need 1 <= pi_min <= pi_max")
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("iteration limits must be >= 0")

    @classmethod
    def fast(cls, m, seed=None):
        return cls(m=m, pi_min=5, pi_max=10, n1=50, n2=500, seed=seed)


class Population:
    """Bounded multiset of individuals with best-ever bookkeeping.

    ``best`` is a stored reference to the lowest-cost individual ever
    inserted; survivor selection never touches it.
    """

    def __init__(self, individuals, pi_min, pi_max):
        if not individuals:
            raise ValueError("population cannot start empty")
        self.individuals = list(individuals)
        self.pi_min = pi_min
        self.pi_max = pi_max
        self.best = min(self.individuals, key=lambda ind: ind.cost)

    @property
    def size(self):
        return len(self.individuals)

    def add(self, individual):
        self.individuals.append(individual)
        if individual.cost < self.best.cost:
            self.best = individual


def _local_search(data, centers, alpha, rng):
    """K-means from the given start, repairing memberless clusters."""
    result = hamerly_kmeans(data, centers)
    if result.empty_clusters.size:
        result = repair_empty_clusters(
            data, result.centers, result.assign, alpha, rng
        )
    return result


def _make_individual(result, alpha):
    return Individual(
        centers=result.centers, assign=result.assign, alpha=alpha, cost=result.cost
    )


def init_population(data, params, rng):
    """Independent K-means runs from random sample seeds, one per slot
    up to ``pi_max``; mutation weights drawn uniformly from [0, 1]."""
    individuals = []
    for _ in range(params.pi_max):
        alpha = float(rng.uniform())
        init = seed_random_samples(data, params.m, rng)
        result = _local_search(data, init, alpha, rng)
        individuals.append(_make_individual(result, alpha))
    return Population(individuals, params.pi_min, params.pi_max)


def binary_tournament(pop, rng):
    """Lower-cost of two uniform draws (with replacement; first wins ties)."""
    first = pop.individuals[int(rng.integers(pop.size))]
    second = pop.individuals[int(rng.integers(pop.size))]
    return first if first.cost <= second.cost else second


def crossover_mx(parent1, parent2, rng):
    """Matching crossover.

    Pairs up the parents' centers by an exact minimum-cost matching
    under Euclidean distance, then keeps one center of each pair with
    probability 1/2. The child's mutation weight is the parent average.
    Every child center is coordinate-identical to a parent center, and
    the outcome distribution does not depend on center order.
    """
    c1, c2 = parent1.centers, parent2.centers
    if c1.shape != c2.shape:
        raise ValueError("parents must have the same number of centers")
    diff = c1[:, None, :] - c2[None, :, :]
    cost = np.sqrt((diff * diff).sum(axis=2))
    perm, _ = matching.solve_assignment(cost)
    take_first = rng.random(c1.shape[0]) < 0.5
    child = np.where(take_first[:, None], c1, c2[perm])
    child_alpha = 0.5 * (parent1.alpha + parent2.alpha)
    return np.ascontiguousarray(child), child_alpha


def mutate(child_centers, child_alpha, data, rng):
    """Adaptive relocation of one center.

    The mutation weight takes a uniform step in [-0.2, 0.2] (clamped to
    [0, 1]); one center is removed uniformly at random and re-inserted
    on a sample drawn from the uniform/distance-proportional roulette,
    with distances measured to the nearest remaining center.
    """
    points = as_points(data)
    alpha = float(np.clip(child_alpha + rng.uniform(-0.2, 0.2), 0.0, 1.0))
    m = child_centers.shape[0]
    if m == 1 and points.shape[0] == 1:
        return child_centers.copy(), alpha
    kill = int(rng.integers(m))
    if m > 1:
        remaining = np.ascontiguousarray(np.delete(child_centers, kill, axis=0))
        _, d2 = _kernels.nearest_center(points, remaining)
        dists = np.sqrt(d2)
    else:
        # no remaining center: the distance component degenerates
        dists = np.zeros(points.shape[0])
    j = sample_relocation(dists, alpha, rng)
    mutated = child_centers.copy()
    mutated[kill] = points[j]
    return mutated, alpha


def _canonical(centers):
    order = np.lexsort(centers.T[::-1])
    return centers[order]


def _clone_pair(canon_a, canon_b, eps):
    if eps == 0.0:
        return np.array_equal(canon_a, canon_b)
    return bool(np.all(np.abs(canon_a - canon_b) <= eps))


def eliminate_clones(pop, rng, eps=0.0):
    """Drop duplicates: while two individuals share the same center set
    (order-insensitive, exact equality unless ``eps`` is given), remove
    one of the pair at random. Never shrinks below ``pi_min``."""
    inds = pop.individuals
    canon = [_canonical(ind.centers) for ind in inds]
    removed = True
    while removed and len(inds) > pop.pi_min:
        removed = False
        for i in range(len(inds)):
            for j in range(i + 1, len(inds)):
                if _clone_pair(canon[i], canon[j], eps):
                    drop = i if rng.random() < 0.5 else j
                    del inds[drop]
                    del canon[drop]
                    removed = True
                    break
            if removed:
                break
    return pop


def survivor_selection(pop, rng, eps=0.0):
    """Clone removal first, then discard the worst individuals until the
    population is back to ``pi_min``. The stored best is unaffected."""
    eliminate_clones(pop, rng, eps=eps)
    if pop.size > pop.pi_min:
        costs = np.array([ind.cost for ind in pop.individuals])
        order = np.argsort(costs, kind="stable")[: pop.pi_min]
        keep = np.sort(order)
        pop.individuals = [pop.individuals[i] for i in keep]
    return pop


def hgmeans_run(data, params, rng=None, callback=None, time_limit=None):
    """Full evolutionary run.

    Starts from ``pi_max`` K-means local optima, then iterates
    tournament selection, matching crossover, adaptive mutation, and
    K-means local search, inserting every new individual and triggering
    survivor selection whenever the population exceeds ``pi_max``. Stops
    after ``n1`` consecutive iterations without improving the best cost
    (relative tolerance 1e-10), after ``n2`` iterations in total, or at
    the first iteration boundary past ``time_limit`` seconds.

    ``callback(iteration, best_cost, elapsed_seconds)`` is invoked after
    initialization and once per iteration. Returns the best individual
    ever seen and a run report (external-validity fields unset).
    """
    points = as_points(data)
    if params.m > points.shape[0]:
        raise ValueError("more clusters than samples")
    if rng is None:
        rng = np.random.default_rng(params.seed)
    init_rng, tour_rng, cross_rng, mut_rng, manage_rng = rng.spawn(5)

    start = time.perf_counter()
    pop = init_population(data, params, init_rng)
    iteration = 0
    stall = 0
    if callback is not None:
        callback(0, pop.best.cost, time.perf_counter() - start)
    while stall < params.n1 and iteration < params.n2:
        if time_limit is not None and time.perf_counter() - start >= time_limit:
            break
        parent1 = binary_tournament(pop, tour_rng)
        parent2 = binary_tournament(pop, tour_rng)
        child_centers, child_alpha = crossover_mx(parent1, parent2, cross_rng)
        mutated, alpha = mutate(child_centers, child_alpha, data, mut_rng)
        result = _local_search(data, mutated, alpha, manage_rng)
        child = _make_individual(result, alpha)
        incumbent = pop.best.cost
        pop.add(child)
        iteration += 1
        if child.cost < incumbent - 1e-10 * abs(incumbent):
            stall = 0
        else:
            stall += 1
        if pop.size > params.pi_max:
            survivor_selection(pop, manage_rng)
        if callback is not None:
            callback(iteration, pop.best.cost, time.perf_counter() - start)

    elapsed = time.perf_counter() - start
    best = pop.best
    name = data.name if isinstance(data, Dataset) else ""
    report = RunReport(
        dataset=name,
        m=params.m,
        algorithm="hgmeans",
        seed=params.seed,
        objective=best.cost,
        gap_percent=None,
        wall_seconds=elapsed,
        crand=None,
        nmi=None,
        ci=None,
    )
    return best, report
