"""Hybrid genetic algorithm for minimum sum-of-squares clustering.

Library surface: dataset loading and synthetic Gaussian mixtures
(:mod:`hgmeans.dataset`), exact and Hamerly-accelerated K-means
(:mod:`hgmeans.kmeans`), minimum-cost center matching
(:mod:`hgmeans.matching`), the evolutionary solver
(:mod:`hgmeans.genetic`), cluster-validity measures
(:mod:`hgmeans.metrics`), and the benchmark CLI (:mod:`hgmeans.cli`).

Hot distance kernels run on a compiled extension when available and on
a NumPy fallback otherwise; :func:`kernel_backend` reports which one is
active (``HGMEANS_PURE_PYTHON=1`` forces the fallback).
"""

from ._kernels import kernel_backend
from .dataset import (
    Dataset,
    GmmSpec,
    GroundTruth,
    MixtureParams,
    SeparationReport,
    accept_mixture,
    generate_accepted_gmm,
    generate_gmm,
    load_dataset,
    separation_report,
)
from .genetic import (
    HgParams,
    Individual,
    Population,
    binary_tournament,
    crossover_mx,
    eliminate_clones,
    hgmeans_run,
    init_population,
    mutate,
    survivor_selection,
)
from .kmeans import (
    KmeansResult,
    decode_centers,
    decode_membership,
    hamerly_kmeans,
    lloyd_kmeans,
    mssc_cost,
    relocation_probabilities,
    repair_empty_clusters,
    seed_kmeanspp,
    seed_random_samples,
)
from .matching import solve_assignment
from .metrics import (
    RunReport,
    centroid_index,
    centroid_index_vs_truth,
    contingency_table,
    crand,
    gap_percent,
    nmi,
    read_reports,
    write_reports,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "GmmSpec",
    "GroundTruth",
    "HgParams",
    "Individual",
    "KmeansResult",
    "MixtureParams",
    "Population",
    "RunReport",
    "SeparationReport",
    "accept_mixture",
    "binary_tournament",
    "centroid_index",
    "centroid_index_vs_truth",
    "contingency_table",
    "crand",
    "crossover_mx",
    "decode_centers",
    "decode_membership",
    "eliminate_clones",
    "gap_percent",
    "generate_accepted_gmm",
    "generate_gmm",
    "hamerly_kmeans",
    "hgmeans_run",
    "init_population",
    "kernel_backend",
    "lloyd_kmeans",
    "load_dataset",
    "mssc_cost",
    "mutate",
    "nmi",
    "read_reports",
    "relocation_probabilities",
    "repair_empty_clusters",
    "seed_kmeanspp",
    "seed_random_samples",
    "separation_report",
    "solve_assignment",
    "survivor_selection",
    "write_reports",
]
