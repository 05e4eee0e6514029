"""Internal quality (objective gap) and external cluster validity
(adjusted Rand, normalized mutual information, centroid index), plus the
per-run report record and its CSV round-trip."""

import csv
from dataclasses import dataclass

import numpy as np

CSV_COLUMNS = (
    "dataset",
    "m",
    "algorithm",
    "seed",
    "objective",
    "gap_percent",
    "wall_seconds",
    "crand",
    "nmi",
    "ci",
)


def gap_percent(z, z_bks):
    """Percentage gap 100 * (z - z_bks) / z_bks; negative beats the reference."""
    if not z_bks > 0:
        raise ValueError(f"reference objective must be positive, got {z_bks}")
    return 100.0 * (z - z_bks) / z_bks


def contingency_table(a, b):
    """Co-occurrence counts of two partitions of the same samples."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("partitions must be 1-D vectors of equal length")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    k1 = int(ai.max()) + 1
    k2 = int(bi.max()) + 1
    table = np.zeros((k1, k2), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def crand(a, b):
    """Chance-corrected Rand agreement between two partitions (1 = identical)."""
    table = contingency_table(a, b)
    n = int(table.sum())
    if n < 2:
        raise ValueError("need at least two samples")
    sum_cells = _comb2(table).sum()
    sum_rows = _comb2(table.sum(axis=1)).sum()
    sum_cols = _comb2(table.sum(axis=0)).sum()
    expected = sum_rows * sum_cols / _comb2(n)
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:
        # both partitions trivial (all-one-cluster or all-singletons)
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(a, b, normalization="arithmetic"):
    """Normalized mutual information between two partitions.

    Mutual information under natural log, normalized by the arithmetic
    mean of the entropies (2 I / (H1 + H2)); ``max`` and ``sqrt``
    normalizations are available for sensitivity checks. Two trivial
    single-cluster partitions score 1; a single-cluster against a
    non-trivial partition scores 0.
    """
    table = contingency_table(a, b)
    n = int(table.sum())
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    h_a = _entropy(rows, n)
    h_b = _entropy(cols, n)
    if h_a == 0.0 and h_b == 0.0:
        return 1.0
    if h_a == 0.0 or h_b == 0.0:
        return 0.0
    nz = table > 0
    p = table[nz] / n
    outer = np.outer(rows, cols)[nz] / (n * n)
    info = float((p * np.log(p / outer)).sum())
    if normalization == "arithmetic":
        denom = 0.5 * (h_a + h_b)
    elif normalization == "max":
        denom = max(h_a, h_b)
    elif normalization == "sqrt":
        denom = float(np.sqrt(h_a * h_b))
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return float(min(max(info / denom, 0.0), 1.0))


def _orphans(src, dst):
    """Number of dst centers that are nearest to no src center."""
    diff = src[:, None, :] - dst[None, :, :]
    d2 = (diff * diff).sum(axis=2)
    nearest = np.argmin(d2, axis=1)  # lowest index on ties
    hit = np.zeros(dst.shape[0], dtype=bool)
    hit[nearest] = True
    return int(np.count_nonzero(~hit))


def centroid_index(centers1, centers2):
    """Cluster-level structural difference between two center sets.

    Maps each center to its nearest counterpart in the other set and
    counts the centers left unmapped, in both directions; the index is
    the larger count. Zero means the mapping is a bijection both ways.
    """
    c1 = np.atleast_2d(np.asarray(centers1, dtype=np.float64))
    c2 = np.atleast_2d(np.asarray(centers2, dtype=np.float64))
    if c1.shape[0] == 0 or c2.shape[0] == 0:
        raise ValueError("center sets must be nonempty")
    return max(_orphans(c1, c2), _orphans(c2, c1))


def centroid_index_vs_truth(solution_centers, truth_means):
    """Centroid index of a solution against the generating means."""
    return centroid_index(solution_centers, truth_means)


@dataclass(frozen=True)
class RunReport:
    """One benchmark run, as emitted to the results CSV."""

    dataset: str
    m: int
    algorithm: str
    seed: int | None
    objective: float
    gap_percent: float | None
    wall_seconds: float
    crand: float | None
    nmi: float | None
    ci: int | None

    def to_row(self):
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [fmt(getattr(self, c)) for c in CSV_COLUMNS]

    @classmethod
    def from_row(cls, row):
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"expected {len(CSV_COLUMNS)} columns, got {len(row)}")
        text = dict(zip(CSV_COLUMNS, row))

        def opt(key, conv):
            return conv(text[key]) if text[key] != "" else None

        return cls(
            dataset=text["dataset"],
            m=int(text["m"]),
            algorithm=text["algorithm"],
            seed=opt("seed", int),
            objective=float(text["objective"]),
            gap_percent=opt("gap_percent", float),
            wall_seconds=float(text["wall_seconds"]),
            crand=opt("crand", float),
            nmi=opt("nmi", float),
            ci=opt("ci", int),
        )


def write_reports(reports, path):
    """Write reports as CSV with the canonical column order and header."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for report in reports:
            writer.writerow(report.to_row())


def read_reports(path):
    """Inverse of :func:`write_reports`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: missing or unexpected header")
    return [RunReport.from_row(r) for r in rows[1:]]
