"""Point-set loading, synthetic Gaussian mixtures, and separation checks."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetFormatError(ValueError):
    """Malformed dataset file; message carries the offending line number."""


class MixtureRejectionError(RuntimeError):
    """No acceptable mixture found within the attempt budget."""


@dataclass(frozen=True)
class Dataset:
    """Immutable n x d point matrix."""

    points: np.ndarray
    name: str = ""

    def __post_init__(self):
        # private copy: freezing must not touch the caller's array
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"need at least one row and one column, got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("points contain NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """Reference partition: dense 0-based labels, every cluster non-empty."""

    labels: np.ndarray
    m_true: int

    def __post_init__(self):
        lab = np.array(self.labels, dtype=np.int64, order="C", copy=True)
        if lab.ndim != 1 or lab.size < 1:
            raise ValueError("labels must be a non-empty 1-D vector")
        present = np.unique(lab)
        if present[0] < 0 or present[-1] >= self.m_true:
            raise ValueError(f"labels out of range [0, {self.m_true})")
        if present.size != self.m_true:
            raise ValueError("every cluster index must appear at least once")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @classmethod
    def from_raw(cls, raw):
        """Build from arbitrary integer labels, remapped to a dense 0-based range."""
        raw = np.asarray(raw, dtype=np.int64)
        uniq, dense = np.unique(raw, return_inverse=True)
        return cls(labels=dense.astype(np.int64), m_true=int(uniq.size))


@dataclass(frozen=True)
class GmmSpec:
    """Recipe for a spherical Gaussian mixture sample.

    Component means are drawn uniformly per coordinate from ``mean_range``
    and per-component variances from ``var_range``; each sample picks its
    component uniformly (probability 1/m) and adds N(0, sigma^2 I) noise.
    """

    m: int
    d: int
    n: int
    mean_range: tuple = (0.0, 5.0)
    var_range: tuple = (1.0, 10.0)
    seed: int | None = None

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ValueError("m and d must be >= 1")
        if self.n < self.m:
            raise ValueError(f"need n >= m, got n={self.n} m={self.m}")
        if not (self.mean_range[0] <= self.mean_range[1]):
            raise ValueError("mean_range must be ordered")
        if not (0 < self.var_range[0] <= self.var_range[1]):
            raise ValueError("var_range must be positive and ordered")


@dataclass(frozen=True)
class MixtureParams:
    """Generating parameters of a sampled mixture."""

    means: np.ndarray  # (m, d)
    sigma2: np.ndarray  # (m,)

    @property
    def m(self):
        return self.means.shape[0]


@dataclass(frozen=True)
class SeparationReport:
    is_1_separated: bool
    frac_half_separated: float


def load_dataset(path, format="plain"):
    """Read a whitespace-separated point file.

    Line 1 holds two integers ``n d``; the next n lines hold d reals each.
    The ``labeled`` format appends one integer class label per row.
    Returns ``(Dataset, GroundTruth | None)``; labels are remapped to a
    dense 0-based range.
    """
    if format not in ("plain", "labeled"):
        raise ValueError(f"unknown format {format!r}")
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    def fail(lineno, msg):
        raise DatasetFormatError(f"{path}: line {lineno}: {msg}")

    if not lines or not lines[0].split():
        fail(1, "missing 'n d' header")
    header = lines[0].split()
    if len(header) != 2:
        fail(1, f"header must be two integers, got {len(header)} tokens")
    try:
        n, d = int(header[0]), int(header[1])
    except ValueError:
        fail(1, f"non-integer header {lines[0].strip()!r}")
    if n < 1 or d < 1:
        fail(1, f"header requires n >= 1 and d >= 1, got n={n} d={d}")

    want = d + 1 if format == "labeled" else d
    pts = np.empty((n, d), dtype=np.float64)
    raw_labels = np.empty(n, dtype=np.int64) if format == "labeled" else None
    row = 0
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens:
            continue  # blank lines tolerated anywhere
        if row >= n:
            fail(lineno, f"more than the {n} rows promised by the header")
        if len(tokens) != want:
            fail(lineno, f"row {row + 1} has {len(tokens)} of {want} values")
        try:
            values = [float(t) for t in tokens[:d]]
        except ValueError:
            fail(lineno, f"non-numeric token in {line.strip()!r}")
        if not all(np.isfinite(values)):
            fail(lineno, "NaN or Inf coordinate")
        pts[row] = values
        if format == "labeled":
            try:
                raw_labels[row] = int(tokens[d])
            except ValueError:
                fail(lineno, f"non-integer label {tokens[d]!r}")
        row += 1
    if row != n:
        fail(len(lines), f"expected {n} rows, found {row}")

    ds = Dataset(points=pts, name=path.stem)
    gt = GroundTruth.from_raw(raw_labels) if format == "labeled" else None
    return ds, gt


def save_dataset(ds, path, labels=None):
    """Write a Dataset back to the on-disk format (labeled when labels given)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{ds.n} {ds.d}\n")
        for i in range(ds.n):
            coords = " ".join(repr(float(v)) for v in ds.points[i])
            if labels is not None:
                fh.write(f"{coords} {int(labels[i])}\n")
            else:
                fh.write(coords + "\n")


def _draw_mixture(spec, rng):
    means = rng.uniform(spec.mean_range[0], spec.mean_range[1], size=(spec.m, spec.d))
    sigma2 = rng.uniform(spec.var_range[0], spec.var_range[1], size=spec.m)
    labels = rng.integers(0, spec.m, size=spec.n)
    # i.i.d. component choice almost surely covers every component when
    # n >> m; if not, retry, then force coverage so the ground truth stays
    # a valid partition into exactly m clusters.
    for _ in range(100):
        if np.unique(labels).size == spec.m:
            break
        labels = rng.integers(0, spec.m, size=spec.n)
    else:
        slots = rng.permutation(spec.n)[: spec.m]
        labels[slots] = rng.permutation(spec.m)
    noise = rng.standard_normal((spec.n, spec.d))
    pts = means[labels] + np.sqrt(sigma2)[labels, None] * noise
    name = f"gmm_m{spec.m}_d{spec.d}_n{spec.n}"
    if spec.seed is not None:
        name += f"_s{spec.seed}"
    ds = Dataset(points=pts, name=name)
    gt = GroundTruth(labels=labels.astype(np.int64), m_true=spec.m)
    return ds, gt, MixtureParams(means=means, sigma2=sigma2)


def generate_gmm(spec):
    """Sample one mixture draw.

    The PRNG is NumPy's PCG64 seeded with ``spec.seed``, so a fixed seed
    reproduces the dataset bit for bit on any platform.
    """
    return _draw_mixture(spec, np.random.default_rng(spec.seed))


def separation_report(means, sigma2):
    """Pairwise c-separation summary of a mixture.

    A pair (i, j) is c-separated when ||mu_i - mu_j|| >= c * sqrt(d) *
    max(sigma_i, sigma_j). Reports whether every pair is 1-separated and
    the fraction of pairs that are 1/2-separated.
    """
    means = np.asarray(means, dtype=np.float64)
    sigma = np.sqrt(np.asarray(sigma2, dtype=np.float64))
    m, d = means.shape
    if m < 2:
        raise ValueError("separation needs at least two components")
    diff = means[:, None, :] - means[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    thr = np.sqrt(d) * np.maximum(sigma[:, None], sigma[None, :])
    iu = np.triu_indices(m, k=1)
    full = bool((dist[iu] >= thr[iu]).all())
    frac = float((dist[iu] >= 0.5 * thr[iu]).mean())
    return SeparationReport(is_1_separated=full, frac_half_separated=frac)


def accept_mixture(report):
    """Overlap gate: keep mixtures that are not 1-separated yet have at
    least 99% of pairs 1/2-separated."""
    return (not report.is_1_separated) and report.frac_half_separated >= 0.99


def generate_accepted_gmm(spec, max_attempts=10_000):
    """Redraw mixtures until one passes :func:`accept_mixture`.

    Single-component specs are accepted on the first draw (no pairs to
    separate). Returns ``(Dataset, GroundTruth, MixtureParams,
    SeparationReport, attempts)``; raises :class:`MixtureRejectionError`
    after ``max_attempts`` rejected draws.
    """
    ss = np.random.SeedSequence(spec.seed)
    for attempt in range(1, max_attempts + 1):
        rng = np.random.default_rng(ss.spawn(1)[0])
        ds, gt, params = _draw_mixture(spec, rng)
        if spec.m < 2:
            return ds, gt, params, SeparationReport(False, 1.0), attempt
        report = separation_report(params.means, params.sigma2)
        if accept_mixture(report):
            return ds, gt, params, report, attempt
    raise MixtureRejectionError(
        f"no acceptable mixture in {max_attempts} attempts for m={spec.m} d={spec.d}"
    )


def save_mixture_params(params, path):
    """Write generating parameters as CSV: component, sigma2, mu_1..mu_d."""
    d = params.means.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "sigma2"] + [f"mu_{j + 1}" for j in range(d)])
        for k in range(params.m):
            writer.writerow(
                [k, repr(float(params.sigma2[k]))]
                + [repr(float(v)) for v in params.means[k]]
            )


def load_mixture_params(path):
    """Inverse of :func:`save_mixture_params`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 3 or rows[0][0] != "component":
        raise ValueError(f"{path}: not a mixture parameter file")
    body = rows[1:]
    means = np.array([[float(v) for v in r[2:]] for r in body], dtype=np.float64)
    sigma2 = np.array([float(r[1]) for r in body], dtype=np.float64)
    return MixtureParams(means=means, sigma2=sigma2)
