"""Benchmark harness: run solvers over a config grid, generate synthetic
mixtures, and turn result CSVs into plot-ready series.

Config files are plain ``key = value`` text; see :func:`parse_config`
for the accepted keys. Exit codes: 0 success, 1 partial failures,
2 invalid config or input.
"""

import argparse
import csv
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .dataset import (
    GmmSpec,
    GroundTruth,
    MixtureRejectionError,
    generate_accepted_gmm,
    load_dataset,
    load_mixture_params,
    save_dataset,
    save_mixture_params,
)
from .genetic import HgParams, hgmeans_run
from .kmeans import decode_centers, hamerly_kmeans, seed_kmeanspp, seed_random_samples
from .metrics import (
    RunReport,
    centroid_index,
    crand,
    gap_percent,
    nmi,
    read_reports,
    write_reports,
)

ALGORITHMS = ("hgmeans", "hgmeans-fast", "kmeans", "kmeanspp")
BASELINES = ("kmeans", "kmeanspp")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    path: str | None = None
    labeled: bool = False
    labels_path: str | None = None
    means_path: str | None = None
    gmm: GmmSpec | None = None


@dataclass(frozen=True)
class BenchConfig:
    entries: tuple
    m_values: tuple
    algorithms: tuple
    repetitions: int = 1
    bks_path: str | None = None
    output: str = "."
    seed: int = 0
    time_limit: float | None = None

    def __post_init__(self):
        if not self.entries:
            raise ConfigError("at least one dataset is required")
        if not self.m_values:
            raise ConfigError("at least one value of m is required")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {algo!r}; roster: {ALGORITHMS}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")


def _parse_gmm_value(value, fallback_seed):
    fields = {}
    for token in re.split(r"[,\s]+", value.strip()):
        if not token:
            continue
        if "=" not in token:
            raise ConfigError(f"gmm entries expect key=value pairs, got {token!r}")
        key, _, raw = token.partition("=")
        fields[key] = raw
    try:
        spec = GmmSpec(
            m=int(fields.pop("m")),
            d=int(fields.pop("d")),
            n=int(fields.pop("n")),
            seed=int(fields.pop("seed", fallback_seed)),
        )
    except KeyError as missing:
        raise ConfigError(f"gmm entry missing {missing} field") from None
    except ValueError as exc:
        raise ConfigError(f"bad gmm entry: {exc}") from None
    if fields:
        raise ConfigError(f"unknown gmm fields {sorted(fields)}")
    return spec


def _parse_dataset_value(value, base):
    tokens = value.split()
    path = str((base / tokens[0]).resolve())
    labeled = False
    labels_path = means_path = None
    name = Path(tokens[0]).stem
    for token in tokens[1:]:
        if token == "labeled":
            labeled = True
        elif token.startswith("labels="):
            labels_path = str((base / token[len("labels=") :]).resolve())
        elif token.startswith("means="):
            means_path = str((base / token[len("means=") :]).resolve())
        elif token.startswith("name="):
            name = token[len("name=") :]
        else:
            raise ConfigError(f"unknown dataset option {token!r}")
    return DatasetEntry(
        name=name, path=path, labeled=labeled, labels_path=labels_path,
        means_path=means_path,
    )


def parse_config(path):
    """Parse a benchmark config file.

    Keys (one ``key = value`` per line, ``#`` comments):

    - ``dataset = PATH [labeled] [labels=PATH] [means=PATH] [name=ID]``
    - ``gmm = m=20 d=50 n=5000 [seed=S]`` (synthetic entry; seed defaults
      to a value derived from the master seed and the entry position)
    - ``m = 2 5 10`` (cluster counts)
    - ``algorithms = hgmeans hgmeans-fast kmeans kmeanspp``
    - ``repetitions = 5`` (per baseline algorithm)
    - ``bks = PATH`` (CSV ``dataset,m,bks_objective``)
    - ``output = DIR``, ``seed = INT``, ``time_limit = SECONDS``

    Relative paths resolve against the config file's directory.
    """
    path = Path(path)
    base = path.parent
    raw_entries = []
    fields = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in ("dataset", "gmm"):
            raw_entries.append((key, value))
        elif key in ("m", "algorithms", "repetitions", "bks", "output", "seed",
                     "time_limit"):
            if key in fields:
                raise ConfigError(f"{path}: line {lineno}: duplicate key {key!r}")
            fields[key] = value
        else:
            raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")

    seed = int(fields.get("seed", "0"))
    entries = []
    for idx, (kind, value) in enumerate(raw_entries):
        if kind == "dataset":
            entries.append(_parse_dataset_value(value, base))
        else:
            fallback = int(np.random.SeedSequence([seed, 7, idx]).generate_state(1)[0])
            spec = _parse_gmm_value(value, fallback)
            entries.append(DatasetEntry(name=f"gmm_m{spec.m}_d{spec.d}_n{spec.n}",
                                        gmm=spec))
    try:
        m_values = tuple(int(tok) for tok in fields.get("m", "").split())
    except ValueError as exc:
        raise ConfigError(f"bad m list: {exc}") from None
    algorithms = tuple(fields.get("algorithms", "").split())
    bks_path = fields.get("bks")
    if bks_path is not None:
        bks_path = str((base / bks_path).resolve())
    output = str((base / fields.get("output", ".")).resolve())
    time_limit = float(fields["time_limit"]) if "time_limit" in fields else None
    return BenchConfig(
        entries=tuple(entries),
        m_values=m_values,
        algorithms=algorithms,
        repetitions=int(fields.get("repetitions", "1")),
        bks_path=bks_path,
        output=output,
        seed=seed,
        time_limit=time_limit,
    )


def load_bks_table(path):
    """Read a best-known-solution table: CSV ``dataset,m,bks_objective``."""
    table = {}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["dataset", "m", "bks_objective"]:
        raise ConfigError(f"{path}: expected header dataset,m,bks_objective")
    for row in rows[1:]:
        if not row:
            continue
        table[(row[0], int(row[1]))] = float(row[2])
    return table


@lru_cache(maxsize=8)
def _materialize(entry):
    """Load or generate a dataset entry: (Dataset, labels, truth centers)."""
    if entry.gmm is not None:
        ds, gt, params, _, _ = generate_accepted_gmm(entry.gmm)
        ds = replace(ds, name=entry.name)
        return ds, gt, params.means
    ds, gt = load_dataset(entry.path, "labeled" if entry.labeled else "plain")
    ds = replace(ds, name=entry.name)
    if entry.labels_path is not None:
        raw = np.loadtxt(entry.labels_path, dtype=np.int64, ndmin=1)
        gt = GroundTruth.from_raw(raw)
    truth_means = None
    if entry.means_path is not None:
        truth_means = load_mixture_params(entry.means_path).means
    elif gt is not None:
        truth_means, _ = decode_centers(ds, gt.labels, gt.m_true)
    return ds, gt, truth_means


@dataclass(frozen=True)
class Cell:
    entry: DatasetEntry
    m: int
    algorithm: str
    rep: int
    seed: int
    bks: float | None
    time_limit: float | None


def _execute_cell(cell):
    ds, gt, truth_means = _materialize(cell.entry)
    rng = np.random.default_rng(cell.seed)
    start = time.perf_counter()
    if cell.algorithm == "kmeans":
        result = hamerly_kmeans(ds, seed_random_samples(ds, cell.m, rng))
        centers, assign, objective = result.centers, result.assign, result.cost
    elif cell.algorithm == "kmeanspp":
        result = hamerly_kmeans(ds, seed_kmeanspp(ds, cell.m, rng))
        centers, assign, objective = result.centers, result.assign, result.cost
    else:
        if cell.algorithm == "hgmeans-fast":
            params = HgParams.fast(cell.m, seed=cell.seed)
        else:
            params = HgParams(m=cell.m, seed=cell.seed)
        best, _ = hgmeans_run(ds, params, time_limit=cell.time_limit)
        centers, assign, objective = best.centers, best.assign, best.cost
    wall = time.perf_counter() - start

    gap = gap_percent(objective, cell.bks) if cell.bks is not None else None
    cr = mi = ci = None
    if gt is not None:
        cr = crand(gt.labels, assign)
        mi = nmi(gt.labels, assign)
    if truth_means is not None:
        ci = centroid_index(centers, truth_means)
    return RunReport(
        dataset=ds.name,
        m=cell.m,
        algorithm=cell.algorithm,
        seed=cell.seed,
        objective=objective,
        gap_percent=gap,
        wall_seconds=wall,
        crand=cr,
        nmi=mi,
        ci=ci,
    )


def _safe_cell(cell):
    try:
        return _execute_cell(cell), None
    except Exception as exc:  # noqa: BLE001 - per-run isolation is the contract
        return None, f"{cell.entry.name} m={cell.m} {cell.algorithm} rep={cell.rep}: {exc}"


def _expand_cells(cfg, bks):
    cells = []
    for entry in cfg.entries:
        for m in cfg.m_values:
            for algo in cfg.algorithms:
                reps = cfg.repetitions if algo in BASELINES else 1
                for rep in range(reps):
                    idx = len(cells)
                    seed = int(
                        np.random.SeedSequence(cfg.seed, spawn_key=(idx,))
                        .generate_state(1)[0]
                    )
                    cells.append(
                        Cell(
                            entry=entry,
                            m=m,
                            algorithm=algo,
                            rep=rep,
                            seed=seed,
                            bks=bks.get((entry.name, m)),
                            time_limit=cfg.time_limit,
                        )
                    )
    return cells


def _best_of(group):
    best = min(group, key=lambda r: r.objective)
    return replace(
        best,
        algorithm=best.algorithm + "-best",
        wall_seconds=float(sum(r.wall_seconds for r in group)),
    )


def cmd_run(args):
    try:
        cfg = parse_config(args.config)
        if args.time_limit is not None:
            cfg = replace(cfg, time_limit=args.time_limit)
        bks = load_bks_table(cfg.bks_path) if cfg.bks_path else {}
        cells = _expand_cells(cfg, bks)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_safe_cell, cells, chunksize=1))
    else:
        outcomes = [_safe_cell(cell) for cell in cells]

    failures = 0
    reports = []
    group = []
    for cell, (report, error) in zip(cells, outcomes):
        if error is not None:
            failures += 1
            print(f"run failed: {error}", file=sys.stderr)
        else:
            reports.append(report)
        if cell.algorithm in BASELINES and cfg.repetitions > 1:
            if report is not None:
                group.append(report)
            if cell.rep == cfg.repetitions - 1:
                if group:
                    reports.append(_best_of(group))
                group = []

    out_dir = Path(cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "results.csv"
    write_reports(reports, out_path)
    print(f"wrote {len(reports)} reports to {out_path}")
    return 1 if failures else 0


def cmd_genmix(args):
    try:
        spec = GmmSpec(
            m=args.m,
            d=args.d,
            n=args.n,
            mean_range=tuple(args.mean_range),
            var_range=tuple(args.var_range),
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        ds, gt, params, report, attempts = generate_accepted_gmm(
            spec, max_attempts=args.max_attempts
        )
    except MixtureRejectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    data_path = prefix.with_name(prefix.name + ".txt")
    labels_path = prefix.with_name(prefix.name + ".labels.txt")
    params_path = prefix.with_name(prefix.name + ".params.csv")
    sep_path = prefix.with_name(prefix.name + ".separation.txt")
    save_dataset(ds, data_path)
    labels_path.write_text("".join(f"{v}\n" for v in gt.labels), encoding="utf-8")
    save_mixture_params(params, params_path)
    sep_path.write_text(
        f"is_1_separated {str(report.is_1_separated).lower()}\n"
        f"frac_half_separated {report.frac_half_separated!r}\n"
        f"attempts {attempts}\n",
        encoding="utf-8",
    )
    print(f"accepted mixture after {attempts} attempt(s); wrote {data_path}")
    return 0


def _sanitize(name):
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name) or "unnamed"


def cmd_plotdata(args):
    reports = []
    for path in args.csvs:
        try:
            reports.extend(read_reports(path))
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    if not reports:
        print("error: no report rows in input", file=sys.stderr)
        return 2

    groups = {}
    for report in reports:
        groups.setdefault((report.dataset, report.algorithm), []).append(report)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    fits = []
    for (dataset, algorithm), rows in sorted(groups.items()):
        by_m = {}
        for r in rows:
            by_m.setdefault(r.m, []).append(r)
        series = []
        for m in sorted(by_m):
            cell = by_m[m]
            med_time = float(np.median([r.wall_seconds for r in cell]))
            gaps = [r.gap_percent for r in cell if r.gap_percent is not None]
            mean_gap = repr(float(np.mean(gaps))) if gaps else ""
            series.append((m, med_time, mean_gap))
        name = f"{_sanitize(dataset)}__{_sanitize(algorithm)}.dat"
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            fh.write("# m median_wall_seconds mean_gap_percent\n")
            for m, med_time, mean_gap in series:
                fh.write(f"{m} {med_time!r} {mean_gap}\n")
        positive = [(m, t) for m, t, _ in series if t > 0]
        if len({m for m, _ in positive}) >= 2:
            logm = np.log([m for m, _ in positive])
            logt = np.log([t for _, t in positive])
            beta, log_alpha = np.polyfit(logm, logt, 1)
            fits.append((dataset, algorithm, float(np.exp(log_alpha)), float(beta),
                         len(positive)))

    with open(out_dir / "powerlaw_fits.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "algorithm", "alpha", "beta", "points"])
        for row in fits:
            writer.writerow([row[0], row[1], repr(row[2]), repr(row[3]), row[4]])
    print(f"wrote {len(groups)} series and {len(fits)} fits to {out_dir}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hgmeans",
        description="Minimum sum-of-squares clustering benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the benchmark grid from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--time-limit", type=float, default=None)
    p_run.set_defaults(func=cmd_run)

    p_gen = sub.add_parser("genmix", help="generate an accepted Gaussian mixture")
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--d", type=int, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True, help="output path prefix")
    p_gen.add_argument("--mean-range", type=float, nargs=2, default=(0.0, 5.0))
    p_gen.add_argument("--var-range", type=float, nargs=2, default=(1.0, 10.0))
    p_gen.add_argument("--max-attempts", type=int, default=10_000)
    p_gen.set_defaults(func=cmd_genmix)

    p_plot = sub.add_parser("plotdata", help="aggregate result CSVs for plotting")
    p_plot.add_argument("csvs", nargs="+")
    p_plot.add_argument("--out", default="plotdata")
    p_plot.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
