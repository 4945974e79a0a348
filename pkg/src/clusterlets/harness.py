"""Reproducible grid search over matchers, hyperparameters, and seeds.

Grid cells are independent and derive all randomness from their own seed,
so results do not depend on scheduling. Records stream to disk in
canonical cell order as JSON lines; a flattened CSV can be derived for
the stats tooling.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .data import Dataset
from .errors import ConfigError, EmptySelectionError, ValidationError
from .extraction import ExtractionConfig
from .matchers import MATCHERS, PINBALL_MATCHERS, MatchConfig
from .pipeline import evaluate_clustering, run_pipeline

SCHEMA_VERSION = 1

METRIC_FIELDS = (
    "deviation_mean",
    "deviation_std",
    "deviation_min",
    "deviation_max",
    "balance",
    "cohesion",
    "overlap",
    "coverage",
    "silhouette",
    "n_clusters",
)

CONFIG_FIELDS = (
    "matcher",
    "k",
    "hops",
    "omega",
    "sample_size",
    "seed",
    "standardize",
    "silhouette_mode",
    "objective",
)


@dataclass(frozen=True)
class GridSpec:
    """Search space of a grid run; defaults match the reference experiments.

    Axes that do not apply to a matcher are collapsed, not multiplied:
    omega and sample_size only reach the centroid matcher, hops only the
    pinball matchers.
    """

    matchers: tuple = MATCHERS
    k_values: tuple = (2, 5, 10, 20, 30)
    hops_values: tuple = (1, 2, 3, 4)
    omega_values: tuple = (0.0, 0.25, 0.5, 0.75)
    sample_size: int = 250_000
    seeds: tuple = tuple(range(10))
    standardize: bool = True
    silhouette_mode: str = "centroid"
    objective: str = "affine"

    def __post_init__(self):
        for name in ("matchers", "k_values", "hops_values", "omega_values", "seeds"):
            values = getattr(self, name)
            if not values:
                raise ConfigError(f"grid axis {name} must be non-empty")
            object.__setattr__(self, name, tuple(values))
        unknown = [m for m in self.matchers if m not in MATCHERS]
        if unknown:
            raise ConfigError(f"unknown matchers {unknown}; valid names: {list(MATCHERS)}")

    @classmethod
    def from_file(cls, path) -> "GridSpec":
        """Load a grid from TOML or JSON (auto-detected by extension)."""
        text = open(path, "rb").read()
        if str(path).endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:  # Python 3.10
                import tomli as tomllib

            raw = tomllib.loads(text.decode("utf-8"))
        else:
            raw = json.loads(text.decode("utf-8"))
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown grid keys {sorted(unknown)}")
        return cls(**raw)

    def cells(self, dataset: str) -> list:
        """Canonically ordered run configs with inapplicable axes collapsed."""
        configs = []
        for matcher in self.matchers:
            if matcher in PINBALL_MATCHERS:
                for k in self.k_values:
                    for hops in self.hops_values:
                        for seed in self.seeds:
                            configs.append(
                                self._config(matcher, k, hops=hops, seed=seed)
                            )
            else:
                for k in self.k_values:
                    for omega in self.omega_values:
                        for seed in self.seeds:
                            configs.append(
                                self._config(matcher, k, omega=omega, seed=seed)
                            )
        return [dict(c, dataset=dataset) for c in configs]

    def _config(self, matcher, k, hops=None, omega=None, seed=0) -> dict:
        return {
            "matcher": matcher,
            "k": k,
            "hops": hops,
            "omega": omega,
            "sample_size": self.sample_size if matcher == "centroid" else None,
            "seed": seed,
            "standardize": self.standardize,
            "silhouette_mode": self.silhouette_mode,
            "objective": self.objective,
        }


@dataclass
class RunRecord:
    """One grid cell: configuration, metric results, and provenance."""

    dataset: str
    config: dict
    metrics: dict
    wall_time: float = 0.0
    schema_version: int = SCHEMA_VERSION
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "config": dict(self.config),
            "metrics": dict(self.metrics),
            "wall_time": self.wall_time,
            "schema_version": self.schema_version,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RunRecord":
        return cls(
            dataset=raw["dataset"],
            config=dict(raw["config"]),
            metrics=dict(raw["metrics"]),
            wall_time=raw.get("wall_time", 0.0),
            schema_version=raw.get("schema_version", SCHEMA_VERSION),
            error=raw.get("error"),
        )

    def config_key(self) -> str:
        return json.dumps(self.config, sort_keys=True)


def run_single(ds: Dataset, config: dict) -> RunRecord:
    """Execute one configuration; failures become records, not exceptions."""
    started = time.perf_counter()
    dataset = config.get("dataset", "dataset")
    cell = {k: config.get(k) for k in CONFIG_FIELDS}
    try:
        extraction_cfg = ExtractionConfig(k_per_color=cell["k"], seed=cell["seed"])
        match_cfg = MatchConfig(
            matcher=cell["matcher"],
            hops=cell["hops"] if cell["hops"] is not None else 1,
            omega=cell["omega"] if cell["omega"] is not None else 0.0,
            sample_size=cell["sample_size"] if cell["sample_size"] is not None else 1,
            seed=cell["seed"],
            silhouette_mode=cell["silhouette_mode"] or "centroid",
            objective=cell["objective"] or "affine",
        )
        _, clustering = run_pipeline(ds, extraction_cfg, match_cfg)
        metrics = evaluate_clustering(ds, clustering, cell["matcher"], seed=cell["seed"])
        return RunRecord(
            dataset=dataset,
            config=cell,
            metrics=metrics,
            wall_time=time.perf_counter() - started,
        )
    except Exception as exc:  # a failed cell must never abort the grid
        return RunRecord(
            dataset=dataset,
            config=cell,
            metrics={},
            wall_time=time.perf_counter() - started,
            error=f"{type(exc).__name__}: {exc}",
        )


def resolve_workers(requested: int | None = None) -> int:
    """Requested worker count clamped by the CLUSTERLETS_WORKERS env var."""
    bound = os.environ.get("CLUSTERLETS_WORKERS")
    bound = int(bound) if bound else None
    workers = requested if requested is not None else (bound or 1)
    if bound is not None:
        workers = min(workers, bound)
    return max(1, workers)


def _run_cell(args):
    ds, config = args
    return run_single(ds, config)


def run_grid(
    ds: Dataset,
    grid: GridSpec,
    dataset_name: str = "dataset",
    workers: int | None = None,
    out_path=None,
) -> list:
    """Run every grid cell; stream records to `out_path` as they finish.

    Records are produced (and written) in canonical cell order regardless
    of the worker count, so reruns are reproducible byte for byte in their
    metric values.
    """
    cells = grid.cells(dataset_name)
    workers = resolve_workers(workers)
    sink = open(out_path, "w", encoding="utf-8") if out_path else None
    records = []
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                iterator = pool.map(_run_cell, [(ds, c) for c in cells])
                for record in iterator:
                    records.append(record)
                    if sink:
                        sink.write(json.dumps(record.to_dict()) + "\n")
                        sink.flush()
        else:
            for config in cells:
                record = run_single(ds, config)
                records.append(record)
                if sink:
                    sink.write(json.dumps(record.to_dict()) + "\n")
                    sink.flush()
    finally:
        if sink:
            sink.close()
    return records


def read_records(path) -> list:
    """Read RunRecords back from a JSON-lines file."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(RunRecord.from_dict(json.loads(line)))
    return records


def write_records_csv(records, path) -> None:
    """Flatten records into one CSV row per run for the stats tooling."""
    header = ["dataset", *CONFIG_FIELDS, *METRIC_FIELDS, "wall_time", "error"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in records:
            row = [r.dataset]
            row += [r.config.get(k) for k in CONFIG_FIELDS]
            row += [r.metrics.get(k) for k in METRIC_FIELDS]
            row += [r.wall_time, r.error]
            writer.writerow(["" if v is None else v for v in row])


_CSV_INT_FIELDS = {"k", "hops", "seed", "sample_size", "n_clusters"}
_CSV_STR_FIELDS = {"matcher", "silhouette_mode", "objective"}


def _csv_value(name: str, text: str):
    if text == "":
        return None
    if name in _CSV_STR_FIELDS:
        return text
    if name == "standardize":
        return text == "True"
    if name in _CSV_INT_FIELDS:
        return int(text)
    return float(text)


def read_records_csv(path) -> list:
    """Read RunRecords back from the flattened CSV layout."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            config = {k: _csv_value(k, row[k]) for k in CONFIG_FIELDS}
            metrics = {k: _csv_value(k, row[k]) for k in METRIC_FIELDS}
            records.append(RunRecord(
                dataset=row["dataset"],
                config=config,
                metrics=metrics,
                wall_time=float(row["wall_time"] or 0.0),
                error=row["error"] or None,
            ))
    return records


@dataclass(frozen=True)
class LimitCaseFilters:
    """Limit-case rules: drop tiny clusterings and heavily fuzzy ones."""

    small_cluster_count: int = 2  # drop records with n_clusters <= this
    high_overlap: float = 0.5  # drop records with overlap >= this


def select_best(records, criterion: str = "mean_deviation", filters=LimitCaseFilters()):
    """Pick the best surviving record per dataset.

    Filters out failed runs, clusterings with at most
    `filters.small_cluster_count` clusters, and overlap degree of at least
    `filters.high_overlap`. Survivors are ordered by the criterion
    (argmin mean deviation or argmax cohesion), with ties broken by higher
    cohesion, then lower max deviation, then the lexicographically
    smallest canonical config.
    """
    if criterion not in ("mean_deviation", "cohesion"):
        raise ConfigError(f"unknown criterion {criterion!r}")
    if not records:
        raise ValidationError("no records to select from")
    dropped = {"error": 0, "small_cluster_count": 0, "high_overlap": 0}
    survivors = []
    for r in records:
        if r.error is not None:
            dropped["error"] += 1
        elif r.metrics["n_clusters"] <= filters.small_cluster_count:
            dropped["small_cluster_count"] += 1
        elif r.metrics["overlap"] >= filters.high_overlap:
            dropped["high_overlap"] += 1
        else:
            survivors.append(r)
    if not survivors:
        culprits = {k: v for k, v in dropped.items() if v}
        raise EmptySelectionError(
            f"all {len(records)} records were filtered out: {culprits}", culprits
        )

    def key(r: RunRecord):
        primary = (
            r.metrics["deviation_mean"]
            if criterion == "mean_deviation"
            else -r.metrics["cohesion"]
        )
        return (primary, -r.metrics["cohesion"], r.metrics["deviation_max"], r.config_key())

    best = {}
    for r in sorted(survivors, key=key):
        best.setdefault(r.dataset, r)
    return best
