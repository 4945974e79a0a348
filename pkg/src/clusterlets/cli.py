"""Command-line entry point: cluster, grid, eval, stats, synth."""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness, stats as stats_mod, synth
from .data import Dataset, load_csv, standardize
from .errors import ClusterletsError, ConfigError, ParseError, ValidationError
from .extraction import ExtractionConfig
from .matchers import MATCHERS, MatchConfig, PINBALL_MATCHERS
from .metrics import Cluster, Clustering
from .pipeline import evaluate_clustering, run_pipeline

PROFILE_SAMPLE_SIZE = {"test": 10_000, "paper": 250_000}


def _data_flags(parser):
    parser.add_argument("--data", required=True, help="input CSV path")
    parser.add_argument("--color-col", required=True, help="protected-attribute column")
    parser.add_argument("--features", help="comma-separated feature columns (default: all others)")
    parser.add_argument("--no-standardize", action="store_true", help="skip z-scoring")
    parser.add_argument("--color-order", help="comma-separated color labels fixing the color order")


def _common_flags(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--profile", choices=("test", "paper"), default="test",
                        help="default sampling budget profile")


def _load_dataset(args):
    features = args.features.split(",") if args.features else None
    order = args.color_order.split(",") if args.color_order else None
    ds = load_csv(args.data, args.color_col, feature_columns=features, color_order=order)
    if not args.no_standardize:
        ds = standardize(ds)
    return ds


def _fingerprint(ds: Dataset, color_col: str) -> dict:
    payload = json.dumps([list(ds.feature_names), color_col]).encode()
    return {
        "n_rows": ds.n_instances,
        "column_hash": hashlib.sha256(payload).hexdigest()[:16],
    }


def _sanitize(obj):
    """Make a structure strict-JSON safe (NaN -> null, numpy -> python)."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return None if math.isnan(value) else value
    return obj


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_sanitize(payload), fh, indent=2, allow_nan=False)
        fh.write("\n")


def cmd_cluster(args) -> int:
    ds = _load_dataset(args)
    samples = args.samples or PROFILE_SAMPLE_SIZE[args.profile]
    extraction_cfg = ExtractionConfig(k_per_color=args.k, seed=args.seed)
    match_cfg = MatchConfig(
        matcher=args.matcher,
        hops=args.hops,
        omega=args.omega,
        sample_size=samples,
        seed=args.seed,
        silhouette_mode=args.silhouette_mode,
        objective=args.objective,
    )
    clusterlets, clustering = run_pipeline(ds, extraction_cfg, match_cfg)
    config = {
        "matcher": match_cfg.matcher,
        "k": args.k,
        "hops": args.hops if match_cfg.matcher in PINBALL_MATCHERS else None,
        "omega": args.omega if match_cfg.matcher == "centroid" else None,
        "sample_size": samples if match_cfg.matcher == "centroid" else None,
        "seed": args.seed,
        "standardize": not args.no_standardize,
        "silhouette_mode": args.silhouette_mode,
        "objective": args.objective,
        "color_col": args.color_col,
    }
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "clustering.json", {
        "schema_version": harness.SCHEMA_VERSION,
        "config": config,
        "dataset_fingerprint": _fingerprint(ds, args.color_col),
        "clusterlets": [
            {"id": c.id, "color": ds.color_names[c.color], "members": c.members.tolist()}
            for c in clusterlets
        ],
        "clusters": [
            {
                "id": j,
                "clusterlet_ids": list(c.clusterlet_ids),
                "members": c.member_set.tolist(),
                "color_histogram": {
                    ds.color_names[k]: int(n) for k, n in enumerate(c.color_histogram)
                },
            }
            for j, c in enumerate(clustering.clusters)
        ],
    })
    metrics = evaluate_clustering(ds, clustering, match_cfg.matcher, seed=args.seed)
    _write_json(out / "metrics.json", metrics)
    print(f"wrote {out / 'clustering.json'} ({clustering.n_clusters} clusters)")
    return 0


def cmd_eval(args) -> int:
    with open(args.clustering, encoding="utf-8") as fh:
        stored = json.load(fh)
    config = stored["config"]
    features = args.features.split(",") if args.features else None
    ds = load_csv(args.data, args.color_col, feature_columns=features)
    if config.get("standardize", True):
        ds = standardize(ds)
    fingerprint = _fingerprint(ds, args.color_col)
    if fingerprint != stored["dataset_fingerprint"]:
        raise ValidationError(
            f"dataset does not match the clustering file: {fingerprint} "
            f"vs stored {stored['dataset_fingerprint']}"
        )
    name_to_id = {name: i for i, name in enumerate(ds.color_names)}
    clusters = []
    for raw in stored["clusters"]:
        hist = np.zeros(ds.n_colors, dtype=int)
        for name, count in raw["color_histogram"].items():
            hist[name_to_id[name]] = count
        clusters.append(Cluster(
            clusterlet_ids=tuple(raw["clusterlet_ids"]),
            member_set=np.array(raw["members"], dtype=int),
            color_histogram=hist,
        ))
    clustering = Clustering(
        clusters=tuple(clusters), n_instances=ds.n_instances, source=dict(config)
    )
    metrics = evaluate_clustering(ds, clustering, config["matcher"], seed=config["seed"])
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "metrics.json", metrics)
    print(f"wrote {out / 'metrics.json'}")
    return 0


def cmd_grid(args) -> int:
    if args.grid_config:
        grid = harness.GridSpec.from_file(args.grid_config)
    else:
        grid = harness.GridSpec(sample_size=PROFILE_SAMPLE_SIZE[args.profile])
    # the flag can only disable scaling; the grid file's choice stands otherwise
    scale = grid.standardize and not args.no_standardize
    grid = dataclasses.replace(grid, standardize=scale)
    features = args.features.split(",") if args.features else None
    order = args.color_order.split(",") if args.color_order else None
    ds = load_csv(args.data, args.color_col, feature_columns=features, color_order=order)
    if scale:
        ds = standardize(ds)
    name = args.name or Path(args.data).stem
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = harness.run_grid(
        ds, grid, dataset_name=name, workers=args.workers,
        out_path=out / "results.jsonl",
    )
    harness.write_records_csv(records, out / "results.csv")
    failed = sum(1 for r in records if r.error)
    print(f"wrote {len(records)} records to {out / 'results.jsonl'} ({failed} failed)")
    return 0


def _read_results(path):
    if str(path).endswith(".csv"):
        return harness.read_records_csv(path)
    return harness.read_records(path)


def cmd_stats(args) -> int:
    records = _read_results(args.results)
    if args.matcher:
        records = [r for r in records if r.config.get("matcher") == args.matcher]
    if args.dataset:
        records = [r for r in records if r.dataset == args.dataset]
    records = [r for r in records if not r.error]
    if not records:
        raise ValidationError("no usable records after filtering")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    variables = ("omega", "silhouette", "cohesion", "deviation_mean")
    pairs = {}
    for i, x in enumerate(variables):
        for y in variables[i + 1:]:
            xs, ys = [], []
            for r in records:
                vx = r.config.get(x) if x == "omega" else r.metrics.get(x)
                vy = r.config.get(y) if y == "omega" else r.metrics.get(y)
                if vx is not None and vy is not None:
                    xs.append(vx)
                    ys.append(vy)
            if len(xs) >= 3:
                c = stats_mod.correlations(xs, ys)
                pairs[f"{x}~{y}"] = {
                    "pearson": c.pearson, "spearman": c.spearman,
                    "kendall": c.kendall, "n": len(xs),
                }
            else:
                pairs[f"{x}~{y}"] = None
    _write_json(out / "correlations.json", {"pairs": pairs})

    by_dataset = {}
    for r in records:
        value = r.metrics.get(args.rank_metric)
        if value is None:
            continue
        scores = by_dataset.setdefault(r.dataset, {})
        scores.setdefault(r.config["matcher"], []).append(value)
    table = None
    if len(by_dataset) >= 2:
        results = {
            dataset: {m: float(np.mean(vals)) for m, vals in scores.items()}
            for dataset, scores in by_dataset.items()
        }
        table = stats_mod.rank_methods(results, higher_is_better=args.higher_is_better)
        _write_json(out / "ranks.json", table.to_dict())
        if not args.no_svg:
            stats_mod.plot_critical_difference(table, out / "ranks.svg")
    print(f"wrote correlations.json{' and ranks.json' if table else ''} to {out}")
    return 0


def cmd_synth(args) -> int:
    if args.proportions:
        proportions = [
            [float(v) for v in group.split(",")]
            for group in args.proportions.split(";")
        ]
        if len(proportions) == 1:
            proportions = proportions[0]
        n_colors = len(proportions[0]) if isinstance(proportions[0], list) else len(proportions)
    else:
        proportions = None
        n_colors = args.colors
    ds = synth.make_colored_blobs(
        n_blobs=args.blobs,
        n_per_blob=args.per_blob,
        n_colors=n_colors,
        proportions=proportions,
        separation=args.separation,
        n_features=args.dims,
        seed=args.seed,
    )
    synth.write_csv(ds, args.out)
    print(f"wrote {ds.n_instances} rows, {ds.n_colors} colors to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterlets",
        description="Fair clustering by matching per-color k-means clusterlets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="run one extract-and-match configuration")
    _data_flags(p)
    _common_flags(p)
    p.add_argument("--matcher", required=True, choices=MATCHERS + ("g-b",))
    p.add_argument("--k", type=int, default=5, help="clusterlets per color")
    p.add_argument("--hops", type=int, default=1)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--samples", type=int, help="centroid matcher sampling budget")
    p.add_argument("--silhouette-mode", choices=("centroid", "instance"), default="centroid")
    p.add_argument("--objective", choices=("affine", "raw"), default="affine")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("grid", help="grid search over matchers and hyperparameters")
    _data_flags(p)
    _common_flags(p)
    p.add_argument("--grid-config", help="TOML or JSON grid specification")
    p.add_argument("--workers", type=int, help="parallel workers (bounded by CLUSTERLETS_WORKERS)")
    p.add_argument("--name", help="dataset name in the records (default: file stem)")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("eval", help="recompute metrics for a stored clustering")
    p.add_argument("--data", required=True)
    p.add_argument("--color-col", required=True)
    p.add_argument("--features")
    p.add_argument("--clustering", required=True, help="clustering.json to evaluate")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="correlations and matcher ranks from results")
    p.add_argument("--results", required=True, help="results.jsonl or results.csv")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--matcher", help="only analyze records of this matcher")
    p.add_argument("--dataset", help="only analyze records of this dataset")
    p.add_argument("--rank-metric", default="deviation_mean")
    p.add_argument("--higher-is-better", action="store_true")
    p.add_argument("--no-svg", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="generate a synthetic colored-blob CSV")
    p.add_argument("--blobs", type=int, default=4)
    p.add_argument("--per-blob", type=int, default=100)
    p.add_argument("--colors", type=int, default=2)
    p.add_argument("--proportions",
                   help="per-color proportions, e.g. '0.5,0.5' or per blob '0.9,0.1;0.1,0.9'")
    p.add_argument("--separation", type=float, default=8.0)
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ClusterletsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
