"""End-to-end single runs: extract clusterlets, match, evaluate."""

from __future__ import annotations

from .data import Dataset, partition_by_color
from .extraction import ExtractionConfig, extract_clusterlets
from .matchers import MatchConfig, build_graph, match
from .metrics import (
    Clustering,
    clustering_balance,
    coverage,
    mean_max_deviation,
    overlap_degree,
    relative_cohesion,
    silhouette,
)


def run_pipeline(ds: Dataset, extraction_cfg: ExtractionConfig, match_cfg: MatchConfig):
    """Extract per-color clusterlets and match them into a clustering."""
    part = partition_by_color(ds)
    clusterlets = extract_clusterlets(ds, part, extraction_cfg)
    graph = build_graph(clusterlets, n_colors=ds.n_colors)
    return clusterlets, match(graph, ds, match_cfg)


def evaluate_clustering(
    ds: Dataset, clustering: Clustering, matcher: str, seed: int = 0
) -> dict:
    """Metric dict for a clustering, with the field names used on disk.

    Silhouette is only defined for the crisp centroid matcher and is None
    otherwise; fuzzy pinball results are characterized by cohesion and
    overlap instead.
    """
    stats = mean_max_deviation(clustering, ds)
    metrics = {
        "deviation_mean": stats.mean,
        "deviation_std": stats.std,
        "deviation_min": stats.min,
        "deviation_max": stats.max,
        "balance": clustering_balance(clustering),
        "cohesion": relative_cohesion(ds, clustering, seed=seed),
        "overlap": overlap_degree(clustering, ds.n_instances),
        "coverage": coverage(clustering, ds.n_instances),
        "silhouette": None,
        "n_clusters": clustering.n_clusters,
    }
    if matcher == "centroid" and clustering.n_clusters >= 2:
        metrics["silhouette"] = silhouette(ds, clustering.labels())
    return metrics
