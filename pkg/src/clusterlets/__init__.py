"""Fair clustering by matching per-color k-means clusterlets."""

from .data import ColorPartition, Dataset, load_csv, partition_by_color, standardize
from .errors import (
    ClusterletsError,
    ConfigError,
    DomainError,
    EmptySelectionError,
    ParseError,
    ValidationError,
)
from .estimator import ClusterletClustering
from .extraction import Clusterlet, ExtractionConfig, extract_clusterlets, kmeans
from .harness import GridSpec, LimitCaseFilters, RunRecord, run_grid, select_best
from .matchers import (
    MATCHERS,
    PINBALL_MATCHERS,
    ClusterletGraph,
    MatchConfig,
    build_graph,
    centroid_match,
    match,
    pinball_match,
    pinball_measure,
)
from .metrics import (
    Cluster,
    Clustering,
    balance,
    clustering_balance,
    coverage,
    deviation,
    mean_max_deviation,
    overlap_degree,
    relative_cohesion,
    silhouette,
)
from .pipeline import evaluate_clustering, run_pipeline
from .stats import RankTable, correlations, rank_methods
from .synth import make_colored_blobs, write_csv

__version__ = "0.1.0"

__all__ = [
    "ClusterletClustering",
    "Clusterlet",
    "ClusterletGraph",
    "ClusterletsError",
    "Cluster",
    "Clustering",
    "ColorPartition",
    "ConfigError",
    "Dataset",
    "DomainError",
    "EmptySelectionError",
    "ExtractionConfig",
    "GridSpec",
    "LimitCaseFilters",
    "MATCHERS",
    "MatchConfig",
    "PINBALL_MATCHERS",
    "ParseError",
    "RankTable",
    "RunRecord",
    "ValidationError",
    "balance",
    "build_graph",
    "centroid_match",
    "clustering_balance",
    "correlations",
    "coverage",
    "deviation",
    "evaluate_clustering",
    "extract_clusterlets",
    "kmeans",
    "load_csv",
    "make_colored_blobs",
    "match",
    "mean_max_deviation",
    "overlap_degree",
    "partition_by_color",
    "pinball_match",
    "pinball_measure",
    "rank_methods",
    "relative_cohesion",
    "run_grid",
    "run_pipeline",
    "select_best",
    "silhouette",
    "standardize",
    "write_csv",
]
