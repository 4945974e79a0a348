"""scikit-learn style estimator wrapping the full pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils import check_array

from .data import Dataset, standardize
from .errors import ValidationError
from .extraction import ExtractionConfig
from .matchers import MatchConfig
from .pipeline import evaluate_clustering, run_pipeline


class ClusterletClustering(ClusterMixin, BaseEstimator):
    """Fair clustering by matching per-color k-means clusterlets.

    Fits like a clusterer but requires the protected attribute: pass the
    per-instance color labels as `y`. Pinball matchers may produce fuzzy
    clusterings, exposed through `membership_`; `labels_` assigns each
    instance its lowest containing cluster (-1 when uncovered).

    Parameters
    ----------
    matcher : str
        One of "d-pb", "g-d-pb", "b-pb", "g-b-pb", "centroid".
    k_per_color : int
        Clusterlets extracted per color (clamped to the color population).
    hops : int
        Pinball traversals of the color sequence (pinball matchers only).
    omega : float
        Silhouette weight of the centroid matcher objective, in [0, 1].
    sample_size : int
        Partition-sampling budget of the centroid matcher.
    scale : bool
        Z-score features before clustering.
    random_state : int
        Seed for extraction and matching.

    Examples
    --------
    >>> model = ClusterletClustering(matcher="g-b-pb", k_per_color=4)
    >>> labels = model.fit_predict(X, colors)
    """

    def __init__(
        self,
        matcher="g-b-pb",
        k_per_color=5,
        hops=1,
        omega=0.5,
        sample_size=10_000,
        max_iterations=300,
        tolerance=1e-6,
        scale=True,
        silhouette_mode="centroid",
        objective="affine",
        random_state=0,
    ):
        self.matcher = matcher
        self.k_per_color = k_per_color
        self.hops = hops
        self.omega = omega
        self.sample_size = sample_size
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.scale = scale
        self.silhouette_mode = silhouette_mode
        self.objective = objective
        self.random_state = random_state

    def fit(self, X, y=None):
        """Cluster X fairly with respect to the color labels y."""
        if y is None:
            raise ValidationError(
                "color labels are required: call fit(X, colors) with one "
                "color per instance"
            )
        X = check_array(X, dtype=float)
        y = np.asarray(y)
        if y.shape[0] != X.shape[0]:
            raise ValidationError("X and colors must have the same length")
        names = list(dict.fromkeys(y.tolist()))
        ids = {name: i for i, name in enumerate(names)}
        ds = Dataset(
            features=X,
            colors=np.array([ids[v] for v in y.tolist()]),
            color_names=tuple(str(n) for n in names),
        )
        if self.scale:
            ds = standardize(ds)
        extraction_cfg = ExtractionConfig(
            k_per_color=self.k_per_color,
            max_iterations=self.max_iterations,
            tolerance=self.tolerance,
            seed=self.random_state,
        )
        match_cfg = MatchConfig(
            matcher=self.matcher,
            hops=self.hops,
            omega=self.omega,
            sample_size=self.sample_size,
            seed=self.random_state,
            silhouette_mode=self.silhouette_mode,
            objective=self.objective,
        )
        self.dataset_ = ds
        self.clusterlets_, self.clustering_ = run_pipeline(ds, extraction_cfg, match_cfg)
        self.n_clusters_ = self.clustering_.n_clusters
        membership = np.zeros((ds.n_instances, self.n_clusters_), dtype=bool)
        for j, cluster in enumerate(self.clustering_.clusters):
            membership[cluster.member_set, j] = True
        self.membership_ = membership
        labels = np.full(ds.n_instances, -1)
        for j in range(self.n_clusters_ - 1, -1, -1):
            labels[membership[:, j]] = j
        self.labels_ = labels
        return self

    def fit_predict(self, X, y=None):
        """Fit and return `labels_` (lowest containing cluster per instance)."""
        return self.fit(X, y).labels_

    def evaluate(self) -> dict:
        """Fairness and quality metrics of the fitted clustering."""
        if not hasattr(self, "clustering_"):
            raise ValidationError("call fit before evaluate")
        cfg = self.clustering_.source
        return evaluate_clustering(
            self.dataset_, self.clustering_, cfg["matcher"], seed=cfg["seed"]
        )
