"""Fairness and quality measures for (possibly fuzzy) clusterings.

Conventions:

* `balance` of a color histogram is the minimum pairwise count ratio:
  1 for equal counts, 0 as soon as one color is absent.
* `deviation` compares two color histograms on *relative frequencies*:
  the maximum over colors of |p_a - p_b| / max(p_a, p_b), with 0/0 = 0.
  It is symmetric, lies in [0, 1], and is 0 iff the frequency vectors
  coincide.
* `relative_cohesion` is 1 minus the mean, over clusters, of the ratio
  between a cluster's mean pairwise distance and the dataset's maximum
  pairwise distance; higher means more compact clusters.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .data import Dataset
from .errors import DomainError, ValidationError

# Pairwise-distance computations switch to a seeded subsample above this
# member count to keep them O(1) in dataset size.
PAIRWISE_SAMPLE_CAP = 2000


@dataclass(frozen=True)
class Cluster:
    """A set of clusterlets plus the deduplicated union of their members."""

    clusterlet_ids: tuple
    member_set: np.ndarray
    color_histogram: np.ndarray

    def __post_init__(self):
        members = np.unique(np.asarray(self.member_set, dtype=int))
        hist = np.asarray(self.color_histogram, dtype=int)
        if not self.clusterlet_ids:
            raise ValidationError("a cluster needs at least one clusterlet")
        if hist.sum() != members.size:
            raise ValidationError("color histogram does not sum to the member count")
        members.setflags(write=False)
        hist.setflags(write=False)
        object.__setattr__(self, "clusterlet_ids", tuple(self.clusterlet_ids))
        object.__setattr__(self, "member_set", members)
        object.__setattr__(self, "color_histogram", hist)

    @classmethod
    def from_clusterlets(cls, clusterlet_ids, clusterlets, n_colors: int) -> "Cluster":
        """Build a cluster from clusterlet ids, deduplicating shared members."""
        ids = tuple(clusterlet_ids)
        members = np.unique(np.concatenate([clusterlets[i].members for i in ids]))
        hist = np.zeros(n_colors, dtype=int)
        for i in set(ids):
            c = clusterlets[i]
            hist[c.color] += c.size
        return cls(clusterlet_ids=ids, member_set=members, color_histogram=hist)

    @property
    def size(self) -> int:
        return int(self.member_set.size)


@dataclass(frozen=True)
class Clustering:
    """A list of clusters with the induced instance -> clusters membership.

    Clusters may share instances (fuzzy membership); `membership_counts[i]`
    is the number of clusters containing instance i.
    """

    clusters: tuple
    n_instances: int
    source: dict = field(default_factory=dict)
    trace: tuple = ()
    membership_counts: np.ndarray = field(init=False)

    def __post_init__(self):
        if not self.clusters:
            raise ValidationError("a clustering needs at least one cluster")
        counts = np.zeros(self.n_instances, dtype=int)
        for cluster in self.clusters:
            if cluster.member_set.size and cluster.member_set.max() >= self.n_instances:
                raise ValidationError("cluster members reference unknown instances")
            counts[cluster.member_set] += 1
        counts.setflags(write=False)
        object.__setattr__(self, "clusters", tuple(self.clusters))
        object.__setattr__(self, "membership_counts", counts)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def membership(self, instance: int) -> tuple:
        """Indices of the clusters containing `instance`."""
        return tuple(
            j for j, c in enumerate(self.clusters) if instance in set(c.member_set)
        )

    def labels(self) -> np.ndarray:
        """Crisp per-instance labels; requires a partition of all instances."""
        if (self.membership_counts != 1).any():
            raise DomainError("labels are only defined for crisp, covering clusterings")
        labels = np.empty(self.n_instances, dtype=int)
        for j, cluster in enumerate(self.clusters):
            labels[cluster.member_set] = j
        return labels


def balance(color_histogram) -> float:
    """Minimum pairwise count ratio of a color histogram, in [0, 1]."""
    counts = np.asarray(color_histogram, dtype=float)
    if counts.size == 0 or (counts < 0).any():
        raise DomainError("balance needs a non-negative histogram")
    if counts.sum() == 0:
        raise DomainError("balance is undefined for an all-zero histogram")
    if (counts == 0).any():
        return 0.0
    return float(counts.min() / counts.max())


def clustering_balance(clustering: Clustering) -> float:
    """Balance of a clustering: the minimum balance over its clusters."""
    return min(balance(c.color_histogram) for c in clustering.clusters)


def deviation_profile(histograms, reference) -> np.ndarray:
    """Deviation of each histogram row against a reference histogram."""
    hists = np.atleast_2d(np.asarray(histograms, dtype=float))
    ref = np.asarray(reference, dtype=float)
    totals = hists.sum(axis=1, keepdims=True)
    ref_total = ref.sum()
    if (totals == 0).any() or ref_total == 0:
        raise DomainError("deviation is undefined for zero-total histograms")
    pa = hists / totals
    pb = ref / ref_total
    den = np.maximum(pa, pb)
    with np.errstate(invalid="ignore"):
        ratio = np.where(den > 0, np.abs(pa - pb) / den, 0.0)
    return ratio.max(axis=1)


def deviation(a, b) -> float:
    """Relative-frequency deviation between two color histograms, in [0, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError("histograms must cover the same color set")
    return float(deviation_profile(a[None, :], b)[0])


DeviationStats = namedtuple("DeviationStats", ["mean", "std", "min", "max"])


def mean_max_deviation(clustering: Clustering, ds: Dataset) -> DeviationStats:
    """Moments of per-cluster deviation against the dataset's color histogram.

    `std` is the population standard deviation.
    """
    hists = np.array([c.color_histogram for c in clustering.clusters])
    devs = deviation_profile(hists, ds.color_counts)
    return DeviationStats(
        mean=float(devs.mean()),
        std=float(devs.std()),
        min=float(devs.min()),
        max=float(devs.max()),
    )


def silhouette_from_distances(distances, labels, weights=None) -> float:
    """Mean silhouette of points given a full pairwise distance matrix.

    `weights` are point masses: the intra-cluster distance a(i) is the
    mass-weighted mean distance to the *other* points of i's cluster
    (a point carries no self-mass, so a cluster holding only i makes i a
    singleton contributing 0), b(i) the smallest mass-weighted mean
    distance to another cluster, and the result the mass-weighted mean of
    (b - a) / max(a, b) with the a = b = 0 convention of 0. Unit weights
    give the standard silhouette.
    """
    D = np.asarray(distances, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = D.shape[0]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    uniq, dense = np.unique(labels, return_inverse=True)
    m = uniq.size
    if m < 2:
        raise DomainError("silhouette needs at least 2 clusters")
    onehot = np.zeros((n, m))
    onehot[np.arange(n), dense] = 1.0
    cluster_weight = w @ onehot
    weighted_sums = D @ (onehot * w[:, None])

    rows = np.arange(n)
    sibling_weight = cluster_weight[dense] - w  # D[i, i] = 0 drops i itself
    valid = sibling_weight > 0
    a = np.zeros(n)
    a[valid] = weighted_sums[rows, dense][valid] / sibling_weight[valid]
    mean_to_cluster = weighted_sums / cluster_weight[None, :]
    mean_to_cluster[rows, dense] = np.inf
    b = mean_to_cluster.min(axis=1)

    s = np.zeros(n)
    denom = np.maximum(a, b)
    nonzero = valid & (denom > 0)
    s[nonzero] = (b[nonzero] - a[nonzero]) / denom[nonzero]
    return float((w * s).sum() / w.sum())


def silhouette(ds: Dataset, labels) -> float:
    """Instance-level silhouette of a crisp clustering, Euclidean distance."""
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (ds.n_instances,):
        raise ValidationError("labels must assign every instance exactly one cluster")
    D = squareform(pdist(ds.features))
    return silhouette_from_distances(D, labels)


def _mean_pairwise(points: np.ndarray, rng) -> float:
    if points.shape[0] < 2:
        return 0.0
    if points.shape[0] > PAIRWISE_SAMPLE_CAP:
        idx = rng.choice(points.shape[0], PAIRWISE_SAMPLE_CAP, replace=False)
        points = points[idx]
    return float(pdist(points).mean())


def _max_pairwise(points: np.ndarray, rng) -> float:
    if points.shape[0] > PAIRWISE_SAMPLE_CAP:
        idx = rng.choice(points.shape[0], PAIRWISE_SAMPLE_CAP, replace=False)
        points = points[idx]
    return float(pdist(points).max())


def relative_cohesion(ds: Dataset, clustering: Clustering, seed: int = 0) -> float:
    """1 - mean over clusters of (mean within-cluster distance / dataset diameter).

    Clusters above PAIRWISE_SAMPLE_CAP members are estimated from a seeded
    subsample; so is the dataset diameter.
    """
    rng = np.random.default_rng(seed)
    diameter = _max_pairwise(ds.features, rng)
    if diameter <= 0:
        raise DomainError("relative cohesion is undefined for a zero-diameter dataset")
    ratios = [
        _mean_pairwise(ds.features[c.member_set], rng) / diameter
        for c in clustering.clusters
    ]
    return float(1.0 - np.mean(ratios))


def overlap_degree(clustering: Clustering, n_instances: int) -> float:
    """Fraction of instances that belong to two or more clusters."""
    return float((clustering.membership_counts >= 2).sum() / n_instances)


def coverage(clustering: Clustering, n_instances: int) -> float:
    """Fraction of instances that belong to at least one cluster."""
    return float((clustering.membership_counts >= 1).sum() / n_instances)
