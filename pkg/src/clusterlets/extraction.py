"""Per-color k-means extraction of monochrome clusterlets.

Each color's instances are clustered independently with Lloyd's algorithm
(k-means++ seeding). The resulting clusters, called clusterlets, are the
atomic units that the matchers later combine into polychrome clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import ColorPartition, Dataset
from .errors import ValidationError


@dataclass(frozen=True)
class ExtractionConfig:
    """Hyperparameters of the per-color k-means step.

    `k_per_color` is clamped to each color's population, so values larger
    than a small color simply yield singleton clusterlets for it.
    """

    k_per_color: int
    max_iterations: int = 300
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.k_per_color < 1:
            raise ValidationError(f"k_per_color must be >= 1, got {self.k_per_color}")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if self.tolerance < 0:
            raise ValidationError("tolerance must be >= 0")


@dataclass(frozen=True)
class Clusterlet:
    """A monochrome group of instances with its cached centroid."""

    id: int
    color: int
    members: np.ndarray
    centroid: np.ndarray

    def __post_init__(self):
        members = np.asarray(self.members, dtype=int)
        centroid = np.asarray(self.centroid, dtype=float)
        if members.size == 0:
            raise ValidationError("clusterlet members must be non-empty")
        members.setflags(write=False)
        centroid.setflags(write=False)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "centroid", centroid)

    @property
    def size(self) -> int:
        return int(self.members.size)


def _kmeans_pp_init(points: np.ndarray, k: int, rng) -> np.ndarray:
    """k-means++ (D^2-weighted) choice of k initial centers."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]), dtype=float)
    centers[0] = points[rng.integers(n)]
    closest_sq = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest_sq.sum()
        if total > 0:
            idx = rng.choice(n, p=closest_sq / total)
        else:  # all remaining points coincide with a chosen center
            idx = rng.integers(n)
        centers[j] = points[idx]
        closest_sq = np.minimum(closest_sq, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _assign(points: np.ndarray, centers: np.ndarray):
    sq = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = sq.argmin(axis=1)
    return labels, sq

def _repair_empty(points, labels, centers, sq):
    """Give each empty cluster the point currently farthest from its center.

    Sole members of a cluster are never moved, so the repair cannot empty
    another cluster.
    """
    k = centers.shape[0]
    counts = np.bincount(labels, minlength=k)
    for j in range(k):
        if counts[j] > 0:
            continue
        dist_to_own = sq[np.arange(len(labels)), labels].copy()
        dist_to_own[counts[labels] <= 1] = -np.inf
        far = int(dist_to_own.argmax())
        counts[labels[far]] -= 1
        counts[j] += 1
        labels[far] = j
        centers[j] = points[far]
        sq[:, j] = ((points - centers[j]) ** 2).sum(axis=1)
    return labels, centers, sq


def kmeans(points: np.ndarray, k: int, cfg: ExtractionConfig):
    """Lloyd's algorithm with k-means++ seeding and empty-cluster repair.

    Parameters
    ----------
    points : ndarray of shape (n, d)
    k : int
        Number of clusters, ``1 <= k <= n``.
    cfg : ExtractionConfig
        Supplies the seed, iteration cap, and the squared-norm shift
        tolerance used as the stopping threshold.

    Returns
    -------
    labels : ndarray of shape (n,)
    centers : ndarray of shape (k, d)
    inertia : float
        Sum of squared distances to the assigned centers. Non-increasing
        across iterations; a violation raises RuntimeError.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(cfg.seed)
    centers = _kmeans_pp_init(points, k, rng)
    labels, sq = _assign(points, centers)
    labels, centers, sq = _repair_empty(points, labels, centers, sq)
    previous_inertia = np.inf
    for _ in range(cfg.max_iterations):
        inertia = float(sq[np.arange(n), labels].sum())
        if inertia > previous_inertia * (1 + 1e-12) + 1e-12:
            raise RuntimeError("k-means inertia increased between iterations")
        previous_inertia = inertia
        new_centers = np.empty_like(centers)
        for j in range(k):
            new_centers[j] = points[labels == j].mean(axis=0)
        shift = float(((new_centers - centers) ** 2).sum())
        centers = new_centers
        new_labels, sq = _assign(points, centers)
        new_labels, centers, sq = _repair_empty(points, new_labels, centers, sq)
        converged = bool((new_labels == labels).all())
        labels = new_labels
        if converged or shift <= cfg.tolerance:
            break
    inertia = float(sq[np.arange(n), labels].sum())
    return labels, centers, inertia


def _color_seed(seed: int, color: int) -> int:
    """Stable per-color child seed so colors draw independent streams."""
    return int(np.random.SeedSequence([seed & (2**64 - 1), color]).generate_state(1)[0])


def extract_clusterlets(ds: Dataset, part: ColorPartition, cfg: ExtractionConfig):
    """Run k-means inside every color and return the union of its clusters.

    Clusterlet ids are dense, assigned color by color. Every instance lands
    in exactly one clusterlet, and each clusterlet's centroid is the exact
    mean of its member rows.
    """
    if len(part) != ds.n_colors:
        raise ValidationError("partition does not match the dataset's colors")
    clusterlets = []
    for color in range(ds.n_colors):
        idx = part[color]
        pts = ds.features[idx]
        k = min(cfg.k_per_color, len(idx))
        color_cfg = replace(cfg, seed=_color_seed(cfg.seed, color))
        labels, _, _ = kmeans(pts, k, color_cfg)
        for j in range(k):
            members = idx[labels == j]
            clusterlets.append(
                Clusterlet(
                    id=len(clusterlets),
                    color=color,
                    members=members,
                    centroid=ds.features[members].mean(axis=0),
                )
            )
    return clusterlets
