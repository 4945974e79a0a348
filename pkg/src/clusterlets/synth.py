"""Synthetic colored Gaussian-blob datasets for tests and demos."""

from __future__ import annotations

import csv

import numpy as np

from .data import Dataset
from .errors import ConfigError


def _blob_centers(n_blobs: int, separation: float, n_features: int) -> np.ndarray:
    """Place blob centers `separation` apart: on a circle, or a line in 1-D."""
    centers = np.zeros((n_blobs, n_features))
    if n_blobs == 1:
        return centers
    if n_features == 1:
        centers[:, 0] = separation * np.arange(n_blobs)
        return centers
    radius = separation / (2.0 * np.sin(np.pi / n_blobs))
    angles = 2.0 * np.pi * np.arange(n_blobs) / n_blobs
    centers[:, 0] = radius * np.cos(angles)
    centers[:, 1] = radius * np.sin(angles)
    return centers


def _color_counts(proportions, n_points: int) -> np.ndarray:
    """Largest-remainder rounding of proportions into integer counts."""
    p = np.asarray(proportions, dtype=float)
    if (p < 0).any() or p.sum() <= 0:
        raise ConfigError(f"proportions must be non-negative and sum > 0, got {list(p)}")
    p = p / p.sum()
    raw = p * n_points
    counts = np.floor(raw).astype(int)
    remainder = n_points - counts.sum()
    order = np.argsort(-(raw - counts))
    counts[order[:remainder]] += 1
    return counts


def make_colored_blobs(
    n_blobs: int,
    n_per_blob: int,
    n_colors: int = 2,
    proportions=None,
    separation: float = 8.0,
    n_features: int = 2,
    seed: int = 0,
) -> Dataset:
    """Sample isotropic Gaussian blobs (unit variance) with per-blob color mixes.

    Parameters
    ----------
    n_per_blob : int or sequence of int
        Points per blob; a sequence gives each blob its own size.
    proportions : sequence of float or sequence of sequences, optional
        Color proportions within each blob. A flat list applies to every
        blob; a list of lists is cycled across blobs (so alternating skews
        like ``[[.9, .1], [.1, .9]]`` are easy to express). Defaults to a
        uniform split.
    separation : float
        Distance between adjacent blob centers, in units of the blob
        standard deviation.

    Returns
    -------
    Dataset
        Features plus color labels named ``c0..c{n_colors-1}``.
    """
    sizes = [n_per_blob] * n_blobs if np.ndim(n_per_blob) == 0 else list(n_per_blob)
    if len(sizes) != n_blobs:
        raise ConfigError(f"got {len(sizes)} blob sizes for {n_blobs} blobs")
    if n_blobs < 1 or min(sizes) < 1 or n_colors < 2 or n_features < 1:
        raise ConfigError("blob, point, color, and feature counts must be positive")
    if separation <= 0:
        raise ConfigError(f"separation must be > 0, got {separation}")
    if proportions is None:
        per_blob = [[1.0 / n_colors] * n_colors]
    elif np.ndim(proportions) == 1:
        per_blob = [list(proportions)]
    else:
        per_blob = [list(p) for p in proportions]
    for p in per_blob:
        if len(p) != n_colors:
            raise ConfigError(f"proportions {p} do not match {n_colors} colors")

    rng = np.random.default_rng(seed)
    centers = _blob_centers(n_blobs, separation, n_features)
    features = []
    colors = []
    for b in range(n_blobs):
        points = centers[b] + rng.standard_normal((sizes[b], n_features))
        counts = _color_counts(per_blob[b % len(per_blob)], sizes[b])
        features.append(points)
        colors.append(np.repeat(np.arange(n_colors), counts))
    return Dataset(
        features=np.vstack(features),
        colors=np.concatenate(colors),
        color_names=tuple(f"c{i}" for i in range(n_colors)),
        feature_names=tuple(f"f{j}" for j in range(n_features)),
    )


def write_csv(ds: Dataset, path, color_column: str = "color") -> None:
    """Write a dataset in the CSV layout `load_csv` reads back."""
    names = ds.feature_names or tuple(f"f{j}" for j in range(ds.n_features))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + [color_column])
        for row, color in zip(ds.features, ds.colors):
            writer.writerow([repr(float(v)) for v in row] + [ds.color_names[color]])
