"""Dataset ingestion, standardization, and per-color partitioning.

A dataset is a numeric feature matrix plus one categorical "color" label
per row (the protected attribute). Colors are mapped to dense integer ids
in first-appearance order; the original labels are kept for reporting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParseError, ValidationError


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix with per-instance color labels.

    Parameters
    ----------
    features : ndarray of shape (n_instances, n_features)
        Numeric feature rows.
    colors : ndarray of shape (n_instances,)
        Dense integer color id per instance, in ``0..n_colors-1``.
    color_names : tuple of str
        Original color label for each dense id.
    feature_names : tuple of str
        Column names, when known (empty tuple otherwise).
    """

    features: np.ndarray
    colors: np.ndarray
    color_names: tuple
    feature_names: tuple = ()
    color_counts: np.ndarray = field(init=False)

    def __post_init__(self):
        features = np.ascontiguousarray(np.asarray(self.features, dtype=float))
        colors = np.ascontiguousarray(np.asarray(self.colors, dtype=int))
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "colors", colors)
        if features.ndim != 2:
            raise ValidationError("features must be a 2-D matrix")
        n, d = features.shape
        if n < 2:
            raise ValidationError(f"need at least 2 instances, got {n}")
        if d < 1:
            raise ValidationError("need at least 1 feature column")
        if colors.shape != (n,):
            raise ValidationError("colors must be a vector with one entry per row")
        n_colors = len(self.color_names)
        if n_colors < 2:
            raise ValidationError(
                f"fair clustering needs at least 2 distinct colors, got {n_colors}"
            )
        if colors.min() < 0 or colors.max() >= n_colors:
            raise ValidationError("color ids must lie in 0..n_colors-1")
        counts = np.bincount(colors, minlength=n_colors)
        if (counts == 0).any():
            missing = self.color_names[int(np.argmin(counts))]
            raise ValidationError(f"color {missing!r} has no instances")
        features.setflags(write=False)
        colors.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "color_counts", counts)

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_colors(self) -> int:
        return len(self.color_names)


@dataclass(frozen=True)
class ColorPartition:
    """Instance indices grouped by color id, order preserved from the dataset."""

    indices: tuple  # one int ndarray per color id

    def __post_init__(self):
        frozen = []
        for idx in self.indices:
            arr = np.asarray(idx, dtype=int)
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "indices", tuple(frozen))

    def __getitem__(self, color: int) -> np.ndarray:
        return self.indices[color]

    def __len__(self) -> int:
        return len(self.indices)


def load_csv(path, color_column, feature_columns=None, color_order=None) -> Dataset:
    """Read a header-ful CSV into a Dataset.

    Every column except `color_column` is treated as a numeric feature
    unless `feature_columns` narrows the selection. Each distinct value of
    the color column becomes one color; dense ids follow first-appearance
    order unless `color_order` lists the labels explicitly.

    Raises
    ------
    ConfigError
        If a named column is missing from the header.
    ParseError
        If a feature cell is blank or not a number (the message names the
        row and column).
    ValidationError
        If fewer than two distinct colors are present.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: file is empty, expected a header row")
        rows = list(reader)

    if color_column not in header:
        raise ConfigError(f"color column {color_column!r} not found in {header}")
    color_idx = header.index(color_column)
    if feature_columns is None:
        feature_columns = [c for c in header if c != color_column]
    missing = [c for c in feature_columns if c not in header]
    if missing:
        raise ConfigError(f"feature columns {missing} not found in {header}")
    if not feature_columns:
        raise ConfigError("no feature columns left after removing the color column")
    feat_idx = [header.index(c) for c in feature_columns]

    features = np.empty((len(rows), len(feat_idx)), dtype=float)
    raw_colors = []
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise ParseError(f"row {r + 2}: expected {len(header)} fields, got {len(row)}")
        raw_colors.append(row[color_idx])
        for j, c in enumerate(feat_idx):
            cell = row[c].strip()
            if not cell:
                raise ParseError(f"row {r + 2}, column {header[c]!r}: blank feature cell")
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"row {r + 2}, column {header[c]!r}: {row[c]!r} is not a number"
                )
            if not np.isfinite(value):
                raise ParseError(
                    f"row {r + 2}, column {header[c]!r}: {row[c]!r} is not finite"
                )
            features[r, j] = value

    if color_order is None:
        color_names = list(dict.fromkeys(raw_colors))
    else:
        color_names = list(color_order)
        unknown = sorted(set(raw_colors) - set(color_names))
        if unknown:
            raise ConfigError(f"color order omits observed colors {unknown}")
    if len(set(raw_colors)) < 2:
        raise ValidationError(
            f"{path}: column {color_column!r} has fewer than 2 distinct colors"
        )
    id_of = {name: i for i, name in enumerate(color_names)}
    colors = np.array([id_of[c] for c in raw_colors], dtype=int)
    return Dataset(
        features=features,
        colors=colors,
        color_names=tuple(color_names),
        feature_names=tuple(feature_columns),
    )


def standardize(ds: Dataset) -> Dataset:
    """Z-score every feature column with the population (1/N) deviation.

    Constant columns become all zeros instead of dividing by zero. The
    operation is idempotent up to floating-point noise.
    """
    mean = ds.features.mean(axis=0)
    std = ds.features.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    features = (ds.features - mean) / scale
    return Dataset(
        features=features,
        colors=ds.colors,
        color_names=ds.color_names,
        feature_names=ds.feature_names,
    )


def partition_by_color(ds: Dataset) -> ColorPartition:
    """Group instance indices by color id; lists are disjoint and cover all rows."""
    return ColorPartition(
        indices=tuple(np.flatnonzero(ds.colors == k) for k in range(ds.n_colors))
    )
