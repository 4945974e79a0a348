import numpy as np
import pytest

from clusterlets import Dataset, make_colored_blobs, standardize


@pytest.fixture(scope="session")
def blob_dataset():
    """4 Gaussian blobs of uneven size, two colors split 50/50, N=400."""
    ds = make_colored_blobs(
        n_blobs=4,
        n_per_blob=[90, 110, 95, 105],
        n_colors=2,
        separation=8.0,
        seed=0,
    )
    return standardize(ds)


@pytest.fixture
def tiny_dataset():
    """Two colors, four instances, hand-checkable numbers."""
    return Dataset(
        features=np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 10.0], [11.0, 10.0]]),
        colors=np.array([0, 1, 0, 1]),
        color_names=("a", "b"),
    )


def random_dataset(rng, n=30, d=2, n_colors=2):
    """Random dataset where every color is guaranteed at least one instance."""
    colors = rng.integers(0, n_colors, size=n)
    colors[:n_colors] = np.arange(n_colors)
    return Dataset(
        features=rng.normal(size=(n, d)),
        colors=colors,
        color_names=tuple(f"c{i}" for i in range(n_colors)),
    )
