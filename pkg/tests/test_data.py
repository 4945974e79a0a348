import numpy as np
import pytest

from clusterlets import (
    ConfigError,
    Dataset,
    ParseError,
    ValidationError,
    load_csv,
    make_colored_blobs,
    partition_by_color,
    standardize,
    write_csv,
)

from conftest import random_dataset


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_reads_rows_and_colors(self, tmp_path):
        path = write(tmp_path, "x,y,color\n1,2,a\n3,4,a\n5,6,b\n7,8,b\n")
        ds = load_csv(path, "color")
        assert ds.n_instances == 4
        assert ds.n_colors == 2
        assert ds.color_names == ("a", "b")
        assert dict(zip(ds.color_names, ds.color_counts)) == {"a": 2, "b": 2}
        assert np.array_equal(ds.features, [[1, 2], [3, 4], [5, 6], [7, 8]])

    def test_single_color_rejected(self, tmp_path):
        path = write(tmp_path, "x,color\n1,a\n2,a\n")
        with pytest.raises(ValidationError):
            load_csv(path, "color")

    def test_blank_cell_names_row_and_column(self, tmp_path):
        path = write(tmp_path, "x,y,color\n1,2,a\n3,,b\n")
        with pytest.raises(ParseError, match=r"row 3.*'y'"):
            load_csv(path, "color")

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        path = write(tmp_path, "x,color\n1,a\noops,b\n")
        with pytest.raises(ParseError, match=r"row 3.*'x'.*'oops'"):
            load_csv(path, "color")

    def test_missing_color_column(self, tmp_path):
        path = write(tmp_path, "x,y\n1,2\n3,4\n")
        with pytest.raises(ConfigError, match="'hue'"):
            load_csv(path, "hue")

    def test_missing_feature_column(self, tmp_path):
        path = write(tmp_path, "x,color\n1,a\n2,b\n")
        with pytest.raises(ConfigError):
            load_csv(path, "color", feature_columns=["x", "z"])

    def test_feature_subset(self, tmp_path):
        path = write(tmp_path, "x,y,color\n1,2,a\n3,4,b\n")
        ds = load_csv(path, "color", feature_columns=["y"])
        assert ds.feature_names == ("y",)
        assert np.array_equal(ds.features, [[2], [4]])

    def test_color_order_override(self, tmp_path):
        path = write(tmp_path, "x,color\n1,a\n2,b\n3,b\n")
        ds = load_csv(path, "color", color_order=["b", "a"])
        assert ds.color_names == ("b", "a")
        assert np.array_equal(ds.colors, [1, 0, 0])

    def test_round_trip_counts_and_histogram(self, tmp_path):
        src = make_colored_blobs(3, 40, 3, seed=5)
        path = tmp_path / "blobs.csv"
        write_csv(src, path)
        ds = load_csv(path, "color")
        assert ds.n_instances == src.n_instances
        assert np.array_equal(ds.color_counts, src.color_counts)
        assert np.allclose(ds.features, src.features)


class TestDatasetInvariants:
    def test_needs_two_instances(self):
        with pytest.raises(ValidationError):
            Dataset(features=[[1.0]], colors=[0], color_names=("a", "b"))

    def test_needs_two_colors(self):
        with pytest.raises(ValidationError):
            Dataset(features=[[1.0], [2.0]], colors=[0, 0], color_names=("a",))

    def test_every_color_present(self):
        with pytest.raises(ValidationError):
            Dataset(features=[[1.0], [2.0]], colors=[0, 0], color_names=("a", "b"))

    def test_counts_sum_to_n(self, tiny_dataset):
        assert tiny_dataset.color_counts.sum() == tiny_dataset.n_instances

    def test_immutable(self, tiny_dataset):
        with pytest.raises(ValueError):
            tiny_dataset.features[0, 0] = 99.0


class TestStandardize:
    def test_two_point_column(self):
        ds = Dataset(features=[[1.0], [3.0]], colors=[0, 1], color_names=("a", "b"))
        out = standardize(ds)
        assert np.allclose(out.features, [[-1.0], [1.0]])

    def test_constant_column_becomes_zeros(self):
        ds = Dataset(
            features=[[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]],
            colors=[0, 1, 0],
            color_names=("a", "b"),
        )
        out = standardize(ds)
        assert np.all(out.features[:, 0] == 0.0)

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        ds = random_dataset(rng, n=50, d=4)
        once = standardize(ds)
        twice = standardize(once)
        assert np.abs(twice.features - once.features).max() <= 1e-9

    def test_colors_unchanged(self, tiny_dataset):
        out = standardize(tiny_dataset)
        assert np.array_equal(out.colors, tiny_dataset.colors)
        assert out.color_names == tiny_dataset.color_names


class TestPartitionByColor:
    def test_two_colors_interleaved(self):
        ds = Dataset(
            features=np.zeros((4, 1)) + np.arange(4)[:, None],
            colors=[0, 1, 0, 1],
            color_names=("a", "b"),
        )
        part = partition_by_color(ds)
        assert part[0].tolist() == [0, 2]
        assert part[1].tolist() == [1, 3]

    def test_skewed(self):
        ds = Dataset(
            features=np.arange(4.0)[:, None],
            colors=[0, 0, 0, 1],
            color_names=("a", "b"),
        )
        part = partition_by_color(ds)
        assert part[0].tolist() == [0, 1, 2]
        assert part[1].tolist() == [3]

    def test_three_colors_cover(self):
        ds = Dataset(
            features=np.arange(6.0)[:, None],
            colors=[2, 0, 1, 2, 1, 0],
            color_names=("a", "b", "c"),
        )
        part = partition_by_color(ds)
        union = np.concatenate([part[k] for k in range(3)])
        assert sorted(union.tolist()) == list(range(6))

    def test_disjoint_cover_property(self):
        rng = np.random.default_rng(123)
        for _ in range(50):
            n_colors = int(rng.integers(2, 5))
            ds = random_dataset(rng, n=int(rng.integers(n_colors, 40)), n_colors=n_colors)
            part = partition_by_color(ds)
            union = np.concatenate([part[k] for k in range(n_colors)])
            assert len(union) == ds.n_instances
            assert len(np.unique(union)) == ds.n_instances
            for k in range(n_colors):
                assert np.all(ds.colors[part[k]] == k)
