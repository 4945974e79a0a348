import numpy as np
import pytest

from clusterlets import (
    Cluster,
    Clustering,
    Dataset,
    DomainError,
    ValidationError,
    balance,
    clustering_balance,
    coverage,
    deviation,
    mean_max_deviation,
    overlap_degree,
    relative_cohesion,
    silhouette,
)
from clusterlets.metrics import silhouette_from_distances
from scipy.spatial.distance import pdist, squareform

from oracles import brute_silhouette, brute_weighted_silhouette


def cluster_of(indices, colors, n_colors, ids=(0,)):
    indices = np.asarray(indices, dtype=int)
    hist = np.bincount(np.asarray(colors)[indices], minlength=n_colors)
    return Cluster(clusterlet_ids=tuple(ids), member_set=indices, color_histogram=hist)


class TestBalance:
    def test_equal_counts(self):
        assert balance([5, 5]) == 1.0

    def test_three_to_one(self):
        assert balance([3, 1]) == pytest.approx(1 / 3)

    def test_monochrome_is_zero(self):
        assert balance([4, 0]) == 0.0

    def test_all_zero_rejected(self):
        with pytest.raises(DomainError):
            balance([0, 0])

    def test_multicolor_is_min_pairwise_ratio(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            counts = rng.integers(1, 50, size=rng.integers(2, 6))
            expected = min(
                counts[i] / counts[j]
                for i in range(len(counts))
                for j in range(len(counts))
                if i != j
            )
            assert balance(counts) == pytest.approx(expected)


class TestDeviation:
    def test_identical_is_zero(self):
        assert deviation([3, 7], [3, 7]) == 0.0
        assert deviation([3, 7], [6, 14]) == 0.0  # same frequencies

    def test_half_against_three_quarters(self):
        # frequencies (.5, .5) vs (.75, .25):
        # max(|.5-.75|/.75, |.5-.25|/.5) = 0.5
        assert deviation([1, 1], [3, 1]) == pytest.approx(0.5)
        assert deviation([3, 1], [1, 1]) == pytest.approx(0.5)

    def test_opposite_monochromes(self):
        assert deviation([5, 0], [0, 3]) == 1.0

    def test_zero_total_rejected(self):
        with pytest.raises(DomainError):
            deviation([0, 0], [1, 1])

    def test_mismatched_shapes_rejected(self):
        with pytest.raises(DomainError):
            deviation([1, 2, 3], [1, 2])

    def test_brute_force_over_color_orderings(self):
        # the max over colors must not depend on which color comes first
        rng = np.random.default_rng(5)
        for _ in range(200):
            a = rng.integers(0, 20, size=3)
            b = rng.integers(0, 20, size=3)
            if a.sum() == 0 or b.sum() == 0:
                continue
            perm = rng.permutation(3)
            assert deviation(a, b) == pytest.approx(deviation(a[perm], b[perm]))


class TestMeanMaxDeviation:
    def test_mirroring_clusters_are_zero(self, tiny_dataset):
        clusters = (
            cluster_of([0, 1], tiny_dataset.colors, 2, ids=(0,)),
            cluster_of([2, 3], tiny_dataset.colors, 2, ids=(1,)),
        )
        C = Clustering(clusters=clusters, n_instances=4)
        assert mean_max_deviation(C, tiny_dataset) == (0.0, 0.0, 0.0, 0.0)

    def test_two_point_statistics(self):
        ds = Dataset(
            features=np.arange(6.0)[:, None],
            colors=[0, 0, 0, 1, 1, 1],
            color_names=("a", "b"),
        )
        clusters = (
            cluster_of([0, 3], ds.colors, 2, ids=(0,)),  # 1:1 -> deviation 0
            cluster_of([0, 1, 2, 3], ds.colors, 2, ids=(1,)),  # 3:1 -> deviation 0.5
        )
        C = Clustering(clusters=clusters, n_instances=6)
        stats = mean_max_deviation(C, ds)
        assert stats.max == pytest.approx(0.5)
        assert stats.mean == pytest.approx(0.25)
        assert stats.std == pytest.approx(0.25)
        assert stats.min == 0.0

    def test_single_cluster_equals_dataset(self, tiny_dataset):
        C = Clustering(
            clusters=(cluster_of([0, 1, 2, 3], tiny_dataset.colors, 2),),
            n_instances=4,
        )
        stats = mean_max_deviation(C, tiny_dataset)
        assert stats.mean == 0.0
        assert stats.max == 0.0


class TestSilhouette:
    def tight_blob_fixture(self):
        rng = np.random.default_rng(42)
        blob1 = rng.normal(0, 0.3, (5, 2))
        blob2 = rng.normal(0, 0.3, (5, 2)) + [10, 10]
        X = np.vstack([blob1, blob2])
        labels = np.array([0] * 5 + [1] * 5)
        return X, labels

    def test_two_tight_blobs(self):
        X, labels = self.tight_blob_fixture()
        ds = Dataset(features=X, colors=labels, color_names=("a", "b"))
        value = silhouette(ds, labels)
        assert value > 0.9
        assert value == pytest.approx(0.9687840789523493, abs=1e-9)
        assert value == pytest.approx(brute_silhouette(X, labels), abs=1e-12)

    def test_random_labels_near_zero(self):
        rng = np.random.default_rng(7)
        X = rng.normal(0, 1.0, (20, 2))
        labels = rng.integers(0, 2, 20)
        ds = Dataset(features=X, colors=labels, color_names=("a", "b"))
        value = silhouette(ds, labels)
        assert abs(value) < 0.2
        assert value == pytest.approx(-0.039418669949952384, abs=1e-9)
        assert value == pytest.approx(brute_silhouette(X, labels), abs=1e-12)

    def test_duplicated_points_convention(self):
        X = np.zeros((6, 2))
        labels = np.array([0, 0, 0, 1, 1, 1])
        ds = Dataset(features=X, colors=labels, color_names=("a", "b"))
        assert silhouette(ds, labels) == 0.0

    def test_fewer_than_two_clusters(self, tiny_dataset):
        with pytest.raises(DomainError):
            silhouette(tiny_dataset, np.zeros(4, dtype=int))

    def test_relabeling_and_permutation_invariance(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(18, 3))
        labels = rng.integers(0, 3, 18)
        labels[:3] = [0, 1, 2]
        ds = Dataset(features=X, colors=(labels > 0).astype(int), color_names=("a", "b"))
        base = silhouette(ds, labels)
        assert silhouette(ds, 5 - labels) == pytest.approx(base, abs=1e-12)
        perm = rng.permutation(18)
        ds2 = Dataset(
            features=X[perm], colors=ds.colors[perm], color_names=("a", "b")
        )
        assert silhouette(ds2, labels[perm]) == pytest.approx(base, abs=1e-12)

    def test_weighted_matches_brute_force(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(3, 8))
            points = rng.normal(size=(n, 2))
            labels = rng.integers(0, 3, n)
            labels[:2] = [0, 1]
            weights = rng.integers(1, 5, n)
            D = squareform(pdist(points))
            weighted = silhouette_from_distances(D, labels, weights=weights)
            assert weighted == pytest.approx(
                brute_weighted_silhouette(points, labels, weights), abs=1e-9
            )
            assert -1.0 <= weighted <= 1.0

    def test_range(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            n = int(rng.integers(4, 15))
            X = rng.normal(size=(n, 2))
            labels = rng.integers(0, 3, n)
            labels[:2] = [0, 1]
            ds = Dataset(features=X, colors=(labels > 0).astype(int), color_names=("a", "b"))
            assert -1.0 <= silhouette(ds, labels) <= 1.0


class TestRelativeCohesion:
    def test_identical_point_clusters(self):
        features = np.array([[0.0, 0.0]] * 3 + [[5.0, 5.0]] * 3)
        ds = Dataset(features=features, colors=[0, 1, 0, 1, 0, 1], color_names=("a", "b"))
        C = Clustering(
            clusters=(
                cluster_of([0, 1, 2], ds.colors, 2, ids=(0,)),
                cluster_of([3, 4, 5], ds.colors, 2, ids=(1,)),
            ),
            n_instances=6,
        )
        assert relative_cohesion(ds, C) == 1.0

    def test_equilateral_triangle_single_cluster(self):
        features = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        ds = Dataset(features=features, colors=[0, 1, 0], color_names=("a", "b"))
        C = Clustering(
            clusters=(cluster_of([0, 1, 2], ds.colors, 2),), n_instances=3
        )
        assert relative_cohesion(ds, C) == pytest.approx(0.0, abs=1e-12)

    def test_two_blob_fixture_matches_hand_value(self):
        features = np.array([
            [0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0],
            [10.0, 10.0], [11.0, 10.0], [10.0, 11.0], [11.0, 11.0],
        ])
        ds = Dataset(features=features, colors=[0, 1] * 4, color_names=("a", "b"))
        C = Clustering(
            clusters=(
                cluster_of([0, 1, 2, 3], ds.colors, 2, ids=(0,)),
                cluster_of([4, 5, 6, 7], ds.colors, 2, ids=(1,)),
            ),
            n_instances=8,
        )
        assert relative_cohesion(ds, C) == pytest.approx(0.9268420132614213, abs=1e-9)

    def test_zero_diameter_rejected(self):
        features = np.zeros((4, 2))
        ds = Dataset(features=features, colors=[0, 1, 0, 1], color_names=("a", "b"))
        C = Clustering(clusters=(cluster_of([0, 1], ds.colors, 2),), n_instances=4)
        with pytest.raises(DomainError):
            relative_cohesion(ds, C)


class TestOverlapAndCoverage:
    def build(self, member_lists, n=4):
        colors = np.array([0, 1] * (n // 2))
        clusters = tuple(
            cluster_of(m, colors, 2, ids=(i,)) for i, m in enumerate(member_lists)
        )
        return Clustering(clusters=clusters, n_instances=n)

    def test_crisp_is_zero(self):
        C = self.build([[0, 1], [2, 3]])
        assert overlap_degree(C, 4) == 0.0

    def test_one_of_four(self):
        C = self.build([[0, 1], [1, 2, 3]])
        assert overlap_degree(C, 4) == 0.25

    def test_total_overlap(self):
        C = self.build([[0, 1, 2, 3], [0, 1, 2, 3]])
        assert overlap_degree(C, 4) == 1.0

    def test_coverage(self):
        C = self.build([[0, 1], [1]])
        assert coverage(C, 4) == 0.5

    def test_membership_counts(self):
        C = self.build([[0, 1], [1, 2]])
        assert C.membership_counts.tolist() == [1, 2, 1, 0]
        assert C.membership(1) == (0, 1)
        assert C.membership(3) == ()


class TestClusterTypes:
    def test_histogram_must_sum_to_members(self):
        with pytest.raises(ValidationError):
            Cluster(clusterlet_ids=(0,), member_set=[0, 1], color_histogram=[1, 0])

    def test_member_dedup(self):
        c = Cluster(clusterlet_ids=(0,), member_set=[1, 1, 0], color_histogram=[1, 1])
        assert c.member_set.tolist() == [0, 1]

    def test_labels_require_partition(self, tiny_dataset):
        C = Clustering(
            clusters=(
                cluster_of([0, 1], tiny_dataset.colors, 2, ids=(0,)),
                cluster_of([1, 2, 3], tiny_dataset.colors, 2, ids=(1,)),
            ),
            n_instances=4,
        )
        with pytest.raises(DomainError):
            C.labels()

    def test_clustering_balance(self, tiny_dataset):
        C = Clustering(
            clusters=(
                cluster_of([0, 1], tiny_dataset.colors, 2, ids=(0,)),
                cluster_of([0, 2], tiny_dataset.colors, 2, ids=(1,)),
            ),
            n_instances=4,
        )
        assert clustering_balance(C) == 0.0  # second cluster is monochrome
