"""Matchers turning monochrome clusterlets into a clustering.

Two families are provided:

* Pinball matchers grow one cluster per clusterlet of the first color by
  bouncing across the color partitions: forward passes visit colors
  2..|K|, backward passes return |K|-1..1, and at every step the
  clusterlet of the target color minimizing the matcher's measure (ties:
  lowest id) joins the cluster. The same clusterlet may join several
  clusters, so the result can be fuzzy.
* The centroid matcher searches the space of partitions of all
  clusterlets, scoring each candidate with an affine blend of silhouette
  and (one minus) the maximum per-cluster deviation, and returns the best
  scoring partition. Its output is always crisp.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .data import Dataset
from .errors import ConfigError, DomainError, ValidationError
from .metrics import (
    Cluster,
    Clustering,
    deviation,
    deviation_profile,
    silhouette_from_distances,
)

PINBALL_MATCHERS = ("d-pb", "g-d-pb", "b-pb", "g-b-pb")
MATCHERS = PINBALL_MATCHERS + ("centroid",)
MATCHER_ALIASES = {"g-b": "g-b-pb", "g-d": "g-d-pb", "d": "d-pb", "b": "b-pb", "c": "centroid"}


@dataclass(frozen=True)
class MatchConfig:
    """Matching hyperparameters.

    `hops` only affects pinball matchers; `omega`, `sample_size`,
    `silhouette_mode`, and `objective` only the centroid matcher.
    `objective` selects how the centroid score combines silhouette s and
    maximum deviation d: "affine" uses omega*s + (1-omega)*(1-d), "raw"
    uses omega*s + (1 - omega*d).
    """

    matcher: str
    hops: int = 1
    omega: float = 0.0
    sample_size: int = 10_000
    seed: int = 0
    silhouette_mode: str = "centroid"
    objective: str = "affine"

    def __post_init__(self):
        name = MATCHER_ALIASES.get(self.matcher, self.matcher)
        if name not in MATCHERS:
            raise ConfigError(
                f"unknown matcher {self.matcher!r}; valid names: {', '.join(MATCHERS)}"
            )
        object.__setattr__(self, "matcher", name)
        if self.hops < 1:
            raise ConfigError(f"hops must be >= 1, got {self.hops}")
        if not 0.0 <= self.omega <= 1.0:
            raise ConfigError(f"omega must be in [0, 1], got {self.omega}")
        if self.sample_size < 1:
            raise ConfigError(f"sample_size must be >= 1, got {self.sample_size}")
        if self.silhouette_mode not in ("centroid", "instance"):
            raise ConfigError(f"unknown silhouette mode {self.silhouette_mode!r}")
        if self.objective not in ("affine", "raw"):
            raise ConfigError(f"unknown objective {self.objective!r}")


@dataclass(frozen=True)
class ClusterletGraph:
    """Clusterlets grouped by color plus their centroid distance matrix."""

    clusterlets: tuple
    by_color: tuple  # tuple of clusterlet-id tuples, one per color
    distances: np.ndarray

    @property
    def n_clusterlets(self) -> int:
        return len(self.clusterlets)

    @property
    def n_colors(self) -> int:
        return len(self.by_color)


def build_graph(clusterlets, n_colors: int | None = None) -> ClusterletGraph:
    """Build the color-partitioned graph with all centroid distances."""
    if not clusterlets:
        raise ValidationError("cannot build a graph from zero clusterlets")
    for pos, c in enumerate(clusterlets):
        if c.id != pos:
            raise ValidationError("clusterlet ids must be dense and in list order")
    if n_colors is None:
        n_colors = max(c.color for c in clusterlets) + 1
    by_color = [[] for _ in range(n_colors)]
    for c in clusterlets:
        by_color[c.color].append(c.id)
    for color, ids in enumerate(by_color):
        if not ids:
            raise DomainError(f"color {color} has no clusterlets")
    centroids = np.array([c.centroid for c in clusterlets])
    distances = squareform(pdist(centroids))
    distances.setflags(write=False)
    return ClusterletGraph(
        clusterlets=tuple(clusterlets),
        by_color=tuple(tuple(ids) for ids in by_color),
        distances=distances,
    )


def pinball_measure(matcher, cluster, last_added, candidate, graph, ds) -> float:
    """Score one candidate clusterlet for a pinball step (lower is better).

    d-pb sums centroid distances from the candidate to every clusterlet in
    the cluster; g-d-pb uses the distance to the last added clusterlet
    only. b-pb measures the deviation of cluster-union-candidate against
    the dataset; g-b-pb that of last-added-union-candidate.
    """
    if matcher == "d-pb":
        ids = set(cluster.clusterlet_ids)
        return float(sum(graph.distances[candidate.id, i] for i in ids))
    if matcher == "g-d-pb":
        return float(graph.distances[candidate.id, last_added.id])
    if matcher == "b-pb":
        hist = cluster.color_histogram.astype(float).copy()
        if candidate.id not in cluster.clusterlet_ids:
            hist[candidate.color] += candidate.size
        return deviation(hist, ds.color_counts)
    if matcher == "g-b-pb":
        hist = np.zeros(ds.n_colors)
        hist[last_added.color] += last_added.size
        if candidate.id != last_added.id:
            hist[candidate.color] += candidate.size
        return deviation(hist, ds.color_counts)
    raise ConfigError(f"{matcher!r} is not a pinball matcher")


def _hop_targets(n_colors: int, hop: int):
    """Target colors of one hop: forward visits 1..K-1, backward K-2..0."""
    if hop % 2 == 1:
        return range(1, n_colors)
    return range(n_colors - 2, -1, -1)


def pinball_match(graph: ClusterletGraph, ds: Dataset, cfg: MatchConfig) -> Clustering:
    """Grow one (possibly fuzzy) cluster per clusterlet of the first color.

    Deterministic given inputs; ties are broken by lowest clusterlet id.
    The returned clustering records, per seed cluster, the sequence of
    chosen clusterlet ids in `trace`.
    """
    if cfg.matcher not in PINBALL_MATCHERS:
        raise ConfigError(f"{cfg.matcher!r} is not a pinball matcher")
    n_colors = graph.n_colors
    if n_colors < 2:
        raise DomainError("pinball matching needs at least 2 colors")

    clusters = []
    traces = []
    for seed_id in graph.by_color[0]:
        chosen = [seed_id]
        present = {seed_id}
        last = seed_id
        trace = []
        for hop in range(1, cfg.hops + 1):
            for color in _hop_targets(n_colors, hop):
                cluster = Cluster.from_clusterlets(chosen, graph.clusterlets, n_colors)
                best_id = None
                best_value = np.inf
                for cand_id in graph.by_color[color]:
                    if cfg.matcher == "g-d-pb" and cand_id == last:
                        continue
                    value = pinball_measure(
                        cfg.matcher,
                        cluster,
                        graph.clusterlets[last],
                        graph.clusterlets[cand_id],
                        graph,
                        ds,
                    )
                    if value < best_value:
                        best_value = value
                        best_id = cand_id
                trace.append(best_id)
                if best_id not in present:
                    present.add(best_id)
                    chosen.append(best_id)
                last = best_id
        clusters.append(Cluster.from_clusterlets(chosen, graph.clusterlets, n_colors))
        traces.append(tuple(trace))

    clustering = Clustering(
        clusters=tuple(clusters),
        n_instances=ds.n_instances,
        source=asdict(cfg),
        trace=tuple(traces),
    )
    first_color = np.flatnonzero(ds.colors == 0)
    if (clustering.membership_counts[first_color] < 1).any():
        raise RuntimeError("pinball matching left a first-color instance uncovered")
    return clustering


def _bell_number(n: int) -> int:
    """Number of partitions of an n-element set (Bell triangle)."""
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[-1]


def iter_partitions(n: int):
    """Yield every partition of {0..n-1} as a dense assignment vector.

    Partitions are enumerated as restricted growth strings in
    lexicographic order, so labels are dense in order of first appearance.
    """
    a = np.zeros(n, dtype=int)

    def rec(i, mx):
        if i == n:
            yield a
            return
        for v in range(mx + 2):
            a[i] = v
            yield from rec(i + 1, max(mx, v))

    yield from rec(1, 0)


def centroid_match(graph: ClusterletGraph, ds: Dataset, cfg: MatchConfig) -> Clustering:
    """Search partitions of all clusterlets for the best scoring clustering.

    Draws `sample_size` random partitions (uniform cluster count in 2..M,
    clusterlets assigned independently, empty groups dropped) unless the
    whole space fits in the budget (Bell(M) <= sample_size), in which case
    every partition is scored. Ties keep the first partition encountered,
    so results are deterministic given the seed.
    """
    if cfg.matcher != "centroid":
        raise ConfigError(f"centroid_match called with matcher {cfg.matcher!r}")
    M = graph.n_clusterlets
    if M < 2:
        raise DomainError("centroid matching needs at least 2 clusterlets")

    sizes = np.array([c.size for c in graph.clusterlets], dtype=float)
    colors = np.array([c.color for c in graph.clusterlets])
    size_hist = np.zeros((M, ds.n_colors))
    size_hist[np.arange(M), colors] = sizes
    reference = ds.color_counts

    if cfg.silhouette_mode == "instance":
        instance_of = np.empty(ds.n_instances, dtype=int)
        for c in graph.clusterlets:
            instance_of[c.members] = c.id
        instance_distances = squareform(pdist(ds.features))

    def score(assignment: np.ndarray, m: int) -> float:
        hist = np.zeros((m, ds.n_colors))
        for k in range(ds.n_colors):
            hist[:, k] = np.bincount(assignment, weights=size_hist[:, k], minlength=m)
        max_dev = float(deviation_profile(hist, reference).max())
        if m < 2:
            sil = 0.0  # the trivial one-cluster partition carries no separation signal
        elif cfg.silhouette_mode == "centroid":
            sil = silhouette_from_distances(graph.distances, assignment, weights=sizes)
        else:
            sil = silhouette_from_distances(instance_distances, assignment[instance_of])
        if cfg.objective == "affine":
            return cfg.omega * sil + (1.0 - cfg.omega) * (1.0 - max_dev)
        return cfg.omega * sil + (1.0 - cfg.omega * max_dev)

    best_assignment = None
    best_score = -np.inf
    if _bell_number(M) <= cfg.sample_size:
        for assignment in iter_partitions(M):
            m = int(assignment.max()) + 1
            value = score(assignment, m)
            if value > best_score:
                best_score = value
                best_assignment = assignment.copy()
    else:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.sample_size):
            m = int(rng.integers(2, M + 1))
            raw = rng.integers(0, m, size=M)
            _, assignment = np.unique(raw, return_inverse=True)
            value = score(assignment, int(assignment.max()) + 1)
            if value > best_score:
                best_score = value
                best_assignment = assignment

    m = int(best_assignment.max()) + 1
    clusters = [
        Cluster.from_clusterlets(
            tuple(np.flatnonzero(best_assignment == j)), graph.clusterlets, ds.n_colors
        )
        for j in range(m)
    ]
    clustering = Clustering(
        clusters=tuple(clusters), n_instances=ds.n_instances, source=asdict(cfg)
    )
    if (clustering.membership_counts != 1).any():
        raise RuntimeError("centroid matching did not produce a partition")
    return clustering


def match(graph: ClusterletGraph, ds: Dataset, cfg: MatchConfig) -> Clustering:
    """Dispatch to the pinball or centroid matcher named in the config."""
    if cfg.matcher == "centroid":
        return centroid_match(graph, ds, cfg)
    return pinball_match(graph, ds, cfg)
