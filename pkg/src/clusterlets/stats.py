"""Cross-run analysis: correlations and rank-based method comparison."""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import ValidationError

# Studentized-range quantiles / sqrt(2) at alpha = 0.05, infinite degrees
# of freedom, indexed by the number of compared methods (Nemenyi test).
NEMENYI_Q_05 = {
    2: 1.960, 3: 2.344, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.948, 8: 3.031,
    9: 3.102, 10: 3.164, 11: 3.219, 12: 3.268, 13: 3.313, 14: 3.354,
    15: 3.391, 16: 3.426, 17: 3.458, 18: 3.489, 19: 3.517, 20: 3.544,
}

Correlations = namedtuple("Correlations", ["pearson", "spearman", "kendall"])


def correlations(xs, ys) -> Correlations:
    """Pearson, Spearman (average ranks on ties), and Kendall tau-b.

    A constant input leaves the affected coefficients NaN instead of
    raising; lengths must match and be at least 3.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValidationError("correlation inputs must be equal-length vectors")
    if xs.size < 3:
        raise ValidationError(f"need at least 3 pairs, got {xs.size}")
    if np.ptp(xs) == 0 or np.ptp(ys) == 0:
        return Correlations(float("nan"), float("nan"), float("nan"))
    pearson = float(sps.pearsonr(xs, ys).statistic)
    spearman = float(sps.spearmanr(xs, ys).statistic)
    kendall = float(sps.kendalltau(xs, ys).statistic)
    return Correlations(pearson, spearman, kendall)


@dataclass(frozen=True)
class RankTable:
    """Per-dataset method ranks plus the Nemenyi critical difference.

    Ranks run 1 (worst) to m (best) within each dataset, with average
    ranks on ties; method pairs whose average ranks differ by less than
    `critical_difference` are listed in `not_significant`.
    """

    methods: tuple
    datasets: tuple
    ranks: np.ndarray  # shape (n_datasets, n_methods)
    average_ranks: np.ndarray
    critical_difference: float
    alpha: float
    friedman_statistic: float | None
    friedman_pvalue: float | None
    not_significant: tuple  # pairs of method names

    def to_dict(self) -> dict:
        return {
            "methods": list(self.methods),
            "datasets": list(self.datasets),
            "ranks": self.ranks.tolist(),
            "average_ranks": self.average_ranks.tolist(),
            "critical_difference": self.critical_difference,
            "alpha": self.alpha,
            "friedman_statistic": self.friedman_statistic,
            "friedman_pvalue": self.friedman_pvalue,
            "not_significant": [list(p) for p in self.not_significant],
        }


def rank_methods(results: dict, higher_is_better: bool = False) -> RankTable:
    """Rank methods across datasets and compute the Nemenyi critical difference.

    Parameters
    ----------
    results : dict
        Mapping dataset name -> {method name: score}; every method must be
        scored on every dataset.
    higher_is_better : bool
        Direction of the score; the best method on a dataset always
        receives the highest rank number.
    """
    if not results:
        raise ValidationError("no results to rank")
    datasets = tuple(results.keys())
    methods = tuple(sorted({m for scores in results.values() for m in scores}))
    m = len(methods)
    if m < 2:
        raise ValidationError("need at least 2 methods to rank")
    if m not in NEMENYI_Q_05:
        raise ValidationError(f"no q value tabulated for {m} methods")
    scores = np.empty((len(datasets), m))
    for i, dataset in enumerate(datasets):
        for j, method in enumerate(methods):
            if method not in results[dataset]:
                raise ValidationError(f"method {method!r} missing on {dataset!r}")
            scores[i, j] = results[dataset][method]

    goodness = scores if higher_is_better else -scores
    ranks = np.vstack([sps.rankdata(row) for row in goodness])
    average_ranks = ranks.mean(axis=0)

    n = len(datasets)
    cd = NEMENYI_Q_05[m] * np.sqrt(m * (m + 1) / (6.0 * n))
    if m >= 3:
        stat, pvalue = sps.friedmanchisquare(*scores.T)
        friedman = (float(stat), float(pvalue))
    else:
        friedman = (None, None)
    not_significant = tuple(
        (methods[i], methods[j])
        for i in range(m)
        for j in range(i + 1, m)
        if abs(average_ranks[i] - average_ranks[j]) < cd
    )
    ranks.setflags(write=False)
    average_ranks.setflags(write=False)
    return RankTable(
        methods=methods,
        datasets=datasets,
        ranks=ranks,
        average_ranks=average_ranks,
        critical_difference=float(cd),
        alpha=0.05,
        friedman_statistic=friedman[0],
        friedman_pvalue=friedman[1],
        not_significant=not_significant,
    )


def plot_critical_difference(table: RankTable, path) -> None:
    """Render the rank line with significance bands to a static SVG/PNG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    m = len(table.methods)
    order = np.argsort(table.average_ranks)
    fig, ax = plt.subplots(figsize=(7, 2 + 0.35 * m))
    ax.set_xlim(0.8, m + 0.2)
    ax.spines[["left", "right", "top"]].set_visible(False)
    ax.get_yaxis().set_visible(False)
    ax.set_xticks(range(1, m + 1))
    ax.set_xlabel("average rank (right is better)")

    for slot, idx in enumerate(order):
        y = -(slot + 1)
        rank = table.average_ranks[idx]
        ax.plot([rank, rank], [0, y], color="k", lw=0.8)
        side = -0.1 if slot % 2 == 0 else 0.1
        ax.annotate(
            f"{table.methods[idx]} ({rank:.2f})",
            xy=(rank, y),
            xytext=(rank + side, y),
            ha="right" if side < 0 else "left",
            va="center",
            fontsize=9,
        )
    # bands join pairs whose gap is below the critical difference
    pairs = {frozenset(p) for p in table.not_significant}
    band_y = -m - 0.6
    for i in range(m):
        for j in range(i + 1, m):
            if frozenset((table.methods[i], table.methods[j])) in pairs:
                lo = min(table.average_ranks[i], table.average_ranks[j])
                hi = max(table.average_ranks[i], table.average_ranks[j])
                ax.plot([lo, hi], [band_y, band_y], color="k", lw=3, alpha=0.6)
                band_y -= 0.35
    ax.set_ylim(band_y - 0.5, 0.5)
    ax.set_title(f"critical difference = {table.critical_difference:.3f}")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
