"""Clustering evaluation: accuracy under optimal label matching, normalized
mutual information, and the adjusted Rand index, all from the contingency
table of the two labelings."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["ContingencyTable", "contingency_table", "hungarian", "accuracy", "nmi", "ari"]


@dataclass(eq=False)
class ContingencyTable:
    """counts[i, j] = number of samples with predicted cluster i and true
    cluster j."""

    counts: np.ndarray

    @property
    def n(self):
        return int(self.counts.sum())


def _check_pair(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.size != truth.size:
        raise ValueError(f"label vectors differ in length: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise ValueError("label vectors are empty")
    return pred, truth


def contingency_table(pred, truth):
    pred, truth = _check_pair(pred, truth)
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    cp, ct = pi.max() + 1, ti.max() + 1
    counts = np.zeros((cp, ct), dtype=np.int64)
    np.add.at(counts, (pi, ti), 1)
    return ContingencyTable(counts=counts)


def hungarian(cost):
    """Minimum-cost assignment of a square cost matrix.

    Returns the permutation p with p[i] the column assigned to row i,
    minimizing sum_i cost[i, p[i]].
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got {cost.shape}")
    if not np.isfinite(cost).all():
        raise ValueError("cost matrix must be finite")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=np.int64)
    perm[rows] = cols
    return perm


def accuracy(pred, truth):
    """Fraction of samples matched under the best bijection between
    predicted and true cluster labels."""
    table = contingency_table(pred, truth).counts
    size = max(table.shape)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    perm = hungarian(-padded.astype(np.float64))
    matched = padded[np.arange(size), perm].sum()
    return float(matched) / float(table.sum())


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth):
    """Mutual information normalized by the geometric mean of the two
    entropies.  Two single-cluster partitions are identical, value 1; a
    single-cluster partition against a split one has no information,
    value 0."""
    table = contingency_table(pred, truth).counts.astype(np.float64)
    n = table.sum()
    hp = _entropy(table.sum(axis=1))
    ht = _entropy(table.sum(axis=0))
    if hp == 0.0 and ht == 0.0:
        return 1.0
    if hp == 0.0 or ht == 0.0:
        return 0.0
    a = table.sum(axis=1, keepdims=True)
    b = table.sum(axis=0, keepdims=True)
    nz = table > 0
    mi = float((table[nz] / n * np.log(table[nz] * n / (a @ b)[nz])).sum())
    return mi / np.sqrt(hp * ht)


def _pairs(x):
    return x * (x - 1) / 2.0


def ari(pred, truth):
    """Adjusted Rand index by pair counting; 1 when the partitions agree
    (including the degenerate same-single-cluster case)."""
    table = contingency_table(pred, truth).counts.astype(np.float64)
    n = table.sum()
    if n < 2:
        return 1.0
    sum_ij = _pairs(table).sum()
    sum_a = _pairs(table.sum(axis=1)).sum()
    sum_b = _pairs(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / _pairs(n)
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))
