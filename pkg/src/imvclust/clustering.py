"""Spectral clustering on a fused similarity graph: symmetric normalized
affinity embedding with row normalization, followed by seeded k-means."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

__all__ = ["SpectralEmbedding", "spectral_embed", "kmeans", "cluster_graph"]

_EIG_TIE_TOL = 1e-12


@dataclass(eq=False)
class SpectralEmbedding:
    """Row-normalized leading eigenvectors of the normalized affinity.

    ``degenerate`` marks an eigenvalue tie across the cut between kept and
    dropped eigenvectors (no usable gap, basis arbitrary within the tied
    space).  ``isolated`` counts zero-degree vertices, which were given
    degree 1 instead of dividing by zero.
    """

    y: np.ndarray
    eigenvalues: np.ndarray
    degenerate: bool = False
    isolated: int = 0


def spectral_embed(h, c):
    """Embed a symmetric nonnegative graph into its c leading eigenvectors.

    Computes D^{-1/2} H D^{-1/2} with D the degree matrix (zero rows get
    degree 1), takes the c eigenvectors of largest eigenvalue, and
    normalizes each nonzero row to unit length.
    """
    h = np.asarray(getattr(h, "h", h), dtype=np.float64)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("graph must be square")
    if c < 2 or c > n:
        raise ValueError(f"cluster count {c} outside [2, {n}]")
    deg = h.sum(axis=1)
    isolated = int((deg == 0).sum())
    deg = np.where(deg > 0, deg, 1.0)
    inv_sqrt = 1.0 / np.sqrt(deg)
    norm_aff = h * inv_sqrt[:, None] * inv_sqrt[None, :]
    # eigh returns ascending eigenvalues; keep the top c
    vals, vecs = sla.eigh(norm_aff, subset_by_index=[n - c, n - 1], check_finite=False)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    degenerate = False
    if c < n:
        below = sla.eigh(
            norm_aff, subset_by_index=[n - c - 1, n - c - 1],
            eigvals_only=True, check_finite=False,
        )[0]
        degenerate = bool(vals[-1] - below <= _EIG_TIE_TOL * max(1.0, abs(vals[0])))
    rows = np.linalg.norm(vecs, axis=1)
    y = vecs / np.where(rows > 0, rows, 1.0)[:, None]
    return SpectralEmbedding(y=y, eigenvalues=vals, degenerate=degenerate, isolated=isolated)


def _kmeans_pp(y, c, rng):
    """k-means++ seeding."""
    n = y.shape[0]
    centers = np.empty((c, y.shape[1]))
    centers[0] = y[rng.integers(n)]
    d2 = ((y - centers[0]) ** 2).sum(axis=1)
    for j in range(1, c):
        total = d2.sum()
        if total <= 0:
            centers[j] = y[rng.integers(n)]
        else:
            centers[j] = y[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((y - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(y, centers, max_iter=100):
    """Lloyd iterations to an assignment fixpoint.

    Empty clusters are re-seeded to the point farthest from its assigned
    center.  Returns (labels, centers, inertia history), inertia evaluated
    after each assignment step.
    """
    n = y.shape[0]
    c = centers.shape[0]
    labels = np.full(n, -1)
    history = []
    for _ in range(max_iter):
        d2 = ((y[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        point_d2 = d2[np.arange(n), new_labels]
        for j in range(c):
            if not (new_labels == j).any():
                far = point_d2.argmax()
                new_labels[far] = j
                point_d2[far] = 0.0
        history.append(float(point_d2.sum()))
        if (new_labels == labels).all():
            break
        labels = new_labels
        for j in range(c):
            members = labels == j
            if members.any():
                centers[j] = y[members].mean(axis=0)
    return labels, centers, history


def kmeans(y, c, restarts=20, seed=0):
    """Seeded k-means with k-means++ restarts; lowest inertia wins, ties
    broken by the lowest restart index."""
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if c > n:
        raise ValueError(f"cannot form {c} clusters from {n} points")
    best_labels, best_inertia = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        centers = _kmeans_pp(y, c, rng)
        labels, _, history = _lloyd(y, centers)
        if history[-1] < best_inertia:
            best_inertia = history[-1]
            best_labels = labels
    return best_labels


def cluster_graph(h, c, restarts=20, seed=0):
    """Spectral embedding followed by k-means; returns predicted labels."""
    emb = spectral_embed(h, c)
    return kmeans(emb.y, c, restarts=restarts, seed=seed)
