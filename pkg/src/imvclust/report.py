"""Figure rendering for run outputs: convergence curves, fused-graph
heatmaps, metric-versus-missing-rate summaries, and the kNN demo panels.
Figures are written next to the delimited files they visualize."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

__all__ = [
    "convergence_figure",
    "graph_heatmap",
    "summary_figure",
    "knn_demo_figure",
]


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def convergence_figure(residual_trace, path, title=None):
    """Semilog plot of both residuals, each normalized by its maximum."""
    r1 = np.array([t[0] for t in residual_trace], dtype=float)
    r2 = np.array([t[1] for t in residual_trace], dtype=float)
    it = np.arange(1, r1.size + 1)
    s1 = r1.max() if r1.size and r1.max() > 0 else 1.0
    s2 = r2.max() if r2.size and r2.max() > 0 else 1.0
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(it, np.maximum(r1 / s1, 1e-16), label="reconstruction residual")
    ax.semilogy(it, np.maximum(r2 / s2, 1e-16), label="tensor split residual")
    ax.set_xlabel("iteration")
    ax.set_ylabel("normalized residual")
    if title:
        ax.set_title(title)
    ax.legend()
    return _save(fig, path)


def graph_heatmap(h, path, title=None):
    """Heatmap of a fused similarity matrix."""
    h = np.asarray(getattr(h, "h", h), dtype=float)
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(h, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, fraction=0.046)
    ax.set_xlabel("sample")
    ax.set_ylabel("sample")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def summary_figure(summary, path):
    """Mean metric with a std band versus missing rate, one line per
    (variant, lambda, theta, k) combination."""
    combos = sorted({(e["variant"], e["lam"], e["theta"], e["k"]) for e in summary})
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5), sharey=True)
    for ax, name in zip(axes, ("acc", "nmi", "ari")):
        for combo in combos:
            rows = [
                e
                for e in summary
                if (e["variant"], e["lam"], e["theta"], e["k"]) == combo
            ]
            rows.sort(key=lambda e: e["missing_rate"])
            rates = [e["missing_rate"] for e in rows]
            means = np.array([e[f"{name}_mean"] for e in rows])
            stds = np.array([e[f"{name}_std"] for e in rows])
            label = f"{combo[0]} λ={combo[1]:g} θ={combo[2]:g} k={combo[3]}"
            ax.errorbar(rates, means, yerr=stds, marker="o", capsize=3, label=label)
        ax.set_xlabel("missing rate")
        ax.set_title(name.upper())
        ax.set_ylim(0, 1.02)
    axes[0].set_ylabel("score")
    axes[0].legend(fontsize=7)
    return _save(fig, path)


def _edge_segments(points, edges):
    return [(points[i], points[j]) for i, j in edges]


def knn_demo_figure(demo, path):
    """Side-by-side panels: full point cloud with its kNN graph, and the
    subsampled cloud with its denser cross-class graph."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.5))
    panels = [
        (demo["points"], demo["labels"], demo["edges_full"], demo["fraction_full"], "full"),
        (demo["sub_points"], demo["sub_labels"], demo["edges_sub"], demo["fraction_sub"], "subsampled"),
    ]
    for ax, (pts, labs, edges, frac, name) in zip(axes, panels):
        if len(edges):
            ax.add_collection(
                LineCollection(_edge_segments(pts, edges), colors="0.7", linewidths=0.5, zorder=1)
            )
        ax.scatter(pts[:, 0], pts[:, 1], c=labs, cmap="tab10", s=14, zorder=2)
        ax.set_title(f"{name}: inter-class edges {100 * frac:.1f}%")
        ax.set_aspect("equal")
    return _save(fig, path)
