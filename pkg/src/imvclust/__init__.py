"""Incomplete multi-view clustering via projected graph learning and
low-rank plus sparse tensor recovery, with spectral clustering and an
experiment harness on top."""

from .clustering import cluster_graph, kmeans, spectral_embed
from .data import (
    IncompleteView,
    MissingMask,
    MultiViewDataset,
    apply_missing,
    build_incomplete_views,
    load_dataset,
    make_synthetic,
    normalize_features,
    save_dataset,
)
from .metrics import accuracy, ari, hungarian, nmi
from .proximal import graph_update_solve, l21_prox, orthogonal_procrustes, soft_threshold
from .solver import FusedGraph, HyperParams, SolverState, Variant, fuse_graph, init_state, iterate, residuals, run
from .tensor import Tensor3, fft_mode3, ifft_mode3, t_product, t_svd, t_transpose, tnn, tubal_shrink

__version__ = "0.1.0"

__all__ = [
    "Tensor3",
    "fft_mode3",
    "ifft_mode3",
    "t_product",
    "t_svd",
    "t_transpose",
    "tnn",
    "tubal_shrink",
    "orthogonal_procrustes",
    "l21_prox",
    "soft_threshold",
    "graph_update_solve",
    "MultiViewDataset",
    "MissingMask",
    "IncompleteView",
    "load_dataset",
    "save_dataset",
    "apply_missing",
    "build_incomplete_views",
    "normalize_features",
    "make_synthetic",
    "HyperParams",
    "Variant",
    "SolverState",
    "FusedGraph",
    "init_state",
    "iterate",
    "residuals",
    "run",
    "fuse_graph",
    "spectral_embed",
    "kmeans",
    "cluster_graph",
    "hungarian",
    "accuracy",
    "nmi",
    "ari",
    "__version__",
]
