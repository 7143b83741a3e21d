"""ADMM solver for incomplete multi-view graph learning with projection and
low-rank plus sparse tensor recovery.

Per iteration, in order: projection update (orthogonal Procrustes per view),
graph update (column-decoupled SPD solves per view), reconstruction-error
update (l2,1 prox), stacking of the per-view graphs into the lateral slices
of an n x m x n tensor, low-rank tensor update (tubal shrinkage), sparse
tensor update (soft threshold), then multiplier and penalty updates.  The
loop stops when both the per-view reconstruction residual and the tensor
split residual fall below the tolerance in max norm.

Variants: ``full`` runs everything; ``n`` fixes the projections to the
identity (no dimension reduction); ``b`` drops the sparse tensor (shrinkage
applies to the stacked graph tensor directly); ``o`` does both.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .data import gather_columns, scatter_columns
from .proximal import graph_update_solve, l21_prox, orthogonal_procrustes, soft_threshold
from .tensor import Tensor3, tubal_shrink

__all__ = [
    "HyperParams",
    "Variant",
    "SolverState",
    "FusedGraph",
    "init_state",
    "iterate",
    "residuals",
    "run",
    "fuse_graph",
]


class Variant(enum.Enum):
    """Model variants used in ablation: which components stay enabled."""

    FULL = "full"
    N = "n"  # no projection learning
    B = "b"  # no sparse tensor
    O = "o"  # neither

    @property
    def projects(self):
        return self in (Variant.FULL, Variant.B)

    @property
    def decomposes(self):
        return self in (Variant.FULL, Variant.N)


@dataclass
class HyperParams:
    """Solver weights and schedule.

    lam weights the tensor nuclear norm, theta the sparse tensor, k is the
    latent dimension of the projections.  The penalty starts at rho0 and
    grows by alpha per iteration up to rho_max.
    """

    lam: float = 10.0
    theta: float = 0.1
    k: int = 15
    alpha: float = 1.3
    rho0: float = 1e-3
    rho_max: float = 1e6
    eps: float = 1e-5
    max_iter: int = 300
    w_init: str = "svd"  # or "random"
    init_seed: int = 0

    def __post_init__(self):
        if self.lam <= 0 or self.theta <= 0:
            raise ValueError("lam and theta must be positive")
        if self.alpha <= 1 or self.rho0 <= 0 or self.eps <= 0 or self.max_iter < 1:
            raise ValueError("invalid solver schedule")
        if self.w_init not in ("svd", "random"):
            raise ValueError(f"unknown w_init '{self.w_init}'")


@dataclass(eq=False)
class SolverState:
    """All per-view matrices, the stacked tensors, and the penalty."""

    W: list
    G: list
    E: list
    J1: list
    G_t: np.ndarray
    B_t: np.ndarray
    P_t: np.ndarray
    J2_t: np.ndarray
    rho: float
    iter: int = 0
    converged: bool = False
    residual_trace: list = field(default_factory=list)
    rho_trace: list = field(default_factory=list)
    w_degenerate: list = field(default_factory=list)


@dataclass(eq=False)
class FusedGraph:
    """Symmetric nonnegative similarity matrix fused across views."""

    h: np.ndarray

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.float64)
        if self.h.ndim != 2 or self.h.shape[0] != self.h.shape[1]:
            raise ValueError("fused graph must be square")
        if (self.h < 0).any():
            raise ValueError("fused graph must be nonnegative")
        if not (self.h == self.h.T).all():
            raise ValueError("fused graph must be symmetric")

    @property
    def n(self):
        return self.h.shape[0]


def _init_w(view, k, hp):
    if hp.w_init == "random":
        rng = np.random.default_rng(hp.init_seed)
        q, _ = np.linalg.qr(rng.normal(size=(view.d, k)))
        return q.T.copy()
    # leading left singular vectors of the observed block, transposed
    u, _, _ = np.linalg.svd(view.x_o, full_matrices=k > view.n_v)
    return u[:, :k].T.copy()


def init_state(views, hp, variant=Variant.FULL):
    """Zero-initialize all variables; projections start from the observed
    data's leading singular directions (or the identity for variants
    without projection learning)."""
    m = len(views)
    if m == 0:
        raise ValueError("need at least one view")
    n = views[0].n
    if variant.projects:
        for v, view in enumerate(views):
            if hp.k > view.d:
                raise ValueError(f"latent dimension {hp.k} exceeds view {v} dimension {view.d}")
        ks = [hp.k] * m
        W = [_init_w(view, hp.k, hp) for view in views]
    else:
        ks = [view.d for view in views]
        W = [np.eye(view.d) for view in views]
    zeros_t = lambda: np.zeros((n, m, n))
    return SolverState(
        W=W,
        G=[np.zeros((n, n)) for _ in range(m)],
        E=[np.zeros((k_v, view.n_v)) for k_v, view in zip(ks, views)],
        J1=[np.zeros((k_v, view.n_v)) for k_v, view in zip(ks, views)],
        G_t=zeros_t(),
        B_t=zeros_t(),
        P_t=zeros_t(),
        J2_t=zeros_t(),
        rho=hp.rho0,
        w_degenerate=[False] * m,
    )


def _projected(view, w):
    """w @ x_o and its zero-padded global layout (w @ x_o @ A)."""
    wx = w @ view.x_o
    return wx, scatter_columns(wx, view.index, view.n)


def iterate(state, views, hp, variant=Variant.FULL):
    """One ADMM sweep, mutating and returning the state."""
    m = len(views)
    n = views[0].n
    rho = state.rho

    for v, view in enumerate(views):
        # projection update: align the graph reconstruction residual of the
        # raw features with the error target
        if variant.projects:
            recon = gather_columns(
                scatter_columns(view.x_o, view.index, n) @ state.G[v], view.index
            )
            f1 = view.x_o - recon
            f2 = state.E[v] - state.J1[v] / rho
            proj = orthogonal_procrustes(f1, f2)
            if proj.degenerate and not np.any(f2):
                # cold start: the alignment target is still zero, keep the
                # data-driven initialization instead of an arbitrary basis
                state.w_degenerate[v] = True
            else:
                state.W[v] = proj.w
                state.w_degenerate[v] = proj.degenerate

        # graph update, normal equation solved column-decoupled
        wx, wx_full = _projected(view, state.W[v])
        f3 = wx - state.E[v] + state.J1[v] / rho
        f4 = state.B_t[:, v, :] + state.P_t[:, v, :] - state.J2_t[:, v, :] / rho
        m_mat = wx_full.T @ wx_full
        c = wx_full.T @ scatter_columns(f3, view.index, n) + f4
        state.G[v] = graph_update_solve(m_mat, view.present, c)

        # reconstruction-error update via the l2,1 prox with weight 1/rho
        recon = gather_columns(wx_full @ state.G[v], view.index)
        f6 = wx - recon + state.J1[v] / rho
        state.E[v] = l21_prox(f6, 1.0 / rho)

    # stack the per-view graphs as lateral slices
    state.G_t = np.stack(state.G, axis=1)

    f7 = state.G_t - state.P_t + state.J2_t / rho
    state.B_t = tubal_shrink(Tensor3(f7), hp.lam / rho).data
    if variant.decomposes:
        f8 = state.G_t - state.B_t + state.J2_t / rho
        state.P_t = soft_threshold(f8, hp.theta / rho)

    # multiplier and penalty updates, using the just-updated variables
    r1 = 0.0
    for v, view in enumerate(views):
        wx, wx_full = _projected(view, state.W[v])
        resid = wx - gather_columns(wx_full @ state.G[v], view.index) - state.E[v]
        state.J1[v] = state.J1[v] + rho * resid
        if resid.size:
            r1 = max(r1, float(np.abs(resid).max()))
    split = state.G_t - state.B_t - state.P_t
    state.J2_t = state.J2_t + rho * split
    r2 = float(np.abs(split).max())

    state.rho = min(hp.rho_max, hp.alpha * rho)
    state.iter += 1
    state.residual_trace.append((r1, r2))
    state.rho_trace.append(rho)
    if not (np.isfinite(r1) and np.isfinite(r2)):
        raise FloatingPointError(f"non-finite residuals at iteration {state.iter}")
    return state


def residuals(state, views):
    """Current stopping-rule residuals: the max-norm reconstruction residual
    over views and the max-norm tensor split residual."""
    r1 = 0.0
    for v, view in enumerate(views):
        wx, wx_full = _projected(view, state.W[v])
        resid = wx - gather_columns(wx_full @ state.G[v], view.index) - state.E[v]
        if resid.size:
            r1 = max(r1, float(np.abs(resid).max()))
    r2 = float(np.abs(state.G_t - state.B_t - state.P_t).max())
    return r1, r2


def fuse_graph(b_t):
    """Average the symmetrized absolute lateral slices of the intrinsic
    tensor into the final similarity graph."""
    b_t = np.asarray(b_t, dtype=np.float64)
    m = b_t.shape[1]
    n = b_t.shape[0]
    h = np.zeros((n, n))
    for v in range(m):
        a = np.abs(b_t[:, v, :])
        h += (a + a.T) / 2.0
    return FusedGraph(h=h / m)


def run(views, hp, variant=Variant.FULL):
    """Iterate to convergence or the iteration cap.

    Returns the final state and the fused graph.  Hitting the cap is
    reported through ``state.converged`` rather than raised, since the
    graph may still cluster well.
    """
    state = init_state(views, hp, variant)
    for _ in range(hp.max_iter):
        iterate(state, views, hp, variant)
        r1, r2 = state.residual_trace[-1]
        if max(r1, r2) < hp.eps:
            state.converged = True
            break
    return state, fuse_graph(state.B_t)
