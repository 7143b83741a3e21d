"""Closed-form matrix sub-solvers used inside the ADMM loop: orthogonal
Procrustes alignment, the l2,1 proximal operator, elementwise soft
thresholding, and the column-decoupled graph linear solve.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .tensor import Tensor3

__all__ = [
    "ProjectionMatrix",
    "orthogonal_procrustes",
    "l21_prox",
    "soft_threshold",
    "graph_update_solve",
]

# Singular values below this flag a rank-deficient (non-unique) alignment.
RANK_TOL = 1e-10


@dataclass(eq=False)
class ProjectionMatrix:
    """Row-orthonormal k x d projection, w @ w.T = I_k.

    ``degenerate`` is set when the alignment problem that produced it was
    rank deficient, in which case the returned basis is valid but not the
    unique minimizer.
    """

    w: np.ndarray
    degenerate: bool = False

    @property
    def k(self):
        return self.w.shape[0]

    def orthonormality_error(self):
        k = self.w.shape[0]
        return float(np.abs(self.w @ self.w.T - np.eye(k)).max())


def orthogonal_procrustes(f1, f2):
    """Closed-form row-orthonormal alignment of f1 (d x n) onto f2 (k x n).

    Returns W = V U^T from the singular value decomposition
    f1 f2^T = U S V^T restricted to the k leading pairs.  W maximizes the
    alignment term tr(W f1 f2^T) over W W^T = I_k, which makes it the exact
    minimizer of ||f2 - W f1||_F when k = d (ordinary orthogonal
    Procrustes); for k < d it is the standard closed-form surrogate, since
    ||W f1||_F then varies with the row space and the exact minimizer has
    no closed form.

    Rank deficiency of f1 f2^T (singular value below 1e-10 relative to the
    largest) does not raise; the SVD basis completion still yields a valid
    orthonormal W and the result is flagged degenerate.
    """
    f1 = np.asarray(f1, dtype=np.float64)
    f2 = np.asarray(f2, dtype=np.float64)
    if f1.ndim != 2 or f2.ndim != 2 or f1.shape[1] != f2.shape[1]:
        raise ValueError(f"incompatible shapes {f1.shape} and {f2.shape}")
    d, k = f1.shape[0], f2.shape[0]
    if d < k:
        raise ValueError(f"projection target dimension {k} exceeds source dimension {d}")
    m = f1 @ f2.T  # d x k
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    w = vh.T @ u.T
    degenerate = bool(s.size == 0 or s[-1] <= RANK_TOL * max(s[0], 1.0) or s[0] <= RANK_TOL)
    return ProjectionMatrix(w=w, degenerate=degenerate)


def l21_prox(d, eta):
    """Columnwise proximal operator of eta * ||.||_{2,1}.

    Column c of the result is ((||d_c|| - eta) / ||d_c||) d_c when
    ||d_c|| > eta and zero otherwise.
    """
    if not np.isfinite(eta) or eta <= 0:
        raise ValueError("eta must be finite and positive")
    d = np.asarray(d, dtype=np.float64)
    norms = np.linalg.norm(d, axis=0)
    scale = np.zeros_like(norms)
    hit = norms > eta
    scale[hit] = (norms[hit] - eta) / norms[hit]
    return d * scale


def soft_threshold(d, eta):
    """Elementwise shrinkage sign(q) * max(|q| - eta, 0).

    Accepts a matrix, an ndarray of any shape, or a Tensor3 (returned as a
    Tensor3).
    """
    if not np.isfinite(eta) or eta < 0:
        raise ValueError("eta must be finite and nonnegative")
    if isinstance(d, Tensor3):
        return Tensor3(soft_threshold(d.data, eta))
    d = np.asarray(d, dtype=np.float64)
    return np.sign(d) * np.maximum(np.abs(d) - eta, 0.0)


def graph_update_solve(m_mat, present, c):
    """Solve M G D + G = C for G, with D = diag(present) a 0/1 diagonal.

    M is symmetric positive semidefinite (a Gram matrix of projected
    observed features), so the equation decouples by column: present
    columns solve the SPD system (M + I) g_j = c_j through one Cholesky
    factorization shared across columns, and absent columns reduce to
    g_j = c_j.
    """
    m_mat = np.asarray(m_mat, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    present = np.asarray(present, dtype=bool)
    n = m_mat.shape[0]
    if m_mat.shape != (n, n) or c.shape != (n, n) or present.shape != (n,):
        raise ValueError("graph solve expects n x n matrices and a length-n mask")
    if not (np.isfinite(m_mat).all() and np.isfinite(c).all()):
        raise ValueError("graph solve inputs must be finite")
    g = c.copy()
    idx = np.flatnonzero(present)
    if idx.size:
        factor = sla.cho_factor(m_mat + np.eye(n), lower=True, check_finite=False)
        g[:, idx] = sla.cho_solve(factor, c[:, idx], check_finite=False)
    return g
