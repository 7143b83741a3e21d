"""Third-order tensor algebra: mode-3 FFT, t-product, t-SVD, tensor nuclear
norm, and the tubal-shrinkage proximal operator.

All operations treat a real n1 x n2 x n3 array as a stack of n1 x n2 frontal
slices and work slice-wise in the Fourier domain along the third mode.  The
forward FFT is unnormalized and the inverse carries the 1/n3 factor, the
convention under which the nuclear norm summed over all Fourier slices and
the shrinkage threshold n3*tau are mutually consistent.
"""

import numpy as np

__all__ = [
    "Tensor3",
    "FourierTensor3",
    "InternalConsistencyError",
    "identity_tensor",
    "fft_mode3",
    "ifft_mode3",
    "t_product",
    "t_transpose",
    "t_svd",
    "tnn",
    "tubal_shrink",
]

# Relative imaginary residue allowed when casting an inverse FFT back to real.
_IMAG_TOL = 1e-10
# Singular values below this are treated as zero in rank-sensitive checks.
SINGULAR_TOL = 1e-12


class InternalConsistencyError(RuntimeError):
    """Inverse transform produced imaginary residue above tolerance."""


class Tensor3:
    """Dense real third-order tensor.

    Parameters
    ----------
    data : array_like, shape (n1, n2, n3)
        Real entries; NaN or Inf is rejected.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3-d array, got ndim={arr.ndim}")
        if not np.isfinite(arr).all():
            raise ValueError("tensor entries must be finite")
        self.data = arr

    @property
    def shape(self):
        return self.data.shape

    def frontal(self, i):
        """The i-th frontal slice, an n1 x n2 matrix view."""
        return self.data[:, :, i]

    def copy(self):
        return Tensor3(self.data.copy())

    def norm(self):
        """Frobenius norm."""
        return float(np.linalg.norm(self.data))

    def __add__(self, other):
        return Tensor3(self.data + _raw(other))

    def __sub__(self, other):
        return Tensor3(self.data - _raw(other))

    def __mul__(self, scalar):
        return Tensor3(self.data * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Tensor3(self.data / float(scalar))

    def __neg__(self):
        return Tensor3(-self.data)

    def __repr__(self):
        return f"Tensor3(shape={self.shape})"


class FourierTensor3:
    """Complex companion of :class:`Tensor3` in the mode-3 Fourier domain."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.complex128)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3-d array, got ndim={arr.ndim}")
        if not np.isfinite(arr).all():
            raise ValueError("tensor entries must be finite")
        self.data = arr

    @property
    def shape(self):
        return self.data.shape

    def frontal(self, i):
        return self.data[:, :, i]

    def is_conjugate_symmetric(self, tol=1e-10):
        """True when slice j and slice n3-j (0-based, j >= 1) are conjugates,
        the signature of a transformed real tensor."""
        n3 = self.data.shape[2]
        scale = max(np.abs(self.data).max(), 1.0)
        for j in range(1, n3 // 2 + 1):
            if np.abs(self.data[:, :, j] - self.data[:, :, n3 - j].conj()).max() > tol * scale:
                return False
        return True

    def __repr__(self):
        return f"FourierTensor3(shape={self.shape})"


def _raw(t):
    return t.data if isinstance(t, (Tensor3, FourierTensor3)) else np.asarray(t)


def _as_tensor(t):
    return t if isinstance(t, Tensor3) else Tensor3(t)


def identity_tensor(n, n3):
    """Identity of the t-product: first frontal slice I_n, the rest zero."""
    data = np.zeros((n, n, n3))
    data[:, :, 0] = np.eye(n)
    return Tensor3(data)


def fft_mode3(t):
    """Unnormalized DFT of every tube t(i, j, :)."""
    return FourierTensor3(np.fft.fft(_raw(_as_tensor(t)), axis=2))


def ifft_mode3(ft):
    """Inverse of :func:`fft_mode3` (carries the 1/n3 factor).

    The result of transforming a real tensor is conjugate-symmetric, so the
    inverse is real up to rounding; imaginary residue below 1e-10 relative
    magnitude is dropped and anything larger raises
    :class:`InternalConsistencyError`.
    """
    back = np.fft.ifft(_raw(ft), axis=2)
    return Tensor3(_to_real(back))


def _to_real(arr):
    scale = np.abs(arr).max()
    if scale == 0.0:
        return arr.real.copy()
    resid = np.abs(arr.imag).max()
    if resid > _IMAG_TOL * scale:
        raise InternalConsistencyError(
            f"imaginary residue {resid:.3e} exceeds {_IMAG_TOL:.0e} of scale {scale:.3e}"
        )
    return arr.real.copy()


def t_product(a, b):
    """t-product a * b, computed slice-wise in the Fourier domain.

    Shapes (n1, n2, n3) * (n2, p, n3) -> (n1, p, n3).
    """
    a = _as_tensor(a)
    b = _as_tensor(b)
    n1, n2, n3 = a.shape
    m2, p, m3 = b.shape
    if n2 != m2 or n3 != m3:
        raise ValueError(f"t-product shape mismatch: {a.shape} * {b.shape}")
    af = np.fft.fft(a.data, axis=2)
    bf = np.fft.fft(b.data, axis=2)
    # batch the n3 slice products: (n3, n1, n2) @ (n3, n2, p)
    cf = np.moveaxis(af, 2, 0) @ np.moveaxis(bf, 2, 0)
    back = np.fft.ifft(np.moveaxis(cf, 0, 2), axis=2)
    return Tensor3(_to_real(back))


def t_transpose(t):
    """t-transpose: transpose every frontal slice and reverse slices 2..n3."""
    d = np.transpose(_as_tensor(t).data, (1, 0, 2))
    out = np.empty_like(d)
    out[:, :, 0] = d[:, :, 0]
    out[:, :, 1:] = d[:, :, :0:-1]
    return Tensor3(out)


def _fourier_slice_count(n3):
    # slices 0..n3//2 determine the rest of a real tensor's transform
    return n3 // 2 + 1


def t_svd(t):
    """t-SVD factorization t = U * S * V^T.

    U (n1, n1, n3) and V (n2, n2, n3) are orthogonal tensors and S is
    f-diagonal.  Each Fourier-domain frontal slice is decomposed by a full
    matrix SVD; only the first n3//2 + 1 slices are decomposed explicitly,
    the remainder follow by conjugation of the mirrored slice.

    Returns
    -------
    (U, S, V) : tuple of Tensor3
    """
    t = _as_tensor(t)
    n1, n2, n3 = t.shape
    tf = np.fft.fft(t.data, axis=2)
    uf = np.empty((n1, n1, n3), dtype=np.complex128)
    sf = np.zeros((n1, n2, n3), dtype=np.complex128)
    vf = np.empty((n2, n2, n3), dtype=np.complex128)
    r = min(n1, n2)
    for i in range(_fourier_slice_count(n3)):
        slice_i = tf[:, :, i]
        if i == 0 or 2 * i == n3:
            # self-conjugate slices are real; decompose in real arithmetic so
            # no stray unit phases survive into the inverse transform
            slice_i = slice_i.real
        u, s, vh = np.linalg.svd(slice_i, full_matrices=True)
        uf[:, :, i] = u
        sf[:r, :r, i] = np.diag(s)
        vf[:, :, i] = vh.conj().T
        if 0 < i < n3 - i:
            uf[:, :, n3 - i] = u.conj()
            sf[:r, :r, n3 - i] = np.diag(s)
            vf[:, :, n3 - i] = vh.T
    u_t = ifft_mode3(FourierTensor3(uf))
    s_t = ifft_mode3(FourierTensor3(sf))
    v_t = ifft_mode3(FourierTensor3(vf))
    return u_t, s_t, v_t


def tnn(t):
    """Tensor nuclear norm: sum of the nuclear norms of all Fourier slices."""
    t = _as_tensor(t)
    n3 = t.shape[2]
    tf = np.fft.fft(t.data, axis=2)
    total = 0.0
    for i in range(_fourier_slice_count(n3)):
        # mirrored slice is a conjugate, identical singular values
        weight = 1.0 if i == 0 or 2 * i == n3 else 2.0
        total += weight * float(np.linalg.svd(tf[:, :, i], compute_uv=False).sum())
    return total


def tubal_shrink(d, tau):
    """Proximal map of tau * TNN: minimizer of tau*||L||_tnn + 0.5*||L - d||_F^2.

    Singular values of each Fourier-domain frontal slice are shrunk by
    n3 * tau (the multiplicative form (1 - n3*tau/sigma)_+ applied to each
    sigma), then the result is transformed back and cast to real.
    """
    d = _as_tensor(d)
    if not np.isfinite(tau) or tau <= 0:
        raise ValueError("tau must be finite and positive")
    n1, n2, n3 = d.shape
    thr = n3 * float(tau)
    df = np.fft.fft(d.data, axis=2)
    lf = np.empty_like(df)
    for i in range(_fourier_slice_count(n3)):
        u, s, vh = np.linalg.svd(df[:, :, i], full_matrices=False)
        kept = np.maximum(s - thr, 0.0)
        lf[:, :, i] = (u * kept) @ vh
        if 0 < i < n3 - i:
            lf[:, :, n3 - i] = lf[:, :, i].conj()
    return ifft_mode3(FourierTensor3(lf))
