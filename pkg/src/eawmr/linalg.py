"""
Dense complex linear algebra for small operators (dimension <= 8).

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Every
function here returns a fresh array and never mutates its inputs.

The Hermitian eigensolver (cyclic Jacobi) and the inverse (Gaussian
elimination with partial pivoting) are implemented directly so that their
stopping rules and tolerances are explicit; ``numpy.linalg`` is used only as
an independent oracle in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionError, NotHermitian, NotPsd, SingularError

TOL_HERM = 1e-10
TOL_TRACE = 1e-9
TOL_PSD = 1e-10
TOL_INV = 1e-9

JACOBI_OFFDIAG_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
_ROOT_NOISE = 64 * np.finfo(float).eps


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` (array-like, DensityMatrix) to a finite 2-D complex array."""
    if isinstance(a, DensityMatrix):
        return a.mat
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a: np.ndarray) -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T.copy()


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``out[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def inverse(a, tol_inv: float = TOL_INV) -> np.ndarray:
    """Invert a square matrix by Gauss-Jordan elimination with partial pivoting.

    Raises
    ------
    SingularError
        If a pivot's magnitude, relative to the largest entry magnitude of
        ``a``, falls below ``tol_inv``.
    """
    a = _square(as_matrix(a))
    n = a.shape[0]
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        raise SingularError("zero matrix is singular")
    aug = np.hstack([a.copy(), np.eye(n, dtype=np.complex128)])
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[pivot, col]) / scale < tol_inv:
            raise SingularError(
                f"pivot {abs(aug[pivot, col]):.3e} at column {col} below "
                f"relative tolerance {tol_inv:g}"
            )
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col and aug[row, col] != 0:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:].copy()


def hermiticity_residual(h) -> float:
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        return float("inf")
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def is_hermitian(h, tol: float = TOL_HERM) -> bool:
    return hermiticity_residual(h) <= tol


def _check_hermitian(h, tol: float) -> np.ndarray:
    h = _square(as_matrix(h))
    res = hermiticity_residual(h)
    if res > tol:
        raise NotHermitian(f"matrix is not Hermitian (residual {res:.3e})")
    return h


def hermitian_eigh(h, tol_herm: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix with cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with ``w`` ascending and ``h ~= v @ diag(w) @ v^dag``.
    Sweeps stop once every off-diagonal magnitude is below 1e-14, or after
    100 sweeps.
    """
    h = _check_hermitian(h, tol_herm)
    n = h.shape[0]
    a = 0.5 * (h + h.conj().T)
    v = np.eye(n, dtype=np.complex128)
    off = ~np.eye(n, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        if n < 2 or np.max(np.abs(a[off])) < JACOBI_OFFDIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                # phase e^{-i phi} on column q makes a[p, q] real positive,
                # then a real rotation zeroes it
                phase = np.conj(apq) / mag
                theta = 0.5 * np.arctan2(2.0 * mag, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                g = np.array([[c, s], [-s * phase, c * phase]], dtype=np.complex128)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order].copy()


def hermitian_eigenvalues(h, tol_herm: float = TOL_HERM) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in ascending order."""
    return hermitian_eigh(h, tol_herm)[0]


def hermitian_sqrt(h, tol_psd: float = TOL_PSD, tol_herm: float = TOL_HERM) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-tol_psd, 0)`` are clamped to zero, as are positive
    eigenvalues at rounding-noise level relative to the spectral radius.
    """
    w, v = hermitian_eigh(h, tol_herm)
    if w.size and w[0] < -tol_psd:
        raise NotPsd(f"matrix has eigenvalue {w[0]:.3e} < -{tol_psd:g}")
    w = np.clip(w, 0.0, None)
    # rounding-level eigenvalues would otherwise turn into ~1e-8 roots
    w[w <= _ROOT_NOISE * max(float(w[-1]), 1.0)] = 0.0
    root = np.sqrt(w)
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size == 0 or not np.all(np.isfinite(amp)):
            raise ValueError("amplitudes must be a non-empty finite vector")
        norm_sq = float(np.vdot(amp, amp).real)
        if abs(norm_sq - 1.0) > TOL_TRACE:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm_sq:.12g})")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        amp = np.zeros(dim, dtype=np.complex128)
        amp[index] = 1.0
        return cls(amp)

    @classmethod
    def two_qubit_family(cls, alpha: float) -> "PureState":
        """``alpha|00> + beta|11>`` with ``beta = sqrt(1 - alpha^2)``."""
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        beta = np.sqrt(max(0.0, 1.0 - alpha * alpha))
        return cls(np.array([alpha, 0.0, 0.0, beta], dtype=np.complex128))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite state."""

    mat: np.ndarray

    def __post_init__(self):
        m = _square(as_matrix(self.mat))
        res = hermiticity_residual(m)
        if res > TOL_HERM:
            raise NotHermitian(f"density matrix not Hermitian (residual {res:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValueError(f"density matrix trace is {tr:.12g}, expected 1")
        w = hermitian_eigenvalues(m)
        if w[0] < -TOL_PSD:
            raise NotPsd(f"density matrix has eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "mat", _frozen(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def normalized(cls, m) -> "DensityMatrix":
        """Build from an unnormalized PSD matrix by dividing out its trace."""
        m = as_matrix(m)
        tr = np.trace(m).real
        if tr <= 0.0:
            raise ValueError("cannot normalize a matrix with non-positive trace")
        m = m / tr
        return cls(0.5 * (m + m.conj().T))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)


MatrixLike = Union[np.ndarray, DensityMatrix]
