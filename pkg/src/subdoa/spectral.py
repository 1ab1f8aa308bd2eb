"""Hermitian matrix kernels: covariance, EVD, square root, pseudo-inverse, power iteration."""

from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, IndefiniteMatrixError


class EigenPair(NamedTuple):
    """Eigenvalues sorted descending and the matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian(R):
    """Return ``(R + R^H) / 2`` as a complex array."""
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {R.shape}")
    return 0.5 * (R + R.conj().T)


def sample_covariance(Y):
    """Sample covariance ``(1/L) sum_l y(l) y(l)^H`` of an M x L block.

    Accepts a raw array or a :class:`~subdoa.array_model.SnapshotMatrix`.
    """
    Y = getattr(Y, "samples", Y)
    Y = np.asarray(Y, dtype=complex)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.shape[1] < 1:
        raise ValueError("need at least one snapshot")
    return hermitian(Y @ Y.conj().T / Y.shape[1])


def cross_covariance(Y1, Y2):
    """Sample cross-covariance ``(1/L) sum_l y1(l) y2(l)^H``."""
    Y1 = np.atleast_2d(np.asarray(Y1, dtype=complex))
    Y2 = np.atleast_2d(np.asarray(Y2, dtype=complex))
    if Y1.shape[1] != Y2.shape[1]:
        raise ValueError("blocks must have the same number of snapshots")
    return Y1 @ Y2.conj().T / Y1.shape[1]


def hermitian_evd(R):
    """Full eigendecomposition with eigenvalues in descending order.

    Raises
    ------
    numpy.linalg.LinAlgError
        If LAPACK fails to converge.
    """
    values, vectors = np.linalg.eigh(hermitian(R))
    return EigenPair(values[::-1].copy(), vectors[:, ::-1].copy())


def hermitian_sqrt(R, neg_tol=1e-10):
    """Principal Hermitian square root ``U diag(sqrt(lambda)) U^H`` of a PSD matrix.

    Eigenvalues in ``[-neg_tol * lambda_max, 0)`` are clamped to zero; anything
    more negative raises :class:`IndefiniteMatrixError`.
    """
    values, vectors = hermitian_evd(R)
    top = max(values[0], 0.0)
    if values[-1] < -neg_tol * top or (top == 0.0 and values[-1] < 0.0):
        raise IndefiniteMatrixError(
            f"smallest eigenvalue {values[-1]:.3e} vs largest {top:.3e}")
    root = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * root) @ vectors.conj().T


def pseudo_inverse(A, tol_rel=1e-10):
    """Moore-Penrose pseudo-inverse, zeroing singular values below ``tol_rel * sigma_max``."""
    A = np.asarray(A, dtype=complex)
    if not A.any():
        return np.zeros(A.shape[::-1], dtype=complex)
    return np.linalg.pinv(A, rcond=tol_rel)


def power_iteration(R, x0, tol=1e-10, max_iter=100):
    """Dominant eigenvector of ``R`` by normalized power iteration.

    Repeats ``x <- R x / ||R x||`` until ``1 - |x_n^H x_{n-1}| < tol``.

    Returns
    -------
    v : np.ndarray
        Unit-norm iterate.
    iterations : int
        Number of matrix-vector products performed.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` steps without meeting ``tol``; ``err.result`` holds
        the last iterate and ``err.iterations`` the step count.
    """
    R = np.asarray(R, dtype=complex)
    x = np.asarray(x0, dtype=complex).ravel()
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValueError("x0 must be nonzero")
    x = x / norm
    residual = np.inf
    for n in range(1, max_iter + 1):
        y = R @ x
        norm = np.linalg.norm(y)
        if norm == 0:
            raise ValueError("x0 lies in the null space of R")
        y /= norm
        residual = 1.0 - abs(np.vdot(y, x))
        x = y
        if residual < tol:
            return x, n
    raise ConvergenceError(
        f"power iteration residual {residual:.3e} after {max_iter} steps",
        result=x, iterations=max_iter)
