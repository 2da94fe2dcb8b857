"""Dense complex-matrix primitives.

Everything here accepts a single ``(d, d)`` matrix or a stack ``(..., d, d)``
and operates on the trailing two axes.
"""
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import BadDimension, ConvergenceError, DimensionMismatch, DomainError, NotHermitian

MAX_SWEEPS = 60


def as_matrix(M):
    """Return ``M`` as a complex128 array of square matrices with d >= 2."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {A.shape}")
    if A.shape[-1] < 2:
        raise BadDimension(f"dimension must be at least 2, got {A.shape[-1]}")
    return A


def dagger(A):
    return np.conj(np.swapaxes(A, -1, -2))


def hermiticity_error(M):
    """Largest entry of ``|M - M^dagger|`` (per matrix for stacks)."""
    A = as_matrix(M)
    return np.max(np.abs(A - dagger(A)), axis=(-2, -1))


def check_hermitian(M, tol=DEFAULT_TOLERANCES.validation):
    A = as_matrix(M)
    err = np.max(hermiticity_error(A))
    if not err <= tol:
        raise NotHermitian(f"matrix is not Hermitian: max |M - M^dagger| = {err:.3e} > {tol:.1e}")
    return A


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and the matching orthonormal eigenvectors.

    ``eigenvectors[..., :, m]`` is the eigenvector of ``eigenvalues[..., m]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values=None):
        """Return ``sum_m values[m] |v_m><v_m|``; ``values`` defaults to the eigenvalues."""
        lam = self.eigenvalues if values is None else values
        V = self.eigenvectors
        return (V * lam[..., None, :]) @ dagger(V)


def _offdiag_norm(A):
    d = A.shape[-1]
    off = A[..., ~np.eye(d, dtype=bool)]
    return np.sqrt(np.sum(np.abs(off) ** 2, axis=-1))


def _jacobi(A, tol):
    """Cyclic complex Jacobi on a stack ``(n, d, d)``; modifies ``A`` in place.

    Each matrix is rotated only while its own off-diagonal norm is above the
    threshold, so a result never depends on what else shares the batch.
    """
    n, d, _ = A.shape
    V = np.broadcast_to(np.eye(d, dtype=np.complex128), A.shape).copy()
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(A) ** 2, axis=(-2, -1))))
    # entries this small cannot move the off-diagonal norm across the threshold
    negligible = 1e-6 * tol * scale
    for _ in range(MAX_SWEEPS):
        active = _offdiag_norm(A) >= tol * scale
        if not active.any():
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[:, p, q]
                mag = np.abs(apq)
                rotate = active & (mag > negligible)
                if not rotate.any():
                    continue
                safe = np.where(rotate, mag, 1.0)
                phase = np.where(rotate, apq / safe, 1.0)
                theta = (A[:, q, q].real - A[:, p, p].real) / (2.0 * safe)
                t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(rotate, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane
                sp = (s * phase)[:, None]
                sm = (s * np.conj(phase))[:, None]
                cc = c[:, None]
                col_p = A[:, :, p].copy()
                col_q = A[:, :, q].copy()
                A[:, :, p] = cc * col_p - sm * col_q
                A[:, :, q] = sp * col_p + cc * col_q
                row_p = A[:, p, :].copy()
                row_q = A[:, q, :].copy()
                A[:, p, :] = cc * row_p - sp * row_q
                A[:, q, :] = sm * row_p + cc * row_q
                A[rotate, p, q] = 0.0
                A[rotate, q, p] = 0.0
                vp = V[:, :, p].copy()
                vq = V[:, :, q].copy()
                V[:, :, p] = cc * vp - sm * vq
                V[:, :, q] = sp * vp + cc * vq
    else:
        if (_offdiag_norm(A) >= tol * scale).any():
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    return np.real(np.diagonal(A, axis1=-2, axis2=-1)).copy(), V


def hermitian_eig(M, tol=DEFAULT_TOLERANCES.eig, herm_tol=DEFAULT_TOLERANCES.validation):
    """Eigendecomposition of a Hermitian matrix (or stack) by cyclic Jacobi.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||M||_F)``. Eigenvalues are returned in descending order.

    Raises
    ------
    NotHermitian
        If ``max |M - M^dagger|`` exceeds ``herm_tol``.
    """
    A = check_hermitian(M, herm_tol)
    batch_shape = A.shape[:-2]
    d = A.shape[-1]
    work = 0.5 * (A + dagger(A))
    work = work.reshape(-1, d, d).copy()
    vals, vecs = _jacobi(work, tol)
    order = np.argsort(-vals, axis=-1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=-1)
    vecs = np.take_along_axis(vecs, order[:, None, :], axis=-1)
    return EigenSystem(vals.reshape(batch_shape + (d,)), vecs.reshape(batch_shape + (d, d)))


def _apply_clamped(f, lam, clamp_tol):
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.asarray(f(lam))
        bad = ~np.isfinite(out)
        # round-off negatives of a positive matrix are evaluated at exactly zero
        near_zero = bad & (lam < 0.0) & (lam >= -clamp_tol)
        if near_zero.any():
            out = np.where(near_zero, f(np.where(near_zero, 0.0, lam)), out)
            bad = ~np.isfinite(out)
    if bad.any():
        raise DomainError(f"function undefined at eigenvalue {np.min(lam[bad]):.3e}")
    return out


def spectral_apply(M, f, clamp_tol=DEFAULT_TOLERANCES.validation, eig=None):
    """Return ``sum_m f(lambda_m) |v_m><v_m|`` for a Hermitian ``M``.

    ``f`` must accept a numpy array. Eigenvalues in ``[-clamp_tol, 0)`` at
    which ``f`` is undefined (nan/inf) are evaluated at 0 instead; anything
    more negative raises :class:`DomainError`. A precomputed
    :class:`EigenSystem` may be passed as ``eig`` to skip the solve.
    """
    if eig is None:
        eig = hermitian_eig(M)
    values = _apply_clamped(f, eig.eigenvalues, clamp_tol)
    return eig.reconstruct(values)


def numerical_zero(lam):
    """Mask of eigenvalues indistinguishable from zero: ``|lam| <= d * eps * max|lam|``.

    The same cutoff ``numpy.linalg.matrix_rank`` uses for singular values.
    """
    lam = np.asarray(lam)
    scale = np.max(np.abs(lam), axis=-1, keepdims=True)
    return np.abs(lam) <= lam.shape[-1] * np.finfo(np.float64).eps * scale


def psd_sqrt_values(lam, clamp_tol=DEFAULT_TOLERANCES.validation):
    """Square roots of PSD eigenvalues; numerically zero ones map to exactly 0.

    Without the cutoff, round-off eigenvalues of order ``1e-16`` would enter
    as ``1e-8``, since ``sqrt`` has unbounded slope at the origin.
    """
    lam = np.where(numerical_zero(lam), 0.0, lam)
    return _apply_clamped(np.sqrt, lam, clamp_tol)


def sqrtm_psd(M, clamp_tol=DEFAULT_TOLERANCES.validation, eig=None):
    """Positive square root of a positive semi-definite matrix.

    Eigenvalues below the numerical-rank cutoff (see :func:`numerical_zero`)
    are treated as exact zeros.
    """
    if eig is None:
        eig = hermitian_eig(M)
    return eig.reconstruct(psd_sqrt_values(eig.eigenvalues, clamp_tol))


def neg_xlogx(x):
    """Elementwise ``-x ln x`` with ``0 ln 0 = 0``; nan for ``x < 0``."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = -x * np.log(x)
    return np.where(x == 0.0, 0.0, out)


def hs_inner(A, B):
    """Hilbert-Schmidt inner product ``Tr(A^dagger B)``."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape[-1] != B.shape[-1]:
        raise DimensionMismatch(f"dimensions differ: {A.shape[-1]} vs {B.shape[-1]}")
    return np.sum(np.conj(A) * B, axis=(-2, -1))


def positivity_coefficient(A, herm_tol=DEFAULT_TOLERANCES.validation):
    """Characteristic-polynomial coefficient ``((Tr A)^2 - Tr(A^2)) / 2``.

    It equals the sum of all 2x2 principal minors of ``A`` and must be
    non-negative for a positive semi-definite matrix.
    """
    A = check_hermitian(A, herm_tol)
    tr = np.real(np.trace(A, axis1=-2, axis2=-1))
    tr_sq = np.real(np.sum(A * np.swapaxes(A, -1, -2), axis=(-2, -1)))
    return 0.5 * (tr * tr - tr_sq)
