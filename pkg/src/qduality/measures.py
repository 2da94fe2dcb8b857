"""Coherence, predictability and entropy quantifiers.

Every function takes a density matrix (a :class:`~qduality.states.DensityMatrix`
or a raw ``(d, d)`` array, which is validated) or a stack ``(n, d, d)`` of
states, which is trusted as-is and evaluated in one pass. Measures with more
than one closed form expose each one through ``variant``; their agreement is
checked by the test-suite rather than assumed.

Functions that need the positive square root accept it as ``sqrt_rho`` so a
caller can share one eigendecomposition between measures.
"""
from typing import NamedTuple

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import DomainError, NotPositive, UnknownMeasure
from .gellmann import decompose
from .linalg import as_matrix, check_hermitian, hermitian_eig, neg_xlogx, spectral_apply, sqrtm_psd
from .states import DensityMatrix, validate


class MeasureValue(NamedTuple):
    name: str
    value: float
    variant: str


def _states(rho):
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    A = as_matrix(rho)
    if A.ndim == 2:
        return validate(A).matrix
    return A


def _populations(rho):
    return np.clip(np.real(np.diagonal(rho, axis1=-2, axis2=-1)), 0.0, None)


def _offdiag(A):
    d = A.shape[-1]
    return A[..., ~np.eye(d, dtype=bool)]


def _pair_sum(x):
    """``sum_{m<n} x_m x_n`` by explicit pairs."""
    d = x.shape[-1]
    m, n = np.triu_indices(d, k=1)
    return np.sum(x[..., m] * x[..., n], axis=-1)


def _offdiag_component_weight(X):
    c = decompose(X)
    return 0.5 * (np.sum(c.sym_coeffs ** 2, axis=-1) + np.sum(c.antisym_coeffs ** 2, axis=-1))


def _sqrt(rho, sqrt_rho):
    return sqrtm_psd(rho) if sqrt_rho is None else np.asarray(sqrt_rho)


def max_linear_entropy(d):
    return (d - 1) / d


def max_vn_entropy(d):
    return float(np.log(d))


# entropies of (possibly non-normalised) population vectors
def linear_entropy_of(p):
    return 1.0 - np.sum(np.asarray(p) ** 2, axis=-1)


def vn_entropy_of(p, tol=DEFAULT_TOLERANCES.validation):
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < -tol):
        raise NotPositive(f"negative entry {p.min():.3e} in population vector")
    return np.sum(neg_xlogx(np.maximum(p, 0.0)), axis=-1)


def linear_entropy(x, tol=DEFAULT_TOLERANCES.validation):
    """``1 - Tr(x^2)`` for a Hermitian ``x``; no trace normalisation is applied."""
    A = check_hermitian(x, tol)
    return 1.0 - np.sum(np.abs(A) ** 2, axis=(-2, -1))


def von_neumann_entropy(x, tol=DEFAULT_TOLERANCES.validation):
    """``-Tr(x ln x)`` with ``0 ln 0 = 0``; natural logarithm.

    Eigenvalues in ``[-tol, 0)`` count as zero, more negative ones raise
    :class:`NotPositive`.
    """
    eig = hermitian_eig(x)
    try:
        values = spectral_apply(x, neg_xlogx, tol, eig=eig)
    except DomainError as exc:
        raise NotPositive(str(exc)) from None
    return np.real(np.trace(values, axis1=-2, axis2=-1))


def c_hs(rho, variant="element"):
    """Hilbert-Schmidt coherence.

    ``element``: ``sum_{j != k} |rho_jk|^2``.
    ``basis``: half the squared norm of the off-diagonal Gell-Mann components.
    """
    A = _states(rho)
    if variant == "element":
        return np.sum(np.abs(_offdiag(A)) ** 2, axis=-1)
    if variant == "basis":
        return _offdiag_component_weight(A)
    raise UnknownMeasure(f"unknown c_hs variant {variant!r}")


def c_wy(rho, variant="sqrt_offdiag", sqrt_rho=None):
    """Wigner-Yanase coherence.

    ``commutator``: ``-1/2 sum_j Tr([sqrt(rho), |j><j|]^2)`` by matrix arithmetic.
    ``sqrt_offdiag``: ``sum_{j != k} |sqrt(rho)_jk|^2``.
    ``sqrt_diag``: ``1 - sum_j sqrt(rho)_jj^2``.
    ``basis``: half the squared norm of the off-diagonal components of ``sqrt(rho)``.
    """
    A = _states(rho)
    S = _sqrt(A, sqrt_rho)
    if variant == "commutator":
        d = A.shape[-1]
        total = 0.0
        for j in range(d):
            P = np.zeros((d, d), dtype=np.complex128)
            P[j, j] = 1.0
            K = S @ P - P @ S
            total = total + np.real(np.trace(K @ K, axis1=-2, axis2=-1))
        return -0.5 * total
    if variant == "sqrt_offdiag":
        return np.sum(np.abs(_offdiag(S)) ** 2, axis=-1)
    if variant == "sqrt_diag":
        return 1.0 - np.sum(np.real(np.diagonal(S, axis1=-2, axis2=-1)) ** 2, axis=-1)
    if variant == "basis":
        return _offdiag_component_weight(S)
    raise UnknownMeasure(f"unknown c_wy variant {variant!r}")


def c_l1(rho):
    """l1-norm coherence ``sum_{j != k} |rho_jk|``."""
    return np.sum(np.abs(_offdiag(_states(rho))), axis=-1)


def p_hs_linear(rho, variant="closed"):
    """Linear Hilbert-Schmidt predictability.

    ``closed``: ``(d-1)/d - 2 sum_{m<n} rho_mm rho_nn``;
    ``entropy``: ``S_l^max - S_l(rho_diag)``.
    """
    A = _states(rho)
    d = A.shape[-1]
    p = _populations(A)
    if variant == "closed":
        return max_linear_entropy(d) - 2.0 * _pair_sum(p)
    if variant == "entropy":
        return max_linear_entropy(d) - linear_entropy_of(p)
    raise UnknownMeasure(f"unknown p_hs_linear variant {variant!r}")


def p_hs_vn(rho, variant="closed"):
    """von Neumann Hilbert-Schmidt predictability.

    ``closed``: ``ln d + sum_n rho_nn ln rho_nn``;
    ``entropy``: ``ln d - S_vn(rho_diag)`` through the matrix entropy.
    """
    A = _states(rho)
    d = A.shape[-1]
    p = _populations(A)
    if variant == "closed":
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0.0, p * np.log(p), 0.0)
        return np.log(d) + np.sum(plogp, axis=-1)
    if variant == "entropy":
        diag = np.zeros(A.shape, dtype=np.complex128)
        idx = np.arange(d)
        diag[..., idx, idx] = p
        return max_vn_entropy(d) - von_neumann_entropy(diag)
    raise UnknownMeasure(f"unknown p_hs_vn variant {variant!r}")


def p_l1(rho):
    """l1-norm predictability ``d - 1 - 2 sum_{j<k} sqrt(rho_jj rho_kk)``."""
    A = _states(rho)
    d = A.shape[-1]
    return (d - 1) - 2.0 * _pair_sum(np.sqrt(_populations(A)))


def wy_bounds(rho, sqrt_rho=None):
    """Upper bounds ``(upsilon, omega)`` on the Wigner-Yanase coherence.

    Both use the diagonal ``s`` of ``sqrt(rho)`` as is, without normalising:
    ``upsilon = S_l(s) + (Tr s)^2 - 1`` and
    ``omega = S_vn(s) + Tr s (Tr s - 1)``.
    """
    A = _states(rho)
    s = np.real(np.diagonal(_sqrt(A, sqrt_rho), axis1=-2, axis2=-1))
    s = np.where((s < 0.0) & (s >= -DEFAULT_TOLERANCES.validation), 0.0, s)
    tr = np.sum(s, axis=-1)
    upsilon = linear_entropy_of(s) + tr * tr - 1.0
    omega = vn_entropy_of(s) + tr * (tr - 1.0)
    return upsilon, omega


def population_bound(rho, which="hs", sqrt_rho=None):
    """``2 sum_{m<n} x_mm x_nn`` with ``x = rho`` (``hs``) or ``sqrt(rho)`` (``wy``)."""
    A = _states(rho)
    if which == "hs":
        x = A
    elif which == "wy":
        x = _sqrt(A, sqrt_rho)
    else:
        raise UnknownMeasure(f"unknown population bound {which!r}")
    return 2.0 * _pair_sum(np.real(np.diagonal(x, axis1=-2, axis2=-1)))


def measure_values(rho):
    """Every measure and formula variant for one state."""
    A = _states(rho)
    S = sqrtm_psd(A)
    upsilon, omega = wy_bounds(A, S)
    out = [MeasureValue("c_hs", c_hs(A, v), v) for v in ("element", "basis")]
    out += [MeasureValue("c_wy", c_wy(A, v, S), v) for v in ("commutator", "sqrt_offdiag", "sqrt_diag", "basis")]
    out.append(MeasureValue("c_l1", c_l1(A), "element"))
    out += [MeasureValue("p_hs_l", p_hs_linear(A, v), v) for v in ("closed", "entropy")]
    out += [MeasureValue("p_hs_vn", p_hs_vn(A, v), v) for v in ("closed", "entropy")]
    out.append(MeasureValue("p_l1", p_l1(A), "closed"))
    out.append(MeasureValue("upsilon", upsilon, "closed"))
    out.append(MeasureValue("omega", omega, "closed"))
    out.append(MeasureValue("bound_pop_hs", population_bound(A, "hs"), "closed"))
    out.append(MeasureValue("bound_pop_wy", population_bound(A, "wy", S), "closed"))
    return [MeasureValue(m.name, float(m.value), m.variant) for m in out]
