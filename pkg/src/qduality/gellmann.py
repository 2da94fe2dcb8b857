"""Generalized Gell-Mann basis, decompositions, and population/Bloch maps.

The reference basis is always the computational one. Generators are ordered
diagonal first (``j = 1..d-1``), then for each pair ``(k, l)`` with
``k < l`` in lexicographic order the symmetric generator followed by the
antisymmetric one.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import BadDimension, BadProbabilityVector, DimensionMismatch, OutOfRange
from .linalg import check_hermitian, dagger


def diagonal_generator(j, d):
    """Diagonal generator ``Gamma_j`` of dimension ``d`` (``1 <= j <= d - 1``)."""
    if not 1 <= j <= d - 1:
        raise BadDimension(f"diagonal index j={j} outside 1..{d - 1}")
    entries = np.zeros(d)
    entries[:j] = 1.0
    entries[j] = -j
    return np.sqrt(2.0 / (j * (j + 1))) * np.diag(entries).astype(np.complex128)


def symmetric_generator(k, l, d):
    """``|k><l| + |l><k|`` with 1-based ``k < l``."""
    G = np.zeros((d, d), dtype=np.complex128)
    G[k - 1, l - 1] = G[l - 1, k - 1] = 1.0
    return G


def antisymmetric_generator(k, l, d):
    """``-i(|k><l| - |l><k|)`` with 1-based ``k < l``."""
    G = np.zeros((d, d), dtype=np.complex128)
    G[k - 1, l - 1] = -1j
    G[l - 1, k - 1] = 1j
    return G


@dataclass(frozen=True, eq=False)
class GellMannBasis:
    """Generators of the Gell-Mann basis for ``C^{d x d}``.

    ``diagonal``, ``symmetric`` and ``antisymmetric`` are read-only stacks;
    ``pairs[i]`` is the 1-based ``(k, l)`` of ``symmetric[i]`` and
    ``antisymmetric[i]``.
    """

    dim: int
    identity: np.ndarray
    diagonal: np.ndarray
    symmetric: np.ndarray
    antisymmetric: np.ndarray
    pairs: tuple

    @property
    def generators(self):
        """Traceless generators stacked in canonical order, shape ``(d^2 - 1, d, d)``."""
        off = np.stack([self.symmetric, self.antisymmetric], axis=1).reshape(-1, self.dim, self.dim)
        return np.concatenate([self.diagonal, off])

    @property
    def labels(self):
        names = [f"diag_{j}" for j in range(1, self.dim)]
        for k, l in self.pairs:
            names += [f"sym_{k}_{l}", f"anti_{k}_{l}"]
        return names

    def __len__(self):
        return self.dim * self.dim


@lru_cache(maxsize=None)
def build_basis(d):
    """Build (and cache) the Gell-Mann basis of dimension ``d >= 2``."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    pairs = tuple((k, l) for k in range(1, d + 1) for l in range(k + 1, d + 1))
    arrays = [
        np.eye(d, dtype=np.complex128),
        np.stack([diagonal_generator(j, d) for j in range(1, d)]),
        np.stack([symmetric_generator(k, l, d) for k, l in pairs]),
        np.stack([antisymmetric_generator(k, l, d) for k, l in pairs]),
    ]
    for a in arrays:
        a.setflags(write=False)
    return GellMannBasis(d, *arrays, pairs)


@dataclass(frozen=True)
class GmComponents:
    """Coefficients ``<Gamma|X>`` of a Hermitian matrix in the Gell-Mann basis.

    Leading batch axes, if any, are carried on every field.
    """

    dim: int
    trace_part: np.ndarray
    diag_coeffs: np.ndarray
    sym_coeffs: np.ndarray
    antisym_coeffs: np.ndarray

    def vector(self):
        """Traceless coefficients in canonical generator order."""
        off = np.stack([self.sym_coeffs, self.antisym_coeffs], axis=-1)
        off = off.reshape(off.shape[:-2] + (-1,))
        return np.concatenate([self.diag_coeffs, off], axis=-1)


def _basis_for(X, basis):
    d = X.shape[-1]
    if basis is None:
        return build_basis(d)
    if basis.dim != d:
        raise DimensionMismatch(f"basis has dim {basis.dim}, matrix has dim {d}")
    return basis


def _coefficients(stack, X):
    # <G|X> = sum_ij conj(G_ij) X_ij
    return np.einsum("gij,...ij->...g", np.conj(stack), X)


def decompose(X, basis=None, tol=DEFAULT_TOLERANCES.validation):
    """Decompose a Hermitian matrix (or stack) into Gell-Mann components."""
    X = check_hermitian(X, tol)
    basis = _basis_for(X, basis)
    # symmetrising leaves only round-off in the imaginary parts
    X = 0.5 * (X + dagger(X))
    parts = [
        np.ascontiguousarray(_coefficients(stack, X).real)
        for stack in (basis.diagonal, basis.symmetric, basis.antisymmetric)
    ]
    trace_part = np.real(np.trace(X, axis1=-2, axis2=-1))
    return GmComponents(basis.dim, trace_part, *parts)


def reconstruct(c, basis=None):
    """Inverse of :func:`decompose`."""
    if basis is None:
        basis = build_basis(c.dim)
    elif basis.dim != c.dim:
        raise DimensionMismatch(f"basis has dim {basis.dim}, components have dim {c.dim}")
    d = basis.dim
    X = np.asarray(c.trace_part)[..., None, None] / d * basis.identity
    for coeffs, stack in (
        (c.diag_coeffs, basis.diagonal),
        (c.sym_coeffs, basis.symmetric),
        (c.antisym_coeffs, basis.antisymmetric),
    ):
        X = X + 0.5 * np.einsum("...g,gij->...ij", coeffs, stack)
    return X


@lru_cache(maxsize=None)
def _population_map(d):
    """Rows are the diagonals of ``Gamma_j``, so ``bloch = M @ pops``."""
    M = np.stack([np.real(np.diag(diagonal_generator(j, d))) for j in range(1, d)])
    M.setflags(write=False)
    return M


def bloch_from_populations(pops, tol=DEFAULT_TOLERANCES.validation):
    """Diagonal Bloch components ``<Gamma_j|rho>`` from populations ``rho_mm``."""
    p = np.asarray(pops, dtype=np.float64)
    if p.ndim < 1 or p.shape[-1] < 2:
        raise BadDimension(f"need at least two populations, got shape {p.shape}")
    if np.any(p < -tol) or np.any(np.abs(p.sum(axis=-1) - 1.0) > tol):
        raise BadProbabilityVector(f"not a probability vector: {p}")
    return p @ _population_map(p.shape[-1]).T


def populations_from_bloch(diag_coeffs, tol=DEFAULT_TOLERANCES.validation):
    """Populations from the ``d - 1`` diagonal Bloch components.

    Uses the orthogonality of the generators:
    ``rho_mm = 1/d + 1/2 sum_j <Gamma_j|rho> (Gamma_j)_mm``.

    Raises
    ------
    OutOfRange
        If a resulting population leaves ``[0, 1]`` by more than ``tol``.
    """
    b = np.asarray(diag_coeffs, dtype=np.float64)
    if b.ndim < 1 or b.shape[-1] < 1:
        raise BadDimension(f"need at least one Bloch component, got shape {b.shape}")
    d = b.shape[-1] + 1
    p = 1.0 / d + 0.5 * (b @ _population_map(d))
    if np.any(p < -tol) or np.any(p > 1.0 + tol):
        raise OutOfRange(f"Bloch vector gives populations outside [0, 1]: {p}")
    return np.clip(p, 0.0, 1.0)
