"""Density-matrix construction and validation.

Random states use a portable, bit-reproducible stream: numpy's Philox4x64-10
counter-based generator keyed with ``(seed, stream)`` and counter 0. Doubles
are ``(next_uint64 >> 11) * 2**-53`` and complex Gaussians come from
Box-Muller on consecutive pairs ``(u1, u2)``::

    z = sqrt(-2 ln(1 - u1)) * exp(2 pi i u2)

Ginibre entries are filled row-major, one ``(u1, u2)`` pair per entry.
"""
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    BadDimension,
    BadProbabilityVector,
    BadRank,
    NotPositive,
    ParamOutOfRange,
    SubmatrixViolation,
    TraceNotOne,
)
from .linalg import as_matrix, check_hermitian, dagger, hermitian_eig, sqrtm_psd

UINT64_MASK = (1 << 64) - 1


def portable_rng(seed, stream=0):
    """Philox4x64-10 generator keyed with ``(seed, stream)``."""
    key = np.array([int(seed) & UINT64_MASK, int(stream) & UINT64_MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_stream(d, sample_id):
    """Stream id of one campaign sample; independent of scheduling."""
    return (int(d) << 32) | int(sample_id)


def complex_normal(rng, shape):
    """Standard complex Gaussians (unit-variance real and imaginary parts) by Box-Muller."""
    shape = (int(shape),) if np.isscalar(shape) else tuple(shape)
    u = rng.random(int(np.prod(shape)) * 2).reshape(shape + (2,))
    radius = np.sqrt(-2.0 * np.log1p(-u[..., 0]))
    return radius * np.exp(2j * np.pi * u[..., 1])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix. Build it through :func:`validate`."""

    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[-1]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class IncoherentState:
    """A state diagonal in the reference basis, stored as its populations."""

    populations: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=np.float64)
        tol = DEFAULT_TOLERANCES.validation
        if p.ndim != 1 or np.any(p < -tol) or np.any(p > 1 + tol) or abs(p.sum() - 1.0) > tol:
            raise BadProbabilityVector(f"not a probability vector: {p}")
        p.setflags(write=False)
        object.__setattr__(self, "populations", p)

    @property
    def dim(self):
        return self.populations.shape[0]

    @property
    def matrix(self):
        return np.diag(self.populations).astype(np.complex128)


def _frozen(M):
    M = np.array(M, dtype=np.complex128)
    M.setflags(write=False)
    return M


def validate(M, tol=DEFAULT_TOLERANCES.validation):
    """Check the density-matrix properties of ``M`` and wrap it.

    Raises the :class:`~qduality.errors.InvalidState` subclass naming the
    first property that fails (Hermiticity, unit trace, positivity, 2x2
    principal submatrix positivity).
    """
    if isinstance(M, DensityMatrix):
        return M
    A = check_hermitian(M, tol)
    if A.ndim != 2:
        raise BadDimension(f"validate expects a single matrix, got shape {A.shape}")
    tr = np.trace(A).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"trace is {tr!r}, expected 1")
    lam_min = hermitian_eig(A).eigenvalues[-1]
    if lam_min < -tol:
        raise NotPositive(f"smallest eigenvalue {lam_min:.3e} < -{tol:.0e}")
    diag = np.real(np.diag(A))
    gap = np.outer(diag, diag) - np.abs(A) ** 2
    np.fill_diagonal(gap, 0.0)
    if gap.min() < -tol:
        j, k = np.unravel_index(np.argmin(gap), gap.shape)
        raise SubmatrixViolation(f"|rho_{j}{k}|^2 exceeds rho_{j}{j} rho_{k}{k} by {-gap.min():.3e}")
    return DensityMatrix(_frozen(A))


def ginibre_states(d, rank, rngs):
    """Stack of ``G G^dagger / Tr(G G^dagger)``, one ``d x rank`` Ginibre ``G`` per generator."""
    G = np.stack([complex_normal(rng, (d, rank)) for rng in rngs])
    rho = G @ dagger(G)
    return rho / np.real(np.trace(rho, axis1=-2, axis2=-1))[:, None, None]


def _check_dim_rank(d, rank):
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {d!r}")
    rank = d if rank is None else rank
    if not isinstance(rank, (int, np.integer)) or not 1 <= rank <= d:
        raise BadRank(f"rank must be in 1..{d}, got {rank!r}")
    return int(d), int(rank)


def random_state(d, rank=None, rng=0):
    """Random density matrix from the Ginibre-induced ensemble.

    ``rank`` defaults to ``d`` (full rank). ``rng`` is either a numpy
    ``Generator`` or an integer seed for :func:`portable_rng`.
    """
    d, rank = _check_dim_rank(d, rank)
    if not isinstance(rng, np.random.Generator):
        rng = portable_rng(rng)
    return validate(ginibre_states(d, rank, [rng])[0])


def random_states(d, n, rank=None, seed=0, start=0):
    """Raw stack of ``n`` campaign samples ``start .. start + n - 1`` (not wrapped)."""
    d, rank = _check_dim_rank(d, rank)
    rngs = [portable_rng(seed, sample_stream(d, i)) for i in range(start, start + n)]
    return ginibre_states(d, rank, rngs)


def pure_state(psi):
    """``|psi><psi|`` for a (not necessarily normalised) vector."""
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return validate(np.outer(psi, psi.conj()))


def basis_state(j, d):
    """``|j><j|`` with a 0-based index."""
    e = np.zeros(d)
    e[j] = 1.0
    return pure_state(e)


def maximally_mixed(d):
    return validate(np.eye(d) / d)


def werner_matrix(w, a):
    """``(1 - w) I/4 + w |psi><psi|`` with ``|psi> = sqrt(a)|0> + sqrt(1 - a)|1>``."""
    if not (0.0 <= w <= 1.0 and 0.0 <= a <= 1.0):
        raise ParamOutOfRange(f"w and a must lie in [0, 1], got w={w!r}, a={a!r}")
    psi = np.zeros(4)
    psi[0] = np.sqrt(a)
    psi[1] = np.sqrt(1.0 - a)
    return ((1.0 - w) / 4.0) * np.eye(4, dtype=np.complex128) + w * np.outer(psi, psi)


def werner_ququart(w, a):
    """Generalized Werner state of a ququart, validated."""
    return validate(werner_matrix(w, a))


def closest_incoherent(rho):
    """Closest incoherent state in Hilbert-Schmidt distance: the diagonal of ``rho``."""
    rho = validate(rho)
    p = np.clip(np.real(np.diag(rho.matrix)), 0.0, 1.0)
    return IncoherentState(p)


def sqrt_diag(rho):
    """Diagonal of the positive square root of ``rho`` (trace ``Tr sqrt(rho) >= 1``)."""
    rho = validate(rho)
    return np.real(np.diag(sqrtm_psd(rho.matrix)))
