"""Random operators, states and channels for property suites and tests.

Every generator takes an explicit ``numpy.random.Generator`` so that runs
are reproducible shard by shard.
"""

from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from .operators import DensityMatrix, HermitianOperator, QuantumChannel


def _ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = linalg.qr(_ginibre(dim, dim, rng))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    """d_out × d_in matrix with orthonormal columns (d_out ≥ d_in)."""
    q, r = linalg.qr(_ginibre(d_out, d_in, rng), mode="economic")
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    g = _ginibre(dim, dim, rng)
    return HermitianOperator((g + g.conj().T) / 2)


def random_psd(dim: int, rng: np.random.Generator, rank: Optional[int] = None, shift: float = 0.0) -> HermitianOperator:
    """G G† (+ shift·I) for a Ginibre G of the given rank."""
    g = _ginibre(dim, rank or dim, rng)
    return HermitianOperator(g @ g.conj().T + shift * np.eye(dim))


def random_density_matrix(
    dim: int,
    rng: np.random.Generator,
    rank: Optional[int] = None,
    mix: float = 0.0,
) -> DensityMatrix:
    """Induced-measure random state, optionally mixed with I/d by weight ``mix``."""
    g = _ginibre(dim, rank or dim, rng)
    rho = g @ g.conj().T
    rho /= np.real(np.trace(rho))
    rho = (1.0 - mix) * rho + mix * np.eye(dim) / dim
    return DensityMatrix(rho)


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    return DensityMatrix.pure(_ginibre(dim, 1, rng)[:, 0])


def random_commuting_pair(
    dim: int,
    rng: np.random.Generator,
    floor: float = 0.0,
) -> Tuple[DensityMatrix, DensityMatrix, np.ndarray, np.ndarray]:
    """Two states diagonal in one random basis, with their spectra.

    ``floor`` keeps every probability at or above the given value.
    """
    u = random_unitary(dim, rng)
    p = rng.dirichlet(np.ones(dim)) * (1 - dim * floor) + floor
    q = rng.dirichlet(np.ones(dim)) * (1 - dim * floor) + floor
    rho = DensityMatrix((u * p) @ u.conj().T)
    sigma = DensityMatrix((u * q) @ u.conj().T)
    return rho, sigma, p, q


def random_channel(
    d_in: int,
    d_out: int,
    rng: np.random.Generator,
    n_kraus: Optional[int] = None,
) -> QuantumChannel:
    """Random CPTP map from a Haar isometry into output ⊗ environment."""
    n_kraus = n_kraus or d_in * d_out
    iso = random_isometry(d_in, d_out * n_kraus, rng)
    kraus = tuple(iso[i * d_out:(i + 1) * d_out, :] for i in range(n_kraus))
    return QuantumChannel(kraus)
