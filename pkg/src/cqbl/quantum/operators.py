"""Dense finite-dimensional operator algebra.

States, POVMs and channels are immutable wrappers around complex numpy
arrays. Every function here is pure: inputs are never modified and new
objects are returned.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from ..core.errors import (
    InvalidOperatorError,
    PreconditionError,
    ShapeError,
    SingularityError,
)

logger = logging.getLogger(__name__)

HERM_TOL = 1e-10
PSD_TOL = 1e-10
CLIP_THRESHOLD = 1e-12
TRACE_TOL = 1e-10
POVM_TOL = 1e-9
TP_TOL = 1e-8

ArrayLike = Union[np.ndarray, Sequence[Sequence[complex]]]


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix; the carrier for every operator and state."""
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ShapeError(f"Expected a non-empty square matrix, got shape {arr.shape}")
        deviation = float(np.max(np.abs(arr - arr.conj().T)))
        if deviation > HERM_TOL:
            raise InvalidOperatorError(f"Matrix is not Hermitian (max deviation {deviation:.3e})")
        arr = (arr + arr.conj().T) / 2
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def diag(cls, values: Iterable[float]) -> "HermitianOperator":
        return cls(np.diag(np.asarray(list(values), dtype=complex)))

    @classmethod
    def projector(cls, vector: ArrayLike) -> "HermitianOperator":
        """Rank-one projector onto the (normalized) vector."""
        vec = np.asarray(vector, dtype=complex).reshape(-1)
        vec = vec / np.linalg.norm(vec)
        return cls(np.outer(vec, vec.conj()))

    def eigh(self) -> Tuple[np.ndarray, np.ndarray]:
        return linalg.eigh(self.entries)

    def eigvalsh(self) -> np.ndarray:
        return linalg.eigvalsh(self.entries)

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def min_eigenvalue(self) -> float:
        return float(self.eigvalsh()[0])

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        return self.min_eigenvalue() >= -tol

    def expectation(self, other: "HermitianOperator") -> float:
        """Tr[self · other] (real for Hermitian arguments)."""
        if other.dim != self.dim:
            raise ShapeError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        return float(np.real(np.sum(self.entries * other.entries.T)))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        if other.dim != self.dim:
            raise ShapeError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        return HermitianOperator(self.entries + other.entries)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        if other.dim != self.dim:
            raise ShapeError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        return HermitianOperator(self.entries - other.entries)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.entries * float(scalar))

    __rmul__ = __mul__

    def allclose(self, other: "HermitianOperator", atol: float = 1e-9) -> bool:
        return other.dim == self.dim and bool(np.allclose(self.entries, other.entries, atol=atol, rtol=0.0))


@dataclass(frozen=True, eq=False)
class DensityMatrix(HermitianOperator):
    """Positive semidefinite, unit-trace Hermitian operator."""

    def __post_init__(self):
        super().__post_init__()
        min_eig = self.min_eigenvalue()
        if min_eig < -PSD_TOL:
            raise InvalidOperatorError(f"State has negative eigenvalue {min_eig:.3e}")
        trace = self.trace()
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidOperatorError(f"State trace is {trace!r}, expected 1")

    @property
    def op(self) -> HermitianOperator:
        return HermitianOperator(self.entries)

    @classmethod
    def from_operator(cls, op: HermitianOperator, renormalize: bool = False) -> "DensityMatrix":
        entries = op.entries
        if renormalize:
            entries = entries / np.real(np.trace(entries))
        return cls(entries)

    @classmethod
    def pure(cls, vector: ArrayLike) -> "DensityMatrix":
        return cls(HermitianOperator.projector(vector).entries)

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "DensityMatrix":
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        return cls.pure(vec)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, probabilities: Iterable[float]) -> "DensityMatrix":
        return cls(np.diag(np.asarray(list(probabilities), dtype=complex)))


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive-operator valued measure: PSD elements summing to identity."""
    elements: Tuple[HermitianOperator, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        if not elements:
            raise ShapeError("A POVM needs at least one element")
        dim = elements[0].dim
        if any(e.dim != dim for e in elements):
            raise ShapeError("POVM elements must share one dimension")
        for index, element in enumerate(elements):
            if element.min_eigenvalue() < -PSD_TOL:
                raise InvalidOperatorError(f"POVM element {index} is not positive semidefinite")
        total = sum(e.entries for e in elements)
        deviation = float(np.max(np.abs(total - np.eye(dim))))
        if deviation > POVM_TOL:
            raise InvalidOperatorError(f"POVM elements sum to identity only within {deviation:.3e}")
        object.__setattr__(self, "elements", elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    @property
    def size(self) -> int:
        return len(self.elements)

    def probabilities(self, rho: HermitianOperator) -> np.ndarray:
        """Outcome probabilities Tr[ρ Π_i]."""
        return np.array([rho.expectation(e) for e in self.elements])


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map in Kraus form; each Kraus operator is d_out × d_in."""
    kraus: Tuple[np.ndarray, ...]

    def __post_init__(self):
        kraus = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not kraus:
            raise ShapeError("A channel needs at least one Kraus operator")
        shape = kraus[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in kraus):
            raise ShapeError("Kraus operators must share one shape")
        gram = sum(k.conj().T @ k for k in kraus)
        deviation = float(np.max(np.abs(gram - np.eye(shape[1]))))
        if deviation > TP_TOL:
            raise InvalidOperatorError(f"Kraus set is not trace preserving (deviation {deviation:.3e})")
        for k in kraus:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", kraus)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def rank(self) -> int:
        return len(self.kraus)


@dataclass(frozen=True)
class InequalityCheck:
    """Both sides of a numerically evaluated inequality.

    ``direction`` is "<=" when the claim is lhs ≤ rhs and ">=" otherwise;
    ``margin`` is positive when the claim holds with room to spare.
    """
    lhs: float
    rhs: float
    direction: str = "<="

    @property
    def margin(self) -> float:
        if self.direction == "<=":
            return self.rhs - self.lhs
        return self.lhs - self.rhs

    def holds(self, tol: float) -> bool:
        return self.margin >= -tol


def psd_eigh(a: HermitianOperator) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a PSD operator with small negative eigenvalues clipped to zero."""
    vals, vecs = a.eigh()
    if vals[0] < -PSD_TOL:
        raise InvalidOperatorError(f"Operator is not positive semidefinite (min eigenvalue {vals[0]:.3e})")
    return np.clip(vals, 0.0, None), vecs


def spectral_apply(a: HermitianOperator, fn: Callable[[np.ndarray], np.ndarray]) -> HermitianOperator:
    """Apply a real function to the spectrum of a Hermitian operator."""
    vals, vecs = a.eigh()
    return HermitianOperator((vecs * fn(vals)) @ vecs.conj().T)


def tensor(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    return HermitianOperator(np.kron(a.entries, b.entries))


def tensor_all(*ops: HermitianOperator) -> HermitianOperator:
    if not ops:
        raise ShapeError("tensor_all needs at least one factor")
    out = ops[0].entries
    for op in ops[1:]:
        out = np.kron(out, op.entries)
    return HermitianOperator(out)


def partial_trace(op: HermitianOperator, dims: Sequence[int], keep: Iterable[int]) -> HermitianOperator:
    """Reduced operator on the subsystems listed in ``keep`` (kept in increasing order)."""
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != op.dim:
        raise ShapeError(f"Subsystem dims {dims} do not multiply to {op.dim}")
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ShapeError(f"Kept subsystems {keep} out of range for {n} factors")
    rows = list(range(n))
    cols = [i if i not in keep else n + i for i in range(n)]
    out_axes = keep + [n + k for k in keep]
    reduced = np.einsum(op.entries.reshape(dims + dims), rows + cols, out_axes)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return HermitianOperator(np.asarray(reduced).reshape(kept_dim, kept_dim))


def matrix_power(a: HermitianOperator, r: float) -> HermitianOperator:
    """Fractional power of a PSD operator via its eigendecomposition.

    Eigenvalues at or below the clip threshold count as zero, which is
    only allowed for r ≥ 0 (0^0 is taken as 1).
    """
    vals, vecs = psd_eigh(a)
    if r < 0:
        if vals[0] <= CLIP_THRESHOLD:
            raise SingularityError(f"Negative power {r} of a singular operator (min eigenvalue {vals[0]:.3e})")
        powered = vals ** r
    else:
        vals = np.where(vals > CLIP_THRESHOLD, vals, 0.0)
        powered = np.power(vals, r)
    return HermitianOperator((vecs * powered) @ vecs.conj().T)


def trace_norm(a: HermitianOperator) -> float:
    return float(np.sum(np.abs(a.eigvalsh())))


def apply_channel(channel: QuantumChannel, rho: HermitianOperator) -> HermitianOperator:
    """Σ_i K_i ρ K_i†."""
    if rho.dim != channel.d_in:
        raise ShapeError(f"Channel expects input dim {channel.d_in}, got {rho.dim}")
    out = np.zeros((channel.d_out, channel.d_out), dtype=complex)
    for k in channel.kraus:
        out += k @ rho.entries @ k.conj().T
    return HermitianOperator(out)


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel((np.eye(dim, dtype=complex),))


def replacer_channel(sigma: DensityMatrix, d_in: int) -> QuantumChannel:
    """Constant channel ρ ↦ Tr[ρ]·σ with Kraus operators √s_k |v_k⟩⟨j|."""
    vals, vecs = psd_eigh(sigma)
    kraus: List[np.ndarray] = []
    for s, v in zip(vals, vecs.T):
        if s <= CLIP_THRESHOLD:
            continue
        for j in range(d_in):
            k = np.zeros((sigma.dim, d_in), dtype=complex)
            k[:, j] = np.sqrt(s) * v
            kraus.append(k)
    return QuantumChannel(tuple(kraus))


def depolarizing_channel(sigma: DensityMatrix, lam: float) -> QuantumChannel:
    """ρ ↦ (1−λ)ρ + λ Tr[ρ] σ."""
    if not 0.0 <= lam <= 1.0:
        raise PreconditionError(f"Depolarizing parameter must lie in [0, 1], got {lam}")
    dim = sigma.dim
    kraus = [np.sqrt(1.0 - lam) * np.eye(dim, dtype=complex)]
    kraus.extend(np.sqrt(lam) * k for k in replacer_channel(sigma, dim).kraus)
    return QuantumChannel(tuple(kraus))


def choi_matrix(channel: QuantumChannel) -> np.ndarray:
    """Choi matrix J = Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|), input factor first."""
    size = channel.d_in * channel.d_out
    choi = np.zeros((size, size), dtype=complex)
    for k in channel.kraus:
        vec = k.T.reshape(-1)
        choi += np.outer(vec, vec.conj())
    return choi


def channel_from_choi(choi: np.ndarray, d_in: int, d_out: int) -> QuantumChannel:
    """Kraus decomposition of a PSD, trace-preserving Choi matrix."""
    choi = np.asarray(choi, dtype=complex)
    if choi.shape != (d_in * d_out, d_in * d_out):
        raise ShapeError(f"Choi matrix shape {choi.shape} does not match dims ({d_in}, {d_out})")
    vals, vecs = linalg.eigh((choi + choi.conj().T) / 2)
    kraus = [
        np.sqrt(val) * vec.reshape(d_in, d_out).T
        for val, vec in zip(vals, vecs.T)
        if val > CLIP_THRESHOLD
    ]
    if not kraus:
        raise InvalidOperatorError("Choi matrix has no positive part")
    return QuantumChannel(tuple(kraus))


def alt_check(a: HermitianOperator, b: HermitianOperator, r: float) -> InequalityCheck:
    """Both sides of Tr[b^{r/2} a^r b^{r/2}] ≤ Tr[(b^{1/2} a b^{1/2})^r] for r ∈ [0, 1]."""
    if not 0.0 <= r <= 1.0:
        raise PreconditionError(f"Araki-Lieb-Thirring exponent must lie in [0, 1], got {r}")
    if a.dim != b.dim:
        raise ShapeError(f"Dimension mismatch: {a.dim} vs {b.dim}")
    b_half_r = matrix_power(b, r / 2).entries
    lhs = np.real(np.trace(b_half_r @ matrix_power(a, r).entries @ b_half_r))
    b_sqrt = matrix_power(b, 0.5).entries
    sandwich = HermitianOperator(b_sqrt @ a.entries @ b_sqrt)
    rhs = matrix_power(sandwich, r).trace()
    return InequalityCheck(lhs=float(lhs), rhs=float(rhs), direction="<=")
