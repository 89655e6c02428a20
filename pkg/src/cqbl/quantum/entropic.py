"""Entropies, divergences and information quantities.

All logarithms are natural; values are in nats.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize

from ..config.settings import OptimizerSettings
from ..core.errors import InvalidOperatorError, PreconditionError, ShapeError
from .operators import (
    CLIP_THRESHOLD,
    DensityMatrix,
    HermitianOperator,
    matrix_power,
    partial_trace,
    psd_eigh,
)
from .random_ensembles import random_unitary

if TYPE_CHECKING:
    from ..broadcast.channel import JointState

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-10
KERNEL_TOL = 1e-12


# ---------------------------------------------------------------------------
# Classical quantities (oracles and building blocks)
# ---------------------------------------------------------------------------

def shannon_entropy(prob: Sequence[float]) -> float:
    p = np.asarray(prob, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def binary_entropy(eps: float) -> float:
    return shannon_entropy([eps, 1.0 - eps])


def classical_relative_entropy(prob_p: Sequence[float], prob_q: Sequence[float]) -> float:
    p = np.asarray(prob_p, dtype=float)
    q = np.asarray(prob_q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def classical_renyi_q(prob_p: Sequence[float], prob_q: Sequence[float], alpha: float) -> float:
    """Σ p^α q^{1−α} with the 0^s = 0 convention for s > 0."""
    p = np.clip(np.asarray(prob_p, dtype=float), 0.0, None)
    q = np.clip(np.asarray(prob_q, dtype=float), 0.0, None)
    return float(np.sum(np.power(p, alpha) * np.power(q, 1.0 - alpha)))


def classical_renyi_divergence(prob_p: Sequence[float], prob_q: Sequence[float], alpha: float) -> float:
    _check_order(alpha)
    q_value = classical_renyi_q(prob_p, prob_q, alpha)
    if q_value <= 0:
        return float("inf")
    return float(np.log(q_value) / (alpha - 1.0))


def classical_mutual_information(joint: np.ndarray) -> float:
    joint = np.asarray(joint, dtype=float)
    return (
        shannon_entropy(joint.sum(axis=1))
        + shannon_entropy(joint.sum(axis=0))
        - shannon_entropy(joint.reshape(-1))
    )


# ---------------------------------------------------------------------------
# Quantum entropies
# ---------------------------------------------------------------------------

def spectral_entropy(eigenvalues: np.ndarray) -> float:
    vals = np.asarray(eigenvalues, dtype=float)
    vals = vals[vals > CLIP_THRESHOLD]
    return float(-np.sum(vals * np.log(vals)))


def operator_entropy(op: HermitianOperator) -> float:
    """−Tr[A ln A] for any PSD A (no normalization required)."""
    return spectral_entropy(psd_eigh(op)[0])


def vn_entropy(rho: HermitianOperator) -> float:
    """Von Neumann entropy −Tr[ρ ln ρ] with 0·ln 0 = 0."""
    return max(operator_entropy(rho), 0.0)


def rel_entropy(rho: HermitianOperator, sigma: HermitianOperator) -> float:
    """Umegaki relative entropy D(ρ‖σ); +inf when supp ρ ⊄ supp σ."""
    _check_pair(rho, sigma)
    r_vals, r_vecs = psd_eigh(rho)
    s_vals, s_vecs = psd_eigh(sigma)
    support = r_vals > SUPPORT_TOL
    support_vecs = r_vecs[:, support]
    sigma_weights = np.real(np.einsum("ji,jk,ki->i", support_vecs.conj(), sigma.entries, support_vecs))
    if np.any(sigma_weights <= KERNEL_TOL):
        return float("inf")
    kernel = s_vals <= KERNEL_TOL
    overlaps = np.abs(s_vecs.conj().T @ support_vecs) ** 2
    if np.any(kernel) and float(overlaps[kernel] @ r_vals[support]) > SUPPORT_TOL:
        return float("inf")
    rho_log_rho = float(np.sum(r_vals[support] * np.log(r_vals[support])))
    log_sigma = np.log(s_vals[~kernel])
    rho_log_sigma = float(log_sigma @ overlaps[~kernel] @ r_vals[support])
    return rho_log_rho - rho_log_sigma


def petz_q(rho: HermitianOperator, sigma: HermitianOperator, alpha: float) -> float:
    """Q_α(ρ‖σ) = Tr[ρ^α σ^{1−α}]."""
    _check_pair(rho, sigma)
    return float(np.real(np.trace(matrix_power(rho, alpha).entries @ matrix_power(sigma, 1.0 - alpha).entries)))


def renyi_rel_entropy(rho: HermitianOperator, sigma: HermitianOperator, alpha: float) -> float:
    """Petz Rényi divergence (1/(α−1)) ln Tr[ρ^α σ^{1−α}] for α ∈ (0, 1)."""
    _check_order(alpha)
    q_value = petz_q(rho, sigma, alpha)
    if q_value <= 0:
        return float("inf")
    return float(np.log(q_value) / (alpha - 1.0))


def mutual_info(rho_ab: HermitianOperator, dims: Sequence[int]) -> float:
    """I(A;B) = D(ρ_AB ‖ ρ_A ⊗ ρ_B), evaluated as S(A) + S(B) − S(AB)."""
    d_a, d_b = _bipartite(rho_ab, dims)
    rho_a = partial_trace(rho_ab, (d_a, d_b), [0])
    rho_b = partial_trace(rho_ab, (d_a, d_b), [1])
    return vn_entropy(rho_a) + vn_entropy(rho_b) - vn_entropy(rho_ab)


def cond_entropy(rho_ab: HermitianOperator, dims: Sequence[int]) -> float:
    """H(A|B) = −D(ρ_AB ‖ I_A ⊗ ρ_B) = S(AB) − S(B)."""
    d_a, d_b = _bipartite(rho_ab, dims)
    return vn_entropy(rho_ab) - vn_entropy(partial_trace(rho_ab, (d_a, d_b), [1]))


def cond_mutual_info(
    rho: HermitianOperator,
    dims: Sequence[int],
    a: Sequence[int],
    b: Sequence[int],
    cond: Sequence[int] = (),
) -> float:
    """I(A;B|C) = S(AC) + S(BC) − S(ABC) − S(C) for disjoint subsystem groups."""
    groups = [set(a), set(b), set(cond)]
    if groups[0] & groups[1] or groups[0] & groups[2] or groups[1] & groups[2]:
        raise ShapeError("Subsystem groups of a conditional mutual information must be disjoint")

    def entropy_of(indices):
        return vn_entropy(partial_trace(rho, dims, indices))

    return (
        entropy_of(list(a) + list(cond))
        + entropy_of(list(b) + list(cond))
        - entropy_of(list(a) + list(b) + list(cond))
        - entropy_of(list(cond))
    )


def cond_mutual_info_cq(omega: "JointState", pivot: str = "U", output: str = "B") -> float:
    """I(A;out|pivot) for the block state ω_UXBC, with {A, pivot} = {X, U}.

    Computed as I(XU;out) − I(pivot;out) from dense reductions of ω.
    """
    if pivot not in ("U", "X") or output not in ("B", "C"):
        raise ShapeError(f"Unsupported conditioning pivot={pivot!r}, output={output!r}")
    d_u, d_x, d_b, d_c = omega.dims
    full = omega.density()
    out_index = 2 if output == "B" else 3
    d_out = d_b if output == "B" else d_c
    pivot_index, d_pivot = (0, d_u) if pivot == "U" else (1, d_x)
    joint = partial_trace(full, omega.dims, [0, 1, out_index])
    both = mutual_info(joint, (d_u * d_x, d_out))
    single = mutual_info(partial_trace(full, omega.dims, [pivot_index, out_index]), (d_pivot, d_out))
    return both - single


# ---------------------------------------------------------------------------
# Projectively measured Rényi divergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasuredRenyiResult:
    """Outcome of the basis search for D^P_α."""
    value: float
    q_value: float
    optimal_basis: Tuple[HermitianOperator, ...]
    basis: np.ndarray
    converged: bool


def _basis_objective(basis: np.ndarray, rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    pr = np.clip(np.real(np.einsum("ji,jk,ki->i", basis.conj(), rho, basis)), 0.0, None)
    ps = np.clip(np.real(np.einsum("ji,jk,ki->i", basis.conj(), sigma, basis)), 0.0, None)
    return float(np.sum(np.power(pr, alpha) * np.power(ps, 1.0 - alpha)))


def _rotate(basis: np.ndarray, i: int, j: int, theta: float, phi: float) -> np.ndarray:
    rotated = basis.copy()
    c, s = np.cos(theta), np.sin(theta)
    phase = np.exp(1j * phi)
    rotated[:, i] = c * basis[:, i] + phase * s * basis[:, j]
    rotated[:, j] = -np.conj(phase) * s * basis[:, i] + c * basis[:, j]
    return rotated


def _givens_descent(
    basis: np.ndarray,
    rho: np.ndarray,
    sigma: np.ndarray,
    alpha: float,
    opts: OptimizerSettings,
) -> Tuple[np.ndarray, float, bool]:
    """Coordinate descent over pairwise rotations until a sweep improves by < givens_tol."""
    dim = basis.shape[0]
    current = _basis_objective(basis, rho, sigma, alpha)
    simplex = np.array([[0.0, 0.0], [0.3, 0.0], [0.0, 0.3]])
    for sweep in range(opts.max_sweeps):
        start = current
        for i in range(dim):
            for j in range(i + 1, dim):
                pair = basis[:, [i, j]]

                def pair_objective(x):
                    return _basis_objective(_rotate(pair, 0, 1, x[0], x[1]), rho, sigma, alpha)

                base = pair_objective((0.0, 0.0))
                res = optimize.minimize(
                    pair_objective,
                    x0=np.zeros(2),
                    method="Nelder-Mead",
                    options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-15, "maxiter": 400},
                )
                if res.fun < base:
                    basis = _rotate(basis, i, j, res.x[0], res.x[1])
        current = _basis_objective(basis, rho, sigma, alpha)
        if start - current < opts.givens_tol:
            logger.debug(f"Givens descent converged after {sweep + 1} sweeps")
            return basis, current, True
    return basis, current, False


def _geometric_mean_basis(rho: HermitianOperator, sigma: HermitianOperator) -> np.ndarray:
    """Eigenbasis of σ^{-1} # ρ, the optimal measurement for the fidelity."""
    s_half = matrix_power(sigma, 0.5).entries
    s_inv_half = matrix_power(sigma, -0.5).entries
    middle = matrix_power(HermitianOperator(s_half @ rho.entries @ s_half), 0.5).entries
    return linalg.eigh((s_inv_half @ middle @ s_inv_half + (s_inv_half @ middle @ s_inv_half).conj().T) / 2)[1]


def measured_renyi(
    rho: HermitianOperator,
    sigma: HermitianOperator,
    alpha: float,
    opts: Optional[OptimizerSettings] = None,
    rng: Optional[np.random.Generator] = None,
) -> MeasuredRenyiResult:
    """Approximate D^P_α by searching rank-one orthonormal measurement bases.

    Candidates are the eigenbases of ρ and σ, the eigenbasis of σ^{-1} # ρ
    and ``opts.restarts`` Haar-random bases; the best ``opts.refine_top`` are
    refined by Givens-rotation coordinate descent.
    """
    _check_order(alpha)
    _check_pair(rho, sigma)
    if sigma.min_eigenvalue() <= CLIP_THRESHOLD:
        raise InvalidOperatorError("Measured Rényi search requires a strictly positive σ")
    opts = opts or OptimizerSettings()
    rng = rng if rng is not None else np.random.default_rng(0)

    candidates: List[np.ndarray] = [rho.eigh()[1], sigma.eigh()[1], _geometric_mean_basis(rho, sigma)]
    candidates.extend(random_unitary(rho.dim, rng) for _ in range(opts.restarts))
    scored = sorted(
        ((_basis_objective(b, rho.entries, sigma.entries, alpha), index) for index, b in enumerate(candidates)),
        key=lambda item: item[0],
    )

    best_basis, best_q, converged = candidates[scored[0][1]], scored[0][0], True
    for _, index in scored[: max(1, opts.refine_top)]:
        basis, q_value, done = _givens_descent(candidates[index], rho.entries, sigma.entries, alpha, opts)
        if q_value < best_q:
            best_basis, best_q, converged = basis, q_value, done

    projectors = tuple(HermitianOperator.projector(best_basis[:, i]) for i in range(rho.dim))
    value = float(np.log(best_q) / (alpha - 1.0)) if best_q > 0 else float("inf")
    return MeasuredRenyiResult(
        value=value,
        q_value=best_q,
        optimal_basis=projectors,
        basis=best_basis,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# Variational formula for Q^P_p
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariationalResult:
    value: float
    generator: HermitianOperator
    converged: bool


def variational_objective(rho: HermitianOperator, sigma: HermitianOperator, p: float, g: HermitianOperator) -> float:
    """(Tr[ρG])^p (Tr[σ G^p̂])^{1−p} for a strictly positive G, p̂ = (1 − 1/p)^{-1}."""
    _check_variational_order(p)
    p_hat = p / (p - 1.0)
    first = rho.expectation(g)
    second = sigma.expectation(matrix_power(g, p_hat))
    return float(first ** p * second ** (1.0 - p))


def _unpack_hermitian(params: np.ndarray, dim: int) -> np.ndarray:
    h = np.zeros((dim, dim), dtype=complex)
    h[np.diag_indices(dim)] = params[:dim]
    upper = np.triu_indices(dim, k=1)
    count = len(upper[0])
    off = params[dim:dim + count] + 1j * params[dim + count:]
    h[upper] = off
    h[(upper[1], upper[0])] = off.conj()
    return h


def _pack_hermitian(h: np.ndarray) -> np.ndarray:
    dim = h.shape[0]
    upper = np.triu_indices(dim, k=1)
    return np.concatenate([np.real(np.diag(h)), np.real(h[upper]), np.imag(h[upper])])


def regularize(rho: HermitianOperator, eps: float) -> HermitianOperator:
    """(1 − ε)ρ + ε I/d when ρ is singular; ρ unchanged otherwise."""
    if rho.min_eigenvalue() > CLIP_THRESHOLD:
        return rho
    return HermitianOperator((1.0 - eps) * rho.entries + eps * np.eye(rho.dim) / rho.dim)


def variational_search(
    rho: HermitianOperator,
    sigma: HermitianOperator,
    p: float,
    opts: Optional[OptimizerSettings] = None,
    rng: Optional[np.random.Generator] = None,
) -> VariationalResult:
    """Minimize the variational functional over G = exp(H), warm-started from the measured basis."""
    _check_variational_order(p)
    _check_pair(rho, sigma)
    opts = opts or OptimizerSettings()
    rho = regularize(rho, opts.regularization)
    sigma = regularize(sigma, opts.regularization)
    p_hat = p / (p - 1.0)
    dim = rho.dim

    measured = measured_renyi(rho, sigma, p, opts, rng)
    basis = measured.basis
    pr = np.clip(np.real(np.einsum("ji,jk,ki->i", basis.conj(), rho.entries, basis)), CLIP_THRESHOLD, None)
    ps = np.clip(np.real(np.einsum("ji,jk,ki->i", basis.conj(), sigma.entries, basis)), CLIP_THRESHOLD, None)
    h0 = (basis * ((1.0 - p) * np.log(ps / pr))) @ basis.conj().T

    def log_objective(params):
        vals, vecs = linalg.eigh(_unpack_hermitian(params, dim))
        vals = vals - vals.max()
        g = (vecs * np.exp(vals)) @ vecs.conj().T
        g_hat = (vecs * np.exp(p_hat * vals)) @ vecs.conj().T
        first = np.real(np.sum(rho.entries * g.T))
        second = np.real(np.sum(sigma.entries * g_hat.T))
        return p * np.log(first) + (1.0 - p) * np.log(second)

    x0 = _pack_hermitian(h0)
    start = log_objective(x0)
    res = optimize.minimize(
        log_objective,
        x0,
        method="BFGS",
        options={"maxiter": opts.variational_max_iter, "gtol": 1e-10},
    )
    best_x, best = (res.x, float(res.fun)) if res.fun < start else (x0, start)
    h = _unpack_hermitian(best_x, dim)
    vals, vecs = linalg.eigh(h)
    generator = HermitianOperator((vecs * np.exp(vals - vals.max())) @ vecs.conj().T)
    logger.debug(f"Variational Q search: start {np.exp(start):.10f}, final {np.exp(best):.10f}")
    return VariationalResult(value=float(np.exp(best)), generator=generator, converged=bool(res.success))


def variational_Q(
    rho: HermitianOperator,
    sigma: HermitianOperator,
    p: float,
    opts: Optional[OptimizerSettings] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """inf_{G>0} (Tr[ρG])^p (Tr[σ G^p̂])^{1−p}, which equals Q^P_p(ρ‖σ)."""
    return variational_search(rho, sigma, p, opts, rng).value


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------

def _check_order(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(f"Rényi order must lie in (0, 1), got {alpha}")


def _check_variational_order(p: float) -> None:
    if not 0.0 < p < 0.5:
        raise PreconditionError(f"Variational order must lie in (0, 1/2), got {p}")


def _check_pair(rho: HermitianOperator, sigma: HermitianOperator) -> None:
    if rho.dim != sigma.dim:
        raise ShapeError(f"Dimension mismatch: {rho.dim} vs {sigma.dim}")


def _bipartite(rho: HermitianOperator, dims: Sequence[int]) -> Tuple[int, int]:
    if len(dims) != 2 or int(dims[0]) * int(dims[1]) != rho.dim:
        raise ShapeError(f"Bipartite dims {tuple(dims)} do not match operator dim {rho.dim}")
    return int(dims[0]), int(dims[1])
