"""Search for a degrading map N^{B→C} with N(ρ_B^x) = ρ_C^x."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from ..config.settings import RegionSettings
from ..quantum.operators import (
    CLIP_THRESHOLD,
    QuantumChannel,
    apply_channel,
    channel_from_choi,
    choi_matrix,
    trace_norm,
)
from .channel import CqBroadcastChannel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegradingResult:
    """Best CPTP map found and its worst-case trace-norm residual."""
    channel: QuantumChannel
    residual: float
    degraded: bool
    iterations: int

    @property
    def kraus_rank(self) -> int:
        return self.channel.rank


def _constraint_system(ch: CqBroadcastChannel):
    """Linear constraints on vec(J), J4[i, a, j, b] = ⟨i a|J|j b⟩.

    Rows encode Tr_C J = I_B and Σ_ij ρ_B^x[i, j] J4[i, :, j, :] = ρ_C^x.
    """
    d_b, d_c = ch.d_b, ch.d_c
    rows, rhs = [], []
    eye_c = np.eye(d_c)
    for i in range(d_b):
        for j in range(d_b):
            row = np.zeros((d_b, d_c, d_b, d_c), dtype=complex)
            row[i, :, j, :] = eye_c
            rows.append(row.reshape(-1))
            rhs.append(1.0 if i == j else 0.0)
    for rho_b, rho_c in zip(ch.b_states, ch.c_states):
        for a in range(d_c):
            for b in range(d_c):
                row = np.zeros((d_b, d_c, d_b, d_c), dtype=complex)
                row[:, a, :, b] = rho_b.entries
                rows.append(row.reshape(-1))
                rhs.append(rho_c.entries[a, b])
    return np.array(rows), np.array(rhs, dtype=complex)


def _project_psd(choi: np.ndarray) -> np.ndarray:
    vals, vecs = linalg.eigh((choi + choi.conj().T) / 2)
    return (vecs * np.clip(vals, 0.0, None)) @ vecs.conj().T


def _normalize_tp(choi: np.ndarray, d_b: int, d_c: int) -> Optional[np.ndarray]:
    """(T^{-1/2} ⊗ I) J (T^{-1/2} ⊗ I) with T = Tr_C J; None when T is singular."""
    partial = np.einsum("iaja->ij", choi.reshape(d_b, d_c, d_b, d_c))
    vals, vecs = linalg.eigh((partial + partial.conj().T) / 2)
    if vals[0] <= CLIP_THRESHOLD:
        return None
    inv_sqrt = (vecs * vals ** -0.5) @ vecs.conj().T
    scale = np.kron(inv_sqrt, np.eye(d_c))
    return scale @ choi @ scale


def degrading_residual(ch: CqBroadcastChannel, channel: QuantumChannel) -> float:
    """max_x ‖N(ρ_B^x) − ρ_C^x‖_1."""
    return max(
        trace_norm(apply_channel(channel, rho_b) - rho_c)
        for rho_b, rho_c in zip(ch.b_states, ch.c_states)
    )


def check_degraded(
    ch: CqBroadcastChannel,
    tol: Optional[float] = None,
    opts: Optional[RegionSettings] = None,
) -> DegradingResult:
    """Dykstra alternating projection between the PSD cone and the affine set.

    The affine set holds trace preservation and the data constraints. Each
    PSD iterate is renormalized to an exact CPTP map, and the map with the
    smallest residual is reported whether or not it meets ``tol``.
    """
    opts = opts or RegionSettings()
    tol = opts.degraded_tol if tol is None else tol
    d_b, d_c = ch.d_b, ch.d_c
    size = d_b * d_c

    a, b = _constraint_system(ch)
    a_pinv = linalg.pinv(a)

    def project_affine(choi):
        vec = choi.reshape(-1)
        return (vec - a_pinv @ (a @ vec - b)).reshape(size, size)

    best_channel, best_residual = None, float("inf")

    def consider(choi):
        nonlocal best_channel, best_residual
        normalized = _normalize_tp(choi, d_b, d_c)
        if normalized is None:
            return
        candidate = channel_from_choi(normalized, d_b, d_c)
        residual = degrading_residual(ch, candidate)
        if residual < best_residual:
            best_channel, best_residual = candidate, residual

    # Start from the least-norm affine point; it is often already PSD.
    x = project_affine(np.zeros((size, size), dtype=complex))
    x = (x + x.conj().T) / 2
    consider(_project_psd(x) + CLIP_THRESHOLD * np.eye(size))

    p = np.zeros_like(x)
    q = np.zeros_like(x)
    iterations = 0
    for iterations in range(1, opts.degraded_max_iter + 1):
        if best_residual <= tol * 1e-3:
            break
        y = project_affine(x + p)
        y = (y + y.conj().T) / 2
        p = x + p - y
        x = _project_psd(y + q)
        q = y + q - x
        if iterations % 10 == 0 or iterations == 1:
            consider(x + CLIP_THRESHOLD * np.eye(size))
        step = float(np.linalg.norm(x - y))
        if step < 1e-14:
            break

    if best_channel is None:
        # Fall back to the completely depolarizing map; its residual is still reported.
        consider(np.eye(size, dtype=complex) / d_c)

    degraded = best_residual <= tol
    logger.info(
        f"Degrading map search: residual {best_residual:.3e} after {iterations} iterations "
        f"({'degraded' if degraded else 'not degraded'} at tol {tol:g})"
    )
    return DegradingResult(
        channel=best_channel,
        residual=best_residual,
        degraded=degraded,
        iterations=iterations,
    )


def declared_map_residual(ch: CqBroadcastChannel, channel: QuantumChannel) -> float:
    """Residual of a user-supplied degrading map; used to validate channel specs."""
    if channel.d_in != ch.d_b or channel.d_out != ch.d_c:
        return float("inf")
    return degrading_residual(ch, channel)


def choi_blocks(channel: QuantumChannel) -> np.ndarray:
    """J4[i, a, j, b] view of the Choi matrix, for inspecting recovered maps."""
    return choi_matrix(channel).reshape(channel.d_in, channel.d_out, channel.d_in, channel.d_out)
