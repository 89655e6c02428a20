"""Reference channels with known regions, used by suites, tests and the shipped spec files."""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import PreconditionError
from ..quantum.entropic import binary_entropy
from ..quantum.operators import (
    DensityMatrix,
    QuantumChannel,
    apply_channel,
    depolarizing_channel,
    identity_channel,
    replacer_channel,
    tensor,
)
from .channel import CqBroadcastChannel


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    channel: CqBroadcastChannel
    degrading_map: Optional[QuantumChannel]


def noiseless_bit() -> CatalogEntry:
    """x ↦ |x⟩⟨x| ⊗ |x⟩⟨x|; the boundary is R_B + R_C = ln 2."""
    states = tuple(
        DensityMatrix(tensor(DensityMatrix.basis_state(2, x), DensityMatrix.basis_state(2, x)).entries)
        for x in range(2)
    )
    return CatalogEntry(
        name="noiseless-bit",
        description="Noiseless classical bit delivered to both receivers",
        channel=CqBroadcastChannel(("0", "1"), states, 2, 2),
        degrading_map=identity_channel(2),
    )


def useless_channel() -> CatalogEntry:
    """Every input yields |0⟩⟨0| ⊗ |0⟩⟨0|; the region is {0}."""
    state = DensityMatrix(tensor(DensityMatrix.basis_state(2, 0), DensityMatrix.basis_state(2, 0)).entries)
    return CatalogEntry(
        name="useless",
        description="Constant output state, no information reaches either receiver",
        channel=CqBroadcastChannel(("0", "1"), (state, state), 2, 2),
        degrading_map=replacer_channel(DensityMatrix.basis_state(2, 0), 2),
    )


def _bit_flip(p: float) -> QuantumChannel:
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    return QuantumChannel((np.sqrt(1.0 - p) * np.eye(2, dtype=complex), np.sqrt(p) * flip))


def bsc_broadcast(p1: float = 0.1, cascade: float = 0.1) -> CatalogEntry:
    """Classical degraded BSC pair as a diagonal c-q channel.

    B sees x through BSC(p1); C sees B through a further BSC(cascade), so
    P(b, c | x) = P(b | x) P(c | b) on the basis |b⟩|c⟩.
    """
    for p in (p1, cascade):
        if not 0.0 <= p <= 0.5:
            raise PreconditionError(f"Crossover probabilities must lie in [0, 1/2], got {p}")
    states = []
    for x in range(2):
        joint = np.zeros(4)
        for b in range(2):
            p_b = 1.0 - p1 if b == x else p1
            for c in range(2):
                joint[2 * b + c] = p_b * (1.0 - cascade if c == b else cascade)
        states.append(DensityMatrix.diagonal(joint))
    return CatalogEntry(
        name="bsc-dbc",
        description=f"Binary symmetric degraded broadcast pair, p1={p1:g}, cascade={cascade:g}",
        channel=CqBroadcastChannel(("0", "1"), tuple(states), 2, 2),
        degrading_map=_bit_flip(cascade),
    )


def qubit_pure_dbc(theta: float = np.pi / 4, lam: float = 0.3) -> CatalogEntry:
    """B receives |0⟩ or cos θ|0⟩ + sin θ|1⟩; C receives B through a depolarizing map.

    ρ_B^x is pure, so ρ_BC^x = ρ_B^x ⊗ N(ρ_B^x).
    """
    vectors = [np.array([1.0, 0.0]), np.array([np.cos(theta), np.sin(theta)])]
    degrading = depolarizing_channel(DensityMatrix.maximally_mixed(2), lam)
    states = []
    for v in vectors:
        rho_b = DensityMatrix.pure(v)
        rho_c = DensityMatrix(apply_channel(degrading, rho_b).entries)
        states.append(DensityMatrix(tensor(rho_b, rho_c).entries))
    return CatalogEntry(
        name="qubit-pure",
        description=f"Pure-state qubit receiver B, depolarized copy at C (θ={theta:g}, λ={lam:g})",
        channel=CqBroadcastChannel(("0", "1"), tuple(states), 2, 2),
        degrading_map=degrading,
    )


def swapped_qubit_dbc(theta: float = np.pi / 4, lam: float = 0.3) -> CatalogEntry:
    """qubit_pure_dbc with B and C exchanged; the stronger output sits at C, so it is not degraded."""
    base = qubit_pure_dbc(theta, lam)
    return CatalogEntry(
        name="swapped-qubit",
        description="Role-swapped pure-state qubit channel (not degraded)",
        channel=base.channel.swapped(),
        degrading_map=None,
    )


CATALOG: Dict[str, Callable[[], CatalogEntry]] = {
    "noiseless-bit": noiseless_bit,
    "useless": useless_channel,
    "bsc-dbc": bsc_broadcast,
    "qubit-pure": qubit_pure_dbc,
    "swapped-qubit": swapped_qubit_dbc,
}


def list_channels() -> List[str]:
    return sorted(CATALOG)


def get_channel(name: str) -> CatalogEntry:
    if name not in CATALOG:
        raise KeyError(f"Unknown catalog channel {name!r}; available: {', '.join(list_channels())}")
    return CATALOG[name]()


def bsc_region_oracle(p1: float, cascade: float, betas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Classical boundary of the degraded BSC pair over the auxiliary crossover β.

    R_B = h(β ⋆ p1) − h(p1) and R_C = ln 2 − h(β ⋆ p2) with p2 = p1 ⋆ cascade,
    where a ⋆ b = a(1 − b) + b(1 − a).
    """
    def star(a, b):
        return a * (1.0 - b) + b * (1.0 - a)

    p2 = star(p1, cascade)
    rb = np.array([binary_entropy(star(beta, p1)) - binary_entropy(p1) for beta in betas])
    rc = np.array([np.log(2.0) - binary_entropy(star(beta, p2)) for beta in betas])
    return rb, rc
