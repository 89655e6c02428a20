"""Classical-quantum broadcast channels and the joint states ω_UXBC they induce."""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from ..core.errors import InvalidOperatorError, ShapeError
from ..quantum.entropic import operator_entropy
from ..quantum.operators import DensityMatrix, HermitianOperator, partial_trace


WEIGHT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CqBroadcastChannel:
    """x ↦ ρ_BC^x on d_B·d_C, with B the stronger receiver."""
    alphabet: Tuple[str, ...]
    states: Tuple[DensityMatrix, ...]
    d_b: int
    d_c: int

    def __post_init__(self):
        alphabet = tuple(str(a) for a in self.alphabet)
        states = tuple(s if isinstance(s, DensityMatrix) else DensityMatrix(np.asarray(s)) for s in self.states)
        if not alphabet:
            raise ShapeError("A channel needs a non-empty input alphabet")
        if len(set(alphabet)) != len(alphabet):
            raise ShapeError(f"Duplicate input symbols in {alphabet}")
        if len(states) != len(alphabet):
            raise ShapeError(f"{len(alphabet)} symbols but {len(states)} output states")
        expected = int(self.d_b) * int(self.d_c)
        for symbol, state in zip(alphabet, states):
            if state.dim != expected:
                raise ShapeError(f"State for {symbol!r} has dim {state.dim}, expected d_B·d_C = {expected}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "d_b", int(self.d_b))
        object.__setattr__(self, "d_c", int(self.d_c))

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @cached_property
    def b_states(self) -> Tuple[DensityMatrix, ...]:
        return tuple(DensityMatrix(partial_trace(s, (self.d_b, self.d_c), [0]).entries) for s in self.states)

    @cached_property
    def c_states(self) -> Tuple[DensityMatrix, ...]:
        return tuple(DensityMatrix(partial_trace(s, (self.d_b, self.d_c), [1]).entries) for s in self.states)

    @cached_property
    def b_entropies(self) -> np.ndarray:
        return np.array([operator_entropy(s) for s in self.b_states])

    @cached_property
    def c_entropies(self) -> np.ndarray:
        return np.array([operator_entropy(s) for s in self.c_states])

    def swapped(self) -> "CqBroadcastChannel":
        """The same channel with the roles of B and C exchanged."""
        states = []
        for state in self.states:
            t = state.entries.reshape(self.d_b, self.d_c, self.d_b, self.d_c)
            states.append(DensityMatrix(t.transpose(1, 0, 3, 2).reshape(self.d_b * self.d_c, -1)))
        return CqBroadcastChannel(self.alphabet, tuple(states), self.d_c, self.d_b)


@dataclass(frozen=True, eq=False)
class JointState:
    """ω_UXBC = Σ_x p(x) ρ_U^x ⊗ |x⟩⟨x| ⊗ ρ_BC^x.

    ``time_shared`` marks witnesses assembled by time sharing, whose
    auxiliary dimension may exceed min{|X|, d_B² + d_C² − 1}.
    """
    weights: np.ndarray
    u_states: Tuple[DensityMatrix, ...]
    channel: CqBroadcastChannel
    time_shared: bool = False

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.size != self.channel.size:
            raise ShapeError(f"{weights.size} weights for an alphabet of size {self.channel.size}")
        if np.any(weights < -WEIGHT_TOL) or abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise InvalidOperatorError(f"Input weights are not a probability vector: {weights}")
        weights = np.clip(weights, 0.0, None)
        weights = weights / weights.sum()
        weights.setflags(write=False)
        u_states = tuple(self.u_states)
        if len(u_states) != self.channel.size:
            raise ShapeError(f"{len(u_states)} auxiliary states for an alphabet of size {self.channel.size}")
        d_u = u_states[0].dim
        if any(s.dim != d_u for s in u_states):
            raise ShapeError("Auxiliary states must share one dimension")
        bound = aux_dim_bound(self.channel)
        if d_u > bound and not self.time_shared:
            raise ShapeError(f"Auxiliary dim {d_u} exceeds min{{|X|, d_B² + d_C² − 1}} = {bound}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "u_states", u_states)

    @property
    def d_u(self) -> int:
        return self.u_states[0].dim

    @property
    def dims(self) -> Tuple[int, int, int, int]:
        return (self.d_u, self.channel.size, self.channel.d_b, self.channel.d_c)

    def density(self) -> DensityMatrix:
        """Dense ω_UXBC, subsystem order U, X, B, C."""
        size = self.channel.size
        total = np.zeros((int(np.prod(self.dims)),) * 2, dtype=complex)
        for x, (p, rho_u, rho_bc) in enumerate(zip(self.weights, self.u_states, self.channel.states)):
            if p == 0:
                continue
            marker = np.zeros((size, size))
            marker[x, x] = 1.0
            total += p * np.kron(rho_u.entries, np.kron(marker, rho_bc.entries))
        return DensityMatrix(total)

    def reduced(self, keep: Sequence[int]) -> HermitianOperator:
        return partial_trace(self.density(), self.dims, keep)

    def _u_mixture(self) -> np.ndarray:
        return sum(p * s.entries for p, s in zip(self.weights, self.u_states))

    def _u_joint(self, outputs: Sequence[DensityMatrix]) -> np.ndarray:
        return sum(p * np.kron(u.entries, o.entries) for p, u, o in zip(self.weights, self.u_states, outputs))

    def i_xb_given_u(self) -> float:
        """I(X;B|U) = S(UB) − S(U) − Σ_x p(x) S(ρ_B^x)."""
        s_ub = operator_entropy(HermitianOperator(self._u_joint(self.channel.b_states)))
        s_u = operator_entropy(HermitianOperator(self._u_mixture()))
        return s_ub - s_u - float(self.weights @ self.channel.b_entropies)

    def _i_u_out(self, outputs: Sequence[DensityMatrix]) -> float:
        s_u = operator_entropy(HermitianOperator(self._u_mixture()))
        s_out = operator_entropy(HermitianOperator(sum(p * o.entries for p, o in zip(self.weights, outputs))))
        s_joint = operator_entropy(HermitianOperator(self._u_joint(outputs)))
        return s_u + s_out - s_joint

    def i_uc(self) -> float:
        return self._i_u_out(self.channel.c_states)

    def i_ub(self) -> float:
        return self._i_u_out(self.channel.b_states)

    def objectives(self) -> Tuple[float, float]:
        return self.i_xb_given_u(), self.i_uc()


def aux_dim_bound(channel: CqBroadcastChannel) -> int:
    return min(channel.size, channel.d_b ** 2 + channel.d_c ** 2 - 1)


def build_joint_state(
    weights: Sequence[float],
    u_states: Sequence[DensityMatrix],
    channel: CqBroadcastChannel,
) -> JointState:
    return JointState(np.asarray(weights, dtype=float), tuple(u_states), channel)


def classical_joint_state(joint_pmf: np.ndarray, channel: CqBroadcastChannel) -> JointState:
    """Joint state with diagonal ρ_U^x read off a pmf P(u, x) (rows u, columns x)."""
    pmf = np.clip(np.asarray(joint_pmf, dtype=float), 0.0, None)
    pmf = pmf / pmf.sum()
    weights = pmf.sum(axis=0)
    d_u = pmf.shape[0]
    u_states = []
    for x in range(channel.size):
        if weights[x] > 0:
            u_states.append(DensityMatrix.diagonal(pmf[:, x] / weights[x]))
        else:
            u_states.append(DensityMatrix.basis_state(d_u, 0))
    return JointState(weights, tuple(u_states), channel)


def region_objectives(omega: JointState) -> Tuple[float, float]:
    """(I(X;B|U)_ω, I(U;C)_ω) in nats."""
    return omega.objectives()


def time_share(first: JointState, second: JointState, lam: float) -> JointState:
    """Witness for λ·first + (1 − λ)·second with U' = V ⊗ U and V a fair-coin flag.

    The auxiliary dimensions are padded to a common size.
    """
    if first.channel is not second.channel:
        raise ShapeError("Time sharing needs witnesses for the same channel")
    if not 0.0 <= lam <= 1.0:
        raise InvalidOperatorError(f"Time-sharing weight must lie in [0, 1], got {lam}")
    d_u = max(first.d_u, second.d_u)

    def padded(state: DensityMatrix) -> np.ndarray:
        out = np.zeros((d_u, d_u), dtype=complex)
        out[:state.dim, :state.dim] = state.entries
        return out

    weights = lam * first.weights + (1.0 - lam) * second.weights
    u_states = []
    for x in range(first.channel.size):
        if weights[x] <= 0:
            u_states.append(DensityMatrix.basis_state(2 * d_u, 0))
            continue
        block = np.zeros((2 * d_u, 2 * d_u), dtype=complex)
        block[:d_u, :d_u] = lam * first.weights[x] * padded(first.u_states[x])
        block[d_u:, d_u:] = (1.0 - lam) * second.weights[x] * padded(second.u_states[x])
        u_states.append(DensityMatrix(block / weights[x]))
    return JointState(weights, tuple(u_states), first.channel, time_shared=True)
