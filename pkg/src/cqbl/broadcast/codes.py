"""Finite-blocklength broadcast codes, decoders and their error statistics."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import AuditSettings
from ..core.errors import ShapeError, SizeLimitError
from ..quantum.entropic import operator_entropy
from ..quantum.operators import (
    CLIP_THRESHOLD,
    DensityMatrix,
    HermitianOperator,
    Povm,
    psd_eigh,
    tensor_all,
)
from ..quantum.random_ensembles import random_unitary
from .channel import CqBroadcastChannel

logger = logging.getLogger(__name__)

DECODER_OBJECTIVES = ("geometric", "average", "min")


@dataclass(frozen=True, eq=False)
class BroadcastCode:
    """Codeword table (m, k) ↦ x^n(m, k) as symbol indices, shape (|M|, |K|, n).

    ``q`` weights the K index; it is uniform for broadcast codes and
    arbitrary for the Fano-type audits.
    """
    codewords: np.ndarray
    q: Optional[np.ndarray] = None

    def __post_init__(self):
        codewords = np.asarray(self.codewords, dtype=int)
        if codewords.ndim != 3 or min(codewords.shape) < 1:
            raise ShapeError(f"Codeword table must have shape (|M|, |K|, n), got {codewords.shape}")
        if np.any(codewords < 0):
            raise ShapeError("Codeword symbols must be non-negative indices")
        q = np.ones(codewords.shape[1]) / codewords.shape[1] if self.q is None else np.asarray(self.q, dtype=float)
        if q.shape != (codewords.shape[1],) or np.any(q < 0) or abs(q.sum() - 1.0) > 1e-10:
            raise ShapeError(f"q must be a probability vector over {codewords.shape[1]} values")
        codewords.setflags(write=False)
        object.__setattr__(self, "codewords", codewords)
        object.__setattr__(self, "q", q)

    @property
    def m_size(self) -> int:
        return self.codewords.shape[0]

    @property
    def k_size(self) -> int:
        return self.codewords.shape[1]

    @property
    def n(self) -> int:
        return self.codewords.shape[2]

    @property
    def rates(self) -> Tuple[float, float]:
        """(R_B, R_C) = (ln|M|/n, ln|K|/n)."""
        return float(np.log(self.m_size) / self.n), float(np.log(self.k_size) / self.n)

    @property
    def weights(self) -> np.ndarray:
        """Joint law of (M, K): uniform M, K ~ q."""
        return np.outer(np.ones(self.m_size) / self.m_size, self.q)

    def check(self, channel: CqBroadcastChannel):
        if int(self.codewords.max()) >= channel.size:
            raise ShapeError(f"Codeword symbol {int(self.codewords.max())} outside alphabet of size {channel.size}")

    def with_codeword(self, m: int, k: int, word: Sequence[int]) -> "BroadcastCode":
        table = self.codewords.copy()
        table[m, k] = word
        return BroadcastCode(table, self.q)

    @classmethod
    def random(cls, alphabet_size: int, n: int, m_size: int, k_size: int, rng: np.random.Generator) -> "BroadcastCode":
        return cls(rng.integers(0, alphabet_size, size=(m_size, k_size, n)))

    @classmethod
    def from_index(cls, index: int, alphabet_size: int, n: int, m_size: int, k_size: int, q=None) -> "BroadcastCode":
        """The index-th table in lexicographic order of all |X|^{n·|M|·|K|} tables."""
        shape = (m_size, k_size, n)
        digits = np.unravel_index(index, (alphabet_size,) * int(np.prod(shape)))
        return cls(np.array(digits).reshape(shape), q)


@dataclass(frozen=True, eq=False)
class DecoderPair:
    """POVMs over M on B^n and over K on C^n."""
    pi_b: Povm
    pi_c: Povm


@dataclass(frozen=True, eq=False)
class CodeStateEnsemble:
    """Blocks (m, k) ↦ (weight, ⊗_i ρ^{x_i(m,k)}) on one receiver's n-letter system."""
    weights: np.ndarray
    states: Tuple[Tuple[DensityMatrix, ...], ...]

    @property
    def m_size(self) -> int:
        return self.weights.shape[0]

    @property
    def k_size(self) -> int:
        return self.weights.shape[1]

    @property
    def dim(self) -> int:
        return self.states[0][0].dim

    def grouped(self, by: str = "M") -> Tuple[np.ndarray, List[DensityMatrix]]:
        """Marginal law and conditional states ρ^m (by="M") or ρ^k (by="K")."""
        weights = self.weights if by == "M" else self.weights.T
        blocks = self.states if by == "M" else tuple(zip(*self.states))
        probs = weights.sum(axis=1)
        states = []
        for p, row_weights, row_states in zip(probs, weights, blocks):
            if p <= 0:
                states.append(row_states[0])
                continue
            mixture = sum(w * s.entries for w, s in zip(row_weights, row_states)) / p
            states.append(DensityMatrix(mixture))
        return probs, states

    def average_state(self) -> DensityMatrix:
        probs, states = self.grouped("M")
        return DensityMatrix(sum(p * s.entries for p, s in zip(probs, states)))


def _check_sizes(d: int, n: int, opts: AuditSettings):
    if n > opts.max_blocklength:
        raise SizeLimitError(f"Blocklength {n} exceeds the limit {opts.max_blocklength}")
    if d ** n > opts.dense_limit:
        raise SizeLimitError(f"Dense dimension {d}^{n} exceeds the limit {opts.dense_limit}")


def code_ensemble(
    ch: CqBroadcastChannel,
    code: BroadcastCode,
    receiver: str = "B",
    opts: Optional[AuditSettings] = None,
) -> CodeStateEnsemble:
    """ρ_{MK R^n} of a code at receiver R ∈ {B, C}."""
    opts = opts or AuditSettings()
    code.check(ch)
    letters = ch.b_states if receiver == "B" else ch.c_states
    d = ch.d_b if receiver == "B" else ch.d_c
    _check_sizes(d, code.n, opts)
    cache = {}
    rows = []
    for m in range(code.m_size):
        row = []
        for k in range(code.k_size):
            word = tuple(int(x) for x in code.codewords[m, k])
            if word not in cache:
                cache[word] = DensityMatrix(tensor_all(*(letters[x] for x in word)).entries)
            row.append(cache[word])
        rows.append(tuple(row))
    return CodeStateEnsemble(weights=code.weights, states=tuple(rows))


def code_mutual_info(ens: CodeStateEnsemble, over: str = "M", opts: Optional[AuditSettings] = None) -> float:
    """I(M;R^n) (or I(K;R^n) with over="K") from the block-diagonal form.

    I = S(Σ_m p_m ρ^m) − Σ_m p_m S(ρ^m).
    """
    opts = opts or AuditSettings()
    if ens.dim > opts.dense_limit:
        raise SizeLimitError(f"Dense dimension {ens.dim} exceeds the limit {opts.dense_limit}")
    probs, states = ens.grouped(over)
    average = HermitianOperator(sum(p * s.entries for p, s in zip(probs, states)))
    value = operator_entropy(average) - float(sum(p * operator_entropy(s) for p, s in zip(probs, states) if p > 0))
    return max(value, 0.0)


def code_mutual_info_c(ch: CqBroadcastChannel, code: BroadcastCode, opts: Optional[AuditSettings] = None) -> float:
    """I(K;C^n) of a broadcast code."""
    return code_mutual_info(code_ensemble(ch, code, "C", opts), over="K", opts=opts)


# ---------------------------------------------------------------------------
# Decoders
# ---------------------------------------------------------------------------

def pgm_decoder(states: Sequence[HermitianOperator], weights: Sequence[float]) -> Povm:
    """Square-root measurement Π^m = S^{-1/2} w_m ρ_m S^{-1/2}, S = Σ_m w_m ρ_m.

    The inverse root is taken on the support of S; the projector onto its
    kernel is split across the elements in proportion to the weights.
    """
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise ShapeError("PGM states must share one dimension")
    total = HermitianOperator(sum(w * s.entries for w, s in zip(weights, states)))
    vals, vecs = psd_eigh(total)
    support = vals > CLIP_THRESHOLD * max(1.0, float(vals.max()))
    inv_sqrt = np.zeros_like(vals)
    inv_sqrt[support] = vals[support] ** -0.5
    root = (vecs * inv_sqrt) @ vecs.conj().T
    kernel = (vecs[:, ~support]) @ vecs[:, ~support].conj().T
    elements = []
    for w, s in zip(weights, states):
        element = root @ (w * s.entries) @ root + w * kernel
        elements.append(HermitianOperator((element + element.conj().T) / 2))
    # Completeness holds up to rounding; push the defect into the first element.
    defect = np.eye(dim) - sum(e.entries for e in elements)
    elements[0] = HermitianOperator(elements[0].entries + (defect + defect.conj().T) / 2)
    return Povm(tuple(elements))


def _success_vector(basis: np.ndarray, labels: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Tr[ρ_m Π^m] for the projective decoder {Σ_{j: labels[j]=m} |v_j⟩⟨v_j|}."""
    overlaps = np.real(np.einsum("ji,mjk,ki->mi", basis.conj(), states, basis))
    size = states.shape[0]
    return np.array([overlaps[m, labels == m].sum() for m in range(size)])


def _decoder_score(success: np.ndarray, weights: np.ndarray, objective: str) -> float:
    if objective == "average":
        return float(weights @ success)
    if objective == "min":
        return float(success[weights > 0].min())
    with np.errstate(divide="ignore"):
        logs = np.log(np.clip(success, 0.0, None))
    mask = weights > 0
    return float(np.sum(weights[mask] * logs[mask]))


def _assign(basis: np.ndarray, states: np.ndarray, weights: np.ndarray) -> np.ndarray:
    overlaps = np.real(np.einsum("ji,mjk,ki->mi", basis.conj(), states, basis))
    return np.argmax(weights[:, None] * overlaps, axis=0)


def local_search_decoder(
    states: Sequence[HermitianOperator],
    weights: Sequence[float],
    objective: str = "geometric",
    steps: int = 200,
    rng: Optional[np.random.Generator] = None,
) -> Povm:
    """Projective decoder improved by Givens rotations and label reassignment.

    Starts from the best of several structured bases (computational, the
    eigenbasis of Σ w_m ρ_m and the Helstrom-type eigenbases of
    w_a ρ_a − Σ_{b≠a} w_b ρ_b), then accepts random pairwise rotations and
    single-vector relabelings that improve the objective.
    """
    if objective not in DECODER_OBJECTIVES:
        raise ValueError(f"Unknown decoder objective {objective!r}; expected one of {DECODER_OBJECTIVES}")
    rng = rng if rng is not None else np.random.default_rng(0)
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    stack = np.array([s.entries for s in states])
    dim = stack.shape[1]
    size = stack.shape[0]

    starts = [np.eye(dim, dtype=complex), psd_eigh(HermitianOperator(np.tensordot(weights, stack, axes=1)))[1]]
    for a in range(size):
        others = np.tensordot(np.delete(weights, a), np.delete(stack, a, axis=0), axes=1)
        starts.append(np.linalg.eigh(weights[a] * stack[a] - others / max(size - 1, 1))[1])

    def score(basis, labels):
        return _decoder_score(_success_vector(basis, labels, stack), weights, objective)

    best_basis, best_labels, best = None, None, -np.inf
    for basis in starts:
        labels = _assign(basis, stack, weights)
        value = score(basis, labels)
        if best_basis is None or value > best:
            best_basis, best_labels, best = basis, labels, value

    for _ in range(steps):
        if dim > 1 and rng.random() < 0.7:
            i, j = rng.choice(dim, size=2, replace=False)
            theta = rng.normal(scale=0.3)
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            trial = best_basis.copy()
            c, s = np.cos(theta), np.sin(theta)
            trial[:, i] = c * best_basis[:, i] + phase * s * best_basis[:, j]
            trial[:, j] = -np.conj(phase) * s * best_basis[:, i] + c * best_basis[:, j]
            trial_labels = _assign(trial, stack, weights) if rng.random() < 0.5 else best_labels
        else:
            trial = best_basis
            trial_labels = best_labels.copy()
            trial_labels[rng.integers(dim)] = rng.integers(size)
        value = score(trial, trial_labels)
        if value > best:
            best_basis, best_labels, best = trial, trial_labels, value

    elements = []
    for m in range(size):
        cols = best_basis[:, best_labels == m]
        elements.append(HermitianOperator(cols @ cols.conj().T))
    return Povm(tuple(elements))


def random_projective_decoder(dim: int, size: int, rng: np.random.Generator) -> Povm:
    """Haar basis with uniformly random labels; used to stress the criterion ordering."""
    basis = random_unitary(dim, rng)
    labels = rng.integers(0, size, size=dim)
    return Povm(tuple(HermitianOperator(basis[:, labels == m] @ basis[:, labels == m].conj().T) for m in range(size)))


def pgm_decoders(ch: CqBroadcastChannel, code: BroadcastCode, opts: Optional[AuditSettings] = None) -> DecoderPair:
    """PGMs for M on B^n and for K on C^n, built on the averaged conditional states."""
    probs_b, states_b = code_ensemble(ch, code, "B", opts).grouped("M")
    probs_c, states_c = code_ensemble(ch, code, "C", opts).grouped("K")
    return DecoderPair(pi_b=pgm_decoder(states_b, probs_b), pi_c=pgm_decoder(states_c, probs_c))


def local_search_decoders(
    ch: CqBroadcastChannel,
    code: BroadcastCode,
    objective: str = "min",
    steps: int = 200,
    rng: Optional[np.random.Generator] = None,
    opts: Optional[AuditSettings] = None,
) -> DecoderPair:
    rng = rng if rng is not None else np.random.default_rng(0)
    probs_b, states_b = code_ensemble(ch, code, "B", opts).grouped("M")
    probs_c, states_c = code_ensemble(ch, code, "C", opts).grouped("K")
    return DecoderPair(
        pi_b=local_search_decoder(states_b, probs_b, objective, steps, rng),
        pi_c=local_search_decoder(states_c, probs_c, objective, steps, rng),
    )


# ---------------------------------------------------------------------------
# Error statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorStats:
    """Error criteria of a code/decoder pair.

    ``p_max`` and ``p_avg`` use the joint success Tr[ρ_{B^nC^n}(Π_B^m ⊗ Π_C^k)];
    ``geo_avg_success`` is the weighted geometric mean of the receiver-B
    successes Tr[ρ_{B^n} Π_B^m].
    """
    p_max: float
    p_avg: float
    geo_avg_success: float
    joint_min: float
    joint_geo: float
    joint_avg: float
    b_min: float
    b_avg: float
    c_min: float
    c_avg: float

    def ordering_holds(self, tol: float = 1e-12) -> bool:
        return (
            self.joint_min <= self.joint_geo + tol
            and self.joint_geo <= self.joint_avg + tol
            and self.b_min <= self.geo_avg_success + tol
            and self.geo_avg_success <= self.b_avg + tol
            and self.b_min >= self.joint_min - tol
            and self.c_min >= self.joint_min - tol
        )


def _geometric_mean(values: np.ndarray, weights: np.ndarray) -> float:
    mask = weights > 0
    if np.any(values[mask] <= 0):
        return 0.0
    return float(np.exp(np.sum(weights[mask] * np.log(values[mask]))))


def _joint_success(ch: CqBroadcastChannel, word: Sequence[int], pi_b: np.ndarray, pi_c: np.ndarray) -> float:
    """Tr[(⊗_i ρ_BC^{x_i})(Π_B ⊗ Π_C)] contracted letter by letter."""
    n = len(word)
    d_b, d_c = ch.d_b, ch.d_c
    b, c, b_, c_ = (list(range(j * n, (j + 1) * n)) for j in range(4))
    operands = []
    for i, x in enumerate(word):
        operands.extend([ch.states[x].entries.reshape(d_b, d_c, d_b, d_c), [b[i], c[i], b_[i], c_[i]]])
    operands.extend([pi_b.reshape((d_b,) * (2 * n)), b_ + b])
    operands.extend([pi_c.reshape((d_c,) * (2 * n)), c_ + c])
    return float(np.real(np.einsum(*operands, [], optimize="greedy")))


def success_tables(
    ch: CqBroadcastChannel,
    code: BroadcastCode,
    dec: DecoderPair,
    joint: bool = True,
    opts: Optional[AuditSettings] = None,
) -> Tuple[Optional[np.ndarray], np.ndarray, np.ndarray]:
    """(joint, B-side, C-side) success probabilities per (m, k)."""
    ens_b = code_ensemble(ch, code, "B", opts)
    ens_c = code_ensemble(ch, code, "C", opts)
    if dec.pi_b.dim != ens_b.dim or dec.pi_c.dim != ens_c.dim:
        raise ShapeError("Decoder dimensions do not match d_B^n and d_C^n")
    if dec.pi_b.size != code.m_size or dec.pi_c.size != code.k_size:
        raise ShapeError("Decoder sizes do not match |M| and |K|")
    shape = (code.m_size, code.k_size)
    table_j = np.zeros(shape) if joint else None
    table_b, table_c = np.zeros(shape), np.zeros(shape)
    for m in range(code.m_size):
        pi_b = dec.pi_b.elements[m]
        for k in range(code.k_size):
            pi_c = dec.pi_c.elements[k]
            table_b[m, k] = ens_b.states[m][k].expectation(pi_b)
            table_c[m, k] = ens_c.states[m][k].expectation(pi_c)
            if joint:
                table_j[m, k] = _joint_success(ch, code.codewords[m, k], pi_b.entries, pi_c.entries)
    return table_j, table_b, table_c


def error_stats(ch: CqBroadcastChannel, code: BroadcastCode, dec: DecoderPair) -> ErrorStats:
    """Maximal, average and geometric-average criteria for one code and decoder pair."""
    joint, b_side, c_side = success_tables(ch, code, dec)
    weights = code.weights.reshape(-1)
    joint, b_side, c_side = (np.clip(t.reshape(-1), 0.0, 1.0) for t in (joint, b_side, c_side))
    mask = weights > 0
    return ErrorStats(
        p_max=float(1.0 - joint[mask].min()),
        p_avg=float(1.0 - weights @ joint),
        geo_avg_success=_geometric_mean(b_side, weights),
        joint_min=float(joint[mask].min()),
        joint_geo=_geometric_mean(joint, weights),
        joint_avg=float(weights @ joint),
        b_min=float(b_side[mask].min()),
        b_avg=float(weights @ b_side),
        c_min=float(c_side[mask].min()),
        c_avg=float(weights @ c_side),
    )


def block_success(ens: CodeStateEnsemble, pi: Povm) -> Tuple[np.ndarray, np.ndarray]:
    """Block weights q(k)/|M| and Tr[ρ^{x(m,k)} Π^m] for a decoder of M on the ensemble's system."""
    success = np.array([[block.expectation(pi.elements[m]) for block in row] for m, row in enumerate(ens.states)])
    return ens.weights, np.clip(success, 0.0, 1.0)


def geometric_error(ens: CodeStateEnsemble, pi: Povm) -> Optional[float]:
    """1 − Π_{m,k} Tr[ρ^{x(m,k)} Π^m]^{q(k)/|M|}; None when some codeword is never decoded correctly."""
    weights, success = block_success(ens, pi)
    geo = _geometric_mean(success.reshape(-1), weights.reshape(-1))
    return None if geo <= 0 else float(1.0 - geo)
