"""Generalized quantum depolarizing semigroups and weighted L_p norms.

Φ_t(X) = e^{−t} X + (1 − e^{−t}) Tr[σX]·I in the Heisenberg picture and its
dual Φ*_t(ρ) = e^{−t} ρ + (1 − e^{−t}) σ. Tensor-product semigroups are
applied slot by slot on the reshaped operator, never as a 4^n matrix.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..core.errors import PreconditionError, ShapeError, SingularityError
from .operators import (
    CLIP_THRESHOLD,
    DensityMatrix,
    HermitianOperator,
    InequalityCheck,
    matrix_power,
    tensor_all,
)

logger = logging.getLogger(__name__)

RHC_THRESHOLD_SLACK = 1e-12


def _check_time(t: float) -> None:
    if t < 0:
        raise PreconditionError(f"Semigroup time must be non-negative, got {t}")


@dataclass(frozen=True, eq=False)
class Gqds:
    """Depolarizing semigroup with invariant state σ."""
    sigma: DensityMatrix

    @property
    def dim(self) -> int:
        return self.sigma.dim

    def heisenberg_apply(self, t: float, x: HermitianOperator) -> HermitianOperator:
        _check_time(t)
        self._check_dim(x)
        decay = np.exp(-t)
        return HermitianOperator(
            decay * x.entries + (1.0 - decay) * self.sigma.expectation(x) * np.eye(self.dim)
        )

    def schrodinger_apply(self, t: float, rho: HermitianOperator) -> HermitianOperator:
        """Φ*_t; returns a DensityMatrix when given one."""
        _check_time(t)
        self._check_dim(rho)
        decay = np.exp(-t)
        out = decay * rho.entries + (1.0 - decay) * rho.trace() * self.sigma.entries
        if isinstance(rho, DensityMatrix):
            return DensityMatrix(out)
        return HermitianOperator(out)

    def generator_apply(self, x: HermitianOperator) -> HermitianOperator:
        """L(X) = X − Tr[σX]·I, so that Φ_t = e^{−tL}."""
        self._check_dim(x)
        return HermitianOperator(x.entries - self.sigma.expectation(x) * np.eye(self.dim))

    def _check_dim(self, x: HermitianOperator) -> None:
        if x.dim != self.dim:
            raise ShapeError(f"Semigroup acts on dim {self.dim}, got {x.dim}")


def weighted_lp_norm(x: HermitianOperator, sigma: HermitianOperator, p: float) -> float:
    """‖X‖_{p,σ} = (Tr|σ^{1/(2p)} X σ^{1/(2p)}|^p)^{1/p}; a pseudo-norm for p < 1.

    Args:
        x: Operator to measure; strictly positive when p < 0
        sigma: Full-rank weight state
        p: Non-zero order

    Returns:
        The (pseudo-)norm value
    """
    if p == 0:
        raise PreconditionError("Weighted L_p norm is undefined at p = 0")
    if x.dim != sigma.dim:
        raise ShapeError(f"Dimension mismatch: {x.dim} vs {sigma.dim}")
    if sigma.min_eigenvalue() <= CLIP_THRESHOLD:
        raise SingularityError("Weighted L_p norms need a full-rank weight state")
    if p < 0 and x.min_eigenvalue() <= CLIP_THRESHOLD:
        raise SingularityError(f"Order p = {p} < 0 needs a strictly positive operator")
    weight = matrix_power(sigma, 1.0 / (2.0 * p)).entries
    vals = np.abs(HermitianOperator(weight @ x.entries @ weight).eigvalsh())
    if p > 0:
        vals = vals[vals > 0]
        if vals.size == 0:
            return 0.0
    return float(np.sum(vals ** p) ** (1.0 / p))


def _apply_slot(entries: np.ndarray, dims: Sequence[int], slot: int, t: float, contraction: np.ndarray) -> np.ndarray:
    """e^{−t}X + (1 − e^{−t}) I_slot ⊗ Tr_slot[(C_slot ⊗ I) X] on one tensor slot."""
    n = len(dims)
    tensor = entries.reshape(list(dims) + list(dims))
    moved = np.moveaxis(tensor, (slot, n + slot), (0, 1))
    reduced = np.einsum("ba,ab...->...", contraction, moved)
    d = dims[slot]
    replaced = np.eye(d).reshape((d, d) + (1,) * reduced.ndim) * reduced[None, None, ...]
    decay = np.exp(-t)
    mixed = decay * moved + (1.0 - decay) * replaced
    total = int(np.prod(dims))
    return np.moveaxis(mixed, (0, 1), (slot, n + slot)).reshape(total, total)


@dataclass(frozen=True, eq=False)
class ProductGqds:
    """Φ_{t,x^n} = Φ_{t,x_1} ⊗ ··· ⊗ Φ_{t,x_n}."""
    factors: Tuple[Gqds, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ShapeError("A product semigroup needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def from_states(cls, states: Sequence[DensityMatrix]) -> "ProductGqds":
        return cls(tuple(Gqds(s) for s in states))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(g.dim for g in self.factors)

    @property
    def invariant_state(self) -> DensityMatrix:
        return DensityMatrix(tensor_all(*(g.sigma for g in self.factors)).entries)

    def product_apply(self, t: float, x: HermitianOperator) -> HermitianOperator:
        _check_time(t)
        self._check_dim(x)
        entries = x.entries
        for slot, g in enumerate(self.factors):
            entries = _apply_slot(entries, self.dims, slot, t, g.sigma.entries)
        return HermitianOperator(entries)

    def _check_dim(self, x: HermitianOperator) -> None:
        if x.dim != int(np.prod(self.dims)):
            raise ShapeError(f"Product semigroup acts on dim {int(np.prod(self.dims))}, got {x.dim}")


def trace_depolarizing_apply(t: float, x: HermitianOperator, dims: Sequence[int]) -> HermitianOperator:
    """Ψ_t^{⊗n}(T) with Ψ_t(T) = e^{−t}T + (1 − e^{−t}) Tr[T]·I on every slot."""
    _check_time(t)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != x.dim:
        raise ShapeError(f"Slot dims {dims} do not multiply to {x.dim}")
    entries = x.entries
    for slot, d in enumerate(dims):
        entries = _apply_slot(entries, dims, slot, t, np.eye(d))
    return HermitianOperator(entries)


def rhc_threshold(p: float, q: float) -> float:
    return float(np.log((p - 1.0) / (q - 1.0)))


def rhc_check(pg: ProductGqds, g_n: HermitianOperator, p: float, q: float, t: float) -> InequalityCheck:
    """Reverse hypercontractivity ‖Φ_{t,x^n}(G)‖_{p,ρ} ≥ ‖G‖_{q,ρ} with ρ = ρ^{x^n}.

    Only claimed for p ≤ q < 1 (both non-zero) and t ≥ ln((p−1)/(q−1)).
    """
    if p == 0 or q == 0:
        raise PreconditionError("Orders p and q must be non-zero")
    if p >= 1 or q >= 1:
        raise PreconditionError(f"Orders must lie below 1, got p={p}, q={q}")
    if p > q:
        raise PreconditionError(f"Need p ≤ q, got p={p}, q={q}")
    threshold = rhc_threshold(p, q)
    if t < threshold - RHC_THRESHOLD_SLACK:
        raise PreconditionError(f"t = {t} is below the threshold {threshold:.6g}")
    if g_n.min_eigenvalue() <= CLIP_THRESHOLD:
        raise PreconditionError("Reverse hypercontractivity is checked on strictly positive operators only")
    state = pg.invariant_state
    lhs = weighted_lp_norm(pg.product_apply(t, g_n), state, p)
    rhs = weighted_lp_norm(g_n, state, q)
    return InequalityCheck(lhs=lhs, rhs=rhs, direction=">=")


def positivity_gap_check(pg: ProductGqds, t: float, x: HermitianOperator) -> float:
    """Minimum eigenvalue of Ψ_t^{⊗n}(X) − Φ_{t,x^n}(X); non-negative for PSD X."""
    gap = trace_depolarizing_apply(t, x, pg.dims) - pg.product_apply(t, x)
    return gap.min_eigenvalue()


def identity_growth_check(t: float, d: int, n: int) -> InequalityCheck:
    """Log-scale check of (e^{−t} + d(1 − e^{−t}))^n ≤ e^{dnt}."""
    _check_time(t)
    lhs = n * np.log(np.exp(-t) + d * (1.0 - np.exp(-t)))
    return InequalityCheck(lhs=float(lhs), rhs=float(d * n * t), direction="<=")
