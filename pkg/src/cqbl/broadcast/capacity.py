"""Holevo capacity of a classical-quantum channel by Blahut–Arimoto iteration."""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..quantum.entropic import operator_entropy, rel_entropy
from ..quantum.operators import DensityMatrix, HermitianOperator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CapacityResult:
    """Lower and upper bounds on max_p χ(p) with the maximizing input law."""
    value: float
    upper: float
    weights: np.ndarray
    iterations: int


def holevo_information(states: Sequence[DensityMatrix], weights: Sequence[float]) -> float:
    """χ(p) = S(Σ p_x ρ_x) − Σ p_x S(ρ_x)."""
    weights = np.asarray(weights, dtype=float)
    average = HermitianOperator(sum(p * s.entries for p, s in zip(weights, states)))
    return operator_entropy(average) - float(sum(p * operator_entropy(s) for p, s in zip(weights, states)))


def holevo_capacity(
    states: Sequence[DensityMatrix],
    tol: float = 1e-10,
    max_iter: int = 5000,
) -> CapacityResult:
    """Maximize the Holevo information over input distributions.

    Each step reweights p(x) ∝ p(x)·exp(D(ρ_x ‖ ρ_p)); the gap between
    max_x D(ρ_x ‖ ρ_p) and χ(p) bounds the distance to the optimum.

    Args:
        states: Output states ρ_x, one per input symbol
        tol: Stop once the upper and lower bounds agree within this gap
        max_iter: Maximum number of reweighting steps

    Returns:
        CapacityResult with the best lower bound and its certificate
    """
    states = list(states)
    m = len(states)
    weights = np.ones(m) / m
    evaluated = weights
    lower, upper = 0.0, float("inf")
    iteration = 0
    for iteration in range(1, max_iter + 1):
        average = DensityMatrix.from_operator(
            HermitianOperator(sum(p * s.entries for p, s in zip(weights, states))), renormalize=True
        )
        divergences = np.array([rel_entropy(s, average) for s in states])
        evaluated = weights
        lower = float(weights @ divergences)
        upper = float(divergences.max())
        if upper - lower < tol:
            break
        weights = weights * np.exp(divergences - upper)
        weights = weights / weights.sum()
    logger.debug(f"Holevo capacity {lower:.10f} (gap {upper - lower:.2e}) after {iteration} iterations")
    return CapacityResult(value=max(lower, 0.0), upper=upper, weights=evaluated, iterations=iteration)
