"""Finite-dimensional operator algebra, entropies and semigroups."""

from .operators import (
    DensityMatrix,
    HermitianOperator,
    InequalityCheck,
    Povm,
    QuantumChannel,
    alt_check,
    apply_channel,
    matrix_power,
    partial_trace,
    tensor,
    tensor_all,
)

__all__ = [
    "DensityMatrix",
    "HermitianOperator",
    "InequalityCheck",
    "Povm",
    "QuantumChannel",
    "alt_check",
    "apply_channel",
    "matrix_power",
    "partial_trace",
    "tensor",
    "tensor_all",
]
