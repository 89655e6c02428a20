"""Tests for operator-core: validated operators, states, POVMs and channels."""

import numpy as np
import pytest

from cqbl.core.errors import InvalidOperatorError, PreconditionError, ShapeError, SingularityError
from cqbl.quantum.operators import (
    DensityMatrix,
    HermitianOperator,
    InequalityCheck,
    Povm,
    QuantumChannel,
    alt_check,
    apply_channel,
    channel_from_choi,
    choi_matrix,
    depolarizing_channel,
    identity_channel,
    matrix_power,
    partial_trace,
    replacer_channel,
    tensor,
    tensor_all,
    trace_norm,
)
from cqbl.quantum.random_ensembles import (
    random_channel,
    random_commuting_pair,
    random_density_matrix,
    random_psd,
    random_unitary,
)


def test_hermitian_rejects_non_square():
    with pytest.raises(ShapeError):
        HermitianOperator(np.zeros((2, 3)))


def test_hermitian_rejects_non_hermitian():
    with pytest.raises(InvalidOperatorError):
        HermitianOperator(np.array([[0, 1], [0, 0]]))


def test_hermitian_entries_are_read_only():
    op = HermitianOperator.identity(2)
    with pytest.raises(ValueError):
        op.entries[0, 0] = 5


@pytest.mark.parametrize(
    "entries",
    [
        np.diag([0.5, 0.6]),
        np.diag([1.2, -0.2]),
    ],
)
def test_density_matrix_validation(entries):
    with pytest.raises(InvalidOperatorError):
        DensityMatrix(entries)


def test_density_matrix_constructors():
    assert DensityMatrix.maximally_mixed(3).allclose(HermitianOperator(np.eye(3) / 3))
    assert DensityMatrix.basis_state(2, 1).expectation(HermitianOperator.diag([0, 1])) == pytest.approx(1.0)
    plus = DensityMatrix.pure([1, 1])
    np.testing.assert_allclose(plus.entries, np.full((2, 2), 0.5))
    with pytest.raises(InvalidOperatorError):
        DensityMatrix.from_operator(HermitianOperator.diag([1, 1]))
    assert DensityMatrix.from_operator(HermitianOperator.diag([1, 1]), renormalize=True).trace() == pytest.approx(1.0)


def test_partial_trace_of_product(rng):
    a = random_density_matrix(2, rng)
    b = random_density_matrix(3, rng)
    c = random_density_matrix(2, rng)
    joint = tensor_all(a, b, c)
    assert partial_trace(joint, (2, 3, 2), [0]).allclose(a)
    assert partial_trace(joint, (2, 3, 2), [1]).allclose(b)
    assert partial_trace(joint, (2, 3, 2), [0, 2]).allclose(tensor(a, c))
    assert partial_trace(joint, (2, 3, 2), []).trace() == pytest.approx(1.0)
    with pytest.raises(ShapeError):
        partial_trace(joint, (2, 2, 2), [0])


def test_matrix_power(rng):
    rho = random_density_matrix(4, rng)
    root = matrix_power(rho, 0.5)
    np.testing.assert_allclose(root.entries @ root.entries, rho.entries, atol=1e-10)
    inverse = matrix_power(rho, -1.0)
    np.testing.assert_allclose(inverse.entries @ rho.entries, np.eye(4), atol=1e-8)
    with pytest.raises(SingularityError):
        matrix_power(DensityMatrix.basis_state(2, 0), -0.5)


def test_matrix_power_zero_exponent_of_singular_state():
    np.testing.assert_allclose(matrix_power(DensityMatrix.basis_state(2, 0), 0.0).entries, np.eye(2))


def test_trace_norm_of_orthogonal_states():
    diff = DensityMatrix.basis_state(2, 0) - DensityMatrix.basis_state(2, 1)
    assert trace_norm(diff) == pytest.approx(2.0)


def test_povm_validation():
    z0 = HermitianOperator.diag([1, 0])
    z1 = HermitianOperator.diag([0, 1])
    povm = Povm((z0, z1))
    np.testing.assert_allclose(povm.probabilities(DensityMatrix.diagonal([0.3, 0.7])), [0.3, 0.7])
    with pytest.raises(InvalidOperatorError):
        Povm((z0,))
    with pytest.raises(InvalidOperatorError):
        Povm((HermitianOperator.diag([2, 0]), HermitianOperator.diag([-1, 1])))
    with pytest.raises(ShapeError):
        Povm((z0, HermitianOperator.identity(3)))


def test_channel_requires_trace_preservation():
    with pytest.raises(InvalidOperatorError):
        QuantumChannel((0.5 * np.eye(2),))
    with pytest.raises(ShapeError):
        QuantumChannel(())


def test_replacer_and_depolarizing_channels(rng):
    sigma = random_density_matrix(2, rng)
    rho = random_density_matrix(2, rng)
    assert apply_channel(replacer_channel(sigma, 2), rho).allclose(sigma)
    mixed = apply_channel(depolarizing_channel(sigma, 0.3), rho)
    assert mixed.allclose(HermitianOperator(0.7 * rho.entries + 0.3 * sigma.entries))
    assert apply_channel(identity_channel(2), rho).allclose(rho)
    with pytest.raises(PreconditionError):
        depolarizing_channel(sigma, 1.5)


def test_choi_roundtrip_preserves_action(rng):
    channel = random_channel(2, 3, rng)
    choi = choi_matrix(channel)
    assert np.trace(choi).real == pytest.approx(2.0)
    rebuilt = channel_from_choi(choi, 2, 3)
    assert (rebuilt.d_in, rebuilt.d_out) == (2, 3)
    for _ in range(3):
        rho = random_density_matrix(2, rng)
        assert apply_channel(rebuilt, rho).allclose(apply_channel(channel, rho), atol=1e-9)


def test_random_unitary_is_unitary(rng):
    u = random_unitary(4, rng)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_inequality_check_margin():
    assert InequalityCheck(1.0, 2.0, "<=").margin == pytest.approx(1.0)
    assert InequalityCheck(1.0, 2.0, ">=").margin == pytest.approx(-1.0)
    assert InequalityCheck(1.0, 1.0 - 1e-12, "<=").holds(1e-9)
    assert not InequalityCheck(1.0, 0.5, "<=").holds(1e-9)


@pytest.mark.parametrize("r", [0.0, 0.1, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("dim", [2, 3, 4])
def test_alt_inequality_holds(rng, dim, r):
    a = random_psd(dim, rng)
    b = random_psd(dim, rng)
    check = alt_check(a, b, r)
    assert check.holds(1e-9)


def test_alt_equality_for_commuting_pair(rng):
    rho, sigma, _, _ = random_commuting_pair(3, rng)
    check = alt_check(rho, sigma, 0.4)
    assert check.lhs == pytest.approx(check.rhs, abs=1e-9)


@pytest.mark.parametrize("r", [-0.1, 1.5])
def test_alt_rejects_exponent_out_of_range(rng, r):
    a = random_psd(2, rng)
    with pytest.raises(PreconditionError):
        alt_check(a, a, r)
