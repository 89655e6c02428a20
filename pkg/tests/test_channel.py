"""Tests for broadcast channels, joint states, Holevo capacity, degradedness and the catalog."""

import numpy as np
import pytest

from cqbl.broadcast.capacity import holevo_capacity, holevo_information
from cqbl.broadcast.catalog import (
    bsc_broadcast,
    bsc_region_oracle,
    get_channel,
    list_channels,
    noiseless_bit,
    qubit_pure_dbc,
    swapped_qubit_dbc,
    useless_channel,
)
from cqbl.broadcast.channel import (
    CqBroadcastChannel,
    JointState,
    aux_dim_bound,
    build_joint_state,
    classical_joint_state,
    time_share,
)
from cqbl.broadcast.degrading import check_degraded, declared_map_residual, degrading_residual
from cqbl.core.errors import InvalidOperatorError, PreconditionError, ShapeError
from cqbl.quantum.entropic import binary_entropy, cond_mutual_info_cq, vn_entropy
from cqbl.quantum.operators import DensityMatrix, identity_channel

LN2 = np.log(2.0)


def test_channel_validation():
    state = DensityMatrix.maximally_mixed(4)
    with pytest.raises(ShapeError):
        CqBroadcastChannel(("0", "0"), (state, state), 2, 2)
    with pytest.raises(ShapeError):
        CqBroadcastChannel(("0", "1"), (state,), 2, 2)
    with pytest.raises(ShapeError):
        CqBroadcastChannel(("0",), (state,), 2, 3)
    with pytest.raises(ShapeError):
        CqBroadcastChannel((), (), 2, 2)


def test_marginals_of_qubit_pure_channel():
    ch = qubit_pure_dbc().channel
    assert ch.size == 2
    for rho_b in ch.b_states:
        assert vn_entropy(rho_b) == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(ch.b_entropies, [0.0, 0.0], atol=1e-10)
    assert np.all(ch.c_entropies > 0)


def test_swapped_twice_is_identity():
    ch = qubit_pure_dbc().channel
    back = ch.swapped().swapped()
    for a, b in zip(ch.states, back.states):
        assert a.allclose(b)
    swapped = ch.swapped()
    for rho_b, rho_c in zip(ch.b_states, swapped.c_states):
        assert rho_b.allclose(rho_c)


def test_joint_state_validation():
    ch = noiseless_bit().channel
    u = DensityMatrix.basis_state(2, 0)
    with pytest.raises(InvalidOperatorError):
        JointState(np.array([0.7, 0.7]), (u, u), ch)
    with pytest.raises(ShapeError):
        JointState(np.array([1.0]), (u,), ch)
    big = DensityMatrix.maximally_mixed(3)
    with pytest.raises(ShapeError):
        JointState(np.array([0.5, 0.5]), (big, big), ch)
    assert JointState(np.array([0.5, 0.5]), (big, big), ch, time_shared=True).d_u == 3
    assert aux_dim_bound(ch) == 2


def test_noiseless_bit_extremes():
    ch = noiseless_bit().channel
    u_is_x = classical_joint_state(np.diag([0.5, 0.5]), ch)
    assert u_is_x.i_xb_given_u() == pytest.approx(0.0, abs=1e-12)
    assert u_is_x.i_uc() == pytest.approx(LN2)
    constant_u = classical_joint_state(np.array([[0.5, 0.5]]), ch)
    assert constant_u.i_xb_given_u() == pytest.approx(LN2)
    assert constant_u.i_uc() == pytest.approx(0.0, abs=1e-12)


def test_block_formulas_match_dense_state(rng):
    ch = qubit_pure_dbc().channel
    u_states = (DensityMatrix.pure([1, 0.3j]), DensityMatrix.diagonal([0.2, 0.8]))
    omega = build_joint_state([0.4, 0.6], u_states, ch)
    assert omega.density().trace() == pytest.approx(1.0)
    assert cond_mutual_info_cq(omega, "U", "B") == pytest.approx(omega.i_xb_given_u(), abs=1e-9)
    assert cond_mutual_info_cq(omega, "X", "C") == pytest.approx(0.0, abs=1e-9)
    assert omega.i_ub() >= omega.i_uc() - 1e-10


def test_time_share_is_linear_in_the_private_term():
    ch = bsc_broadcast().channel
    first = classical_joint_state(np.diag([0.5, 0.5]), ch)
    second = classical_joint_state(np.array([[0.3, 0.7]]), ch)
    mixed = time_share(first, second, 0.25)
    assert mixed.time_shared
    expected = 0.25 * first.i_xb_given_u() + 0.75 * second.i_xb_given_u()
    assert mixed.i_xb_given_u() == pytest.approx(expected, abs=1e-10)
    assert mixed.i_uc() >= 0.25 * first.i_uc() + 0.75 * second.i_uc() - 1e-10
    with pytest.raises(InvalidOperatorError):
        time_share(first, second, 1.5)


@pytest.mark.parametrize(
    "factory,expected",
    [
        (noiseless_bit, LN2),
        (useless_channel, 0.0),
        (bsc_broadcast, LN2 - binary_entropy(0.1)),
    ],
)
def test_holevo_capacity_of_b_marginal(factory, expected):
    result = holevo_capacity(factory().channel.b_states)
    assert result.value == pytest.approx(expected, abs=1e-8)
    assert result.value <= result.upper + 1e-12
    assert holevo_information(factory().channel.b_states, result.weights) == pytest.approx(result.value, abs=1e-8)


@pytest.mark.parametrize("max_iter", [1, 2, 3])
def test_holevo_capacity_weights_match_value_when_capped(max_iter):
    zero, one = DensityMatrix.basis_state(2, 0), DensityMatrix.basis_state(2, 1)
    states = [zero, zero, one]
    result = holevo_capacity(states, tol=0.0, max_iter=max_iter)
    assert result.iterations == max_iter
    assert holevo_information(states, result.weights) == pytest.approx(result.value, abs=1e-10)
    if max_iter == 1:
        np.testing.assert_allclose(result.weights, np.ones(3) / 3)
        assert result.value == pytest.approx(binary_entropy(1 / 3), abs=1e-10)


@pytest.mark.parametrize("factory", [noiseless_bit, bsc_broadcast, useless_channel])
def test_check_degraded_finds_a_map(factory):
    entry = factory()
    result = check_degraded(entry.channel)
    assert result.degraded
    assert result.residual <= 1e-6
    assert result.kraus_rank >= 1


@pytest.mark.slow
def test_check_degraded_qubit_pure():
    result = check_degraded(qubit_pure_dbc().channel)
    assert result.degraded


def test_swapped_channel_is_not_degraded():
    result = check_degraded(swapped_qubit_dbc().channel)
    assert not result.degraded
    assert result.residual > 1e-3


def test_declared_map_residuals():
    for entry in (noiseless_bit(), useless_channel(), bsc_broadcast(), qubit_pure_dbc()):
        assert declared_map_residual(entry.channel, entry.degrading_map) <= 1e-12
    assert declared_map_residual(noiseless_bit().channel, identity_channel(3)) == float("inf")
    assert degrading_residual(swapped_qubit_dbc().channel, identity_channel(2)) > 0.1


def test_catalog_lookup():
    assert list_channels() == ["bsc-dbc", "noiseless-bit", "qubit-pure", "swapped-qubit", "useless"]
    assert get_channel("noiseless-bit").name == "noiseless-bit"
    with pytest.raises(KeyError):
        get_channel("nope")
    with pytest.raises(PreconditionError):
        bsc_broadcast(p1=0.7)


def test_bsc_oracle_endpoints():
    p1, cascade = 0.1, 0.1
    p2 = p1 * (1 - cascade) + cascade * (1 - p1)
    rb, rc = bsc_region_oracle(p1, cascade, np.array([0.0, 0.5]))
    assert rb[0] == pytest.approx(0.0, abs=1e-12)
    assert rc[0] == pytest.approx(LN2 - binary_entropy(p2))
    assert rb[1] == pytest.approx(LN2 - binary_entropy(p1))
    assert rc[1] == pytest.approx(0.0, abs=1e-12)
