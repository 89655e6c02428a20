"""Tests for the entropic region boundary: pools, envelopes, duality and concavity."""

import numpy as np
import pytest

from cqbl.broadcast.catalog import bsc_broadcast, bsc_region_oracle, noiseless_bit, qubit_pure_dbc, useless_channel
from cqbl.broadcast.channel import CqBroadcastChannel
from cqbl.broadcast.region import (
    CERTIFIED_GRID_RESOLUTION,
    RegionPool,
    compute_envelope,
    concavity_audit,
    default_mu_grid,
    envelope_value,
    f_of_t,
    in_entropic_region,
    lagrangian_boundary,
    quantum_ascent,
    simplex_grid,
    upper_concave_envelope,
)
from cqbl.config.settings import RegionSettings
from cqbl.core.errors import InfeasibleRateError, PreconditionError
from cqbl.quantum.operators import DensityMatrix

LN2 = np.log(2.0)
MU_GRID = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0]


@pytest.mark.parametrize("k,resolution,count", [(2, 4, 5), (3, 2, 6), (3, 8, 45)])
def test_simplex_grid(k, resolution, count):
    grid = simplex_grid(k, resolution)
    assert grid.shape == (count, k)
    np.testing.assert_allclose(grid.sum(axis=1), 1.0)
    assert np.all(grid >= 0)


def test_default_mu_grid():
    grid = default_mu_grid(1e-2, 1e2, 5)
    assert grid[0] == 0.0
    np.testing.assert_allclose(grid[1:], [1e-2, 1e-1, 1.0, 1e1, 1e2])


def test_upper_concave_envelope():
    hull = upper_concave_envelope([(0, 0), (1, 1), (2, 0), (1, 0.2), (0.5, 0.1)])
    np.testing.assert_allclose(hull, [[0, 0], [1, 1], [2, 0]])
    assert envelope_value(hull, 0.5) == pytest.approx(0.5)
    assert envelope_value(hull, -1.0) == pytest.approx(0.0)
    assert envelope_value(hull, 2.5) == float("-inf")


def test_concavity_audit():
    concave = concavity_audit([(0, 1.0), (0.5, 0.9), (1.0, 0.5)])
    assert concave.concave and concave.checked == 1
    dipped = concavity_audit([(0, 1.0), (0.5, 0.2), (1.0, 0.5)], tol=1e-3)
    assert not dipped.concave
    assert dipped.worst_deficit == pytest.approx(0.55)
    assert dipped.violations[0][0] == pytest.approx(0.5)
    with pytest.raises(PreconditionError):
        concavity_audit([(0, 1.0), (0, 0.5)])


def test_noiseless_bit_boundary(noiseless_envelope):
    env = noiseless_envelope
    assert env.certified
    assert env.capacity_c == pytest.approx(LN2, abs=1e-8)
    assert env.sup_i_xb_u == pytest.approx(LN2, abs=1e-9)
    for point in env.points:
        assert point.f_value == pytest.approx(LN2 - point.t, abs=2e-3)
        assert point.certified_lower
        assert point.i_uc >= point.t - 1e-6
        assert point.witness.objectives()[0] == pytest.approx(point.f_value, abs=1e-12)
    assert env.concavity().concave


def test_dual_bound_dominates_boundary(noiseless_envelope):
    env = noiseless_envelope
    for point in env.points:
        assert env.dual_bound(point.t) >= point.f_value - 1e-5
    values = [p.value for p in env.lagrangian]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_region_membership(noiseless_envelope):
    env = noiseless_envelope
    assert env.contains(0.0, 0.0)
    assert env.contains(0.3, 0.3)
    assert not env.contains(0.5, 0.5)
    assert not env.contains(0.0, 1.0)
    with pytest.raises(PreconditionError):
        in_entropic_region(-0.1, 0.0, env)


def test_infeasible_levels_are_skipped():
    env = compute_envelope(noiseless_bit().channel, t_grid=[0.0, 0.3, 1.0], mu_grid=[0.0, 1.0])
    assert [p.t for p in env.points] == [0.0, 0.3]
    assert env.skipped_t == [1.0]


def test_level_preconditions():
    ch = noiseless_bit().channel
    pool = RegionPool(ch)
    with pytest.raises(PreconditionError):
        pool.check_level(-0.1)
    with pytest.raises(InfeasibleRateError):
        f_of_t(ch, 1.0, pool=pool)
    with pytest.raises(PreconditionError):
        lagrangian_boundary(ch, [1.0, -1.0], pool=pool)


def test_f_of_t_returns_witness():
    point = f_of_t(noiseless_bit().channel, 0.2)
    assert point.f_value == pytest.approx(LN2 - 0.2, abs=2e-3)
    assert point.witness.i_uc() >= 0.2 - 1e-6


def test_useless_channel_region_is_trivial():
    env = compute_envelope(useless_channel().channel, t_grid=[0.0], mu_grid=[0.0, 1.0])
    assert env.sup_i_xb_u <= 1e-9
    assert env.sup_i_uc <= 1e-9
    assert env.contains(0.0, 0.0, tol=1e-9)
    assert not env.contains(0.1, 0.0, tol=1e-9)


@pytest.mark.slow
def test_bsc_boundary_matches_oracle():
    entry = bsc_broadcast(0.1, 0.1)
    betas = np.linspace(0.0, 0.5, 51)
    rb, rc = bsc_region_oracle(0.1, 0.1, betas)
    t_grid = np.linspace(0.0, rc[0], 7)
    env = compute_envelope(entry.channel, t_grid=t_grid, mu_grid=MU_GRID)
    for point in env.points:
        expected = np.interp(point.t, rc[::-1], rb[::-1])
        assert point.f_value == pytest.approx(expected, abs=5e-3)


@pytest.mark.slow
def test_quantum_ascent_witnesses_are_consistent(rng):
    opts = RegionSettings(ascent_steps=10, quantum_starts=1, penalty_weights=2)
    pool = RegionPool(qubit_pure_dbc().channel, opts, rng)
    found = quantum_ascent(pool, rng, mu=1.0)
    assert len(found) == 1
    candidate = found[0]
    assert candidate.state is not None
    i_xb, i_uc = candidate.state.objectives()
    assert candidate.i_xb_u == pytest.approx(i_xb)
    assert candidate.i_uc == pytest.approx(i_uc)
    assert i_uc >= -1e-10 and i_xb >= -1e-10


def _ternary_noiseless():
    states = tuple(DensityMatrix.diagonal(np.eye(9)[4 * x]) for x in range(3))
    return CqBroadcastChannel(("0", "1", "2"), states, 3, 3)


@pytest.mark.parametrize("resolution", [4, 8])
def test_coarse_ternary_grid_is_not_certified(resolution):
    pool = RegionPool(_ternary_noiseless(), RegionSettings(ternary_grid_resolution=resolution))
    assert pool.gridded
    assert pool.certified is False
    assert pool.point_at(0.0).certified_lower is False


def test_default_ternary_settings_are_not_certified():
    assert RegionSettings().ternary_grid_resolution < CERTIFIED_GRID_RESOLUTION
    assert RegionPool(_ternary_noiseless()).certified is False


def test_binary_grid_certification_follows_resolution():
    ch = noiseless_bit().channel
    assert RegionPool(ch).certified
    assert RegionPool(ch, RegionSettings(grid_resolution=CERTIFIED_GRID_RESOLUTION)).certified
    assert RegionPool(ch, RegionSettings(grid_resolution=16)).certified is False
