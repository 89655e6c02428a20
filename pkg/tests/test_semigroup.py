"""Tests for depolarizing semigroups, weighted norms and reverse hypercontractivity."""

import numpy as np
import pytest

from cqbl.core.errors import PreconditionError, ShapeError, SingularityError
from cqbl.quantum.operators import DensityMatrix, HermitianOperator, tensor
from cqbl.quantum.random_ensembles import random_density_matrix, random_hermitian, random_psd
from cqbl.quantum.semigroup import (
    Gqds,
    ProductGqds,
    identity_growth_check,
    positivity_gap_check,
    rhc_check,
    rhc_threshold,
    trace_depolarizing_apply,
    weighted_lp_norm,
)


def positive_operator(dim, rng):
    g = random_psd(dim, rng, shift=0.05)
    return HermitianOperator(g.entries / g.trace())


def test_semigroup_endpoints(rng):
    sigma = random_density_matrix(3, rng)
    x = random_hermitian(3, rng)
    phi = Gqds(sigma)
    assert phi.heisenberg_apply(0.0, x).allclose(x)
    limit = phi.heisenberg_apply(60.0, x)
    assert limit.allclose(HermitianOperator(sigma.expectation(x) * np.eye(3)))
    with pytest.raises(PreconditionError):
        phi.heisenberg_apply(-1.0, x)


def test_schrodinger_is_dual_to_heisenberg(rng):
    sigma = random_density_matrix(2, rng)
    rho = random_density_matrix(2, rng)
    x = random_hermitian(2, rng)
    phi = Gqds(sigma)
    evolved = phi.schrodinger_apply(0.7, rho)
    assert isinstance(evolved, DensityMatrix)
    assert evolved.expectation(x) == pytest.approx(rho.expectation(phi.heisenberg_apply(0.7, x)))
    assert phi.schrodinger_apply(3.0, sigma).allclose(sigma)


def test_generator_is_derivative_at_zero(rng):
    phi = Gqds(random_density_matrix(2, rng))
    x = random_hermitian(2, rng)
    h = 1e-6
    slope = (phi.heisenberg_apply(h, x).entries - x.entries) / h
    np.testing.assert_allclose(slope, -phi.generator_apply(x).entries, atol=1e-5)


def test_semigroup_rejects_wrong_dimension(rng):
    with pytest.raises(ShapeError):
        Gqds(DensityMatrix.maximally_mixed(2)).heisenberg_apply(1.0, HermitianOperator.identity(3))


def test_weighted_norm_values(rng):
    sigma = random_density_matrix(3, rng)
    identity = HermitianOperator.identity(3)
    for p in (0.5, 1.0, 2.0, -1.0):
        assert weighted_lp_norm(identity, sigma, p) == pytest.approx(1.0)
    x = random_hermitian(2, rng)
    mixed = DensityMatrix.maximally_mixed(2)
    expected = 0.5 * np.sum(np.abs(x.eigvalsh()))
    assert weighted_lp_norm(x, mixed, 1.0) == pytest.approx(expected)


def test_weighted_norm_preconditions(rng):
    with pytest.raises(PreconditionError):
        weighted_lp_norm(HermitianOperator.identity(2), DensityMatrix.maximally_mixed(2), 0.0)
    with pytest.raises(SingularityError):
        weighted_lp_norm(HermitianOperator.identity(2), DensityMatrix.basis_state(2, 0), 1.0)
    with pytest.raises(SingularityError):
        weighted_lp_norm(HermitianOperator.diag([1, 0]), DensityMatrix.maximally_mixed(2), -0.5)


def test_product_semigroup_factorizes(rng):
    states = [random_density_matrix(2, rng), random_density_matrix(3, rng)]
    pg = ProductGqds.from_states(states)
    a, b = random_hermitian(2, rng), random_hermitian(3, rng)
    expected = tensor(Gqds(states[0]).heisenberg_apply(0.4, a), Gqds(states[1]).heisenberg_apply(0.4, b))
    assert pg.product_apply(0.4, tensor(a, b)).allclose(expected)
    assert pg.dims == (2, 3)
    assert pg.invariant_state.allclose(tensor(*states))


def test_trace_depolarizing_on_identity():
    t, d, n = 0.3, 2, 3
    out = trace_depolarizing_apply(t, HermitianOperator.identity(d ** n), [d] * n)
    factor = (np.exp(-t) + d * (1 - np.exp(-t))) ** n
    assert out.allclose(HermitianOperator(factor * np.eye(d ** n)))
    with pytest.raises(ShapeError):
        trace_depolarizing_apply(t, HermitianOperator.identity(4), [3])


def test_rhc_threshold():
    assert rhc_threshold(-1.0, 0.5) == pytest.approx(np.log(4.0))
    assert rhc_threshold(0.5, 0.5) == pytest.approx(0.0)


@pytest.mark.parametrize("p,q", [(-0.9, -0.5), (-0.5, 0.5), (0.2, 0.8), (-2.0, -1.0)])
@pytest.mark.parametrize("n", [1, 2])
def test_reverse_hypercontractivity(rng, p, q, n):
    pg = ProductGqds.from_states([random_density_matrix(2, rng, mix=0.1) for _ in range(n)])
    g = positive_operator(2 ** n, rng)
    threshold = rhc_threshold(p, q)
    for t in (threshold, threshold + 0.5):
        assert rhc_check(pg, g, p, q, t).holds(1e-8)


@pytest.mark.parametrize(
    "p,q,t",
    [
        (0.0, 0.5, 1.0),
        (0.5, 1.0, 1.0),
        (0.8, 0.2, 1.0),
        (0.2, 0.8, np.log(4.0) - 0.1),
    ],
)
def test_rhc_rejects_unsupported_parameters(rng, p, q, t):
    pg = ProductGqds.from_states([DensityMatrix.maximally_mixed(2)])
    g = positive_operator(2, rng)
    with pytest.raises(PreconditionError):
        rhc_check(pg, g, p, q, t)


def test_rhc_rejects_singular_operator():
    pg = ProductGqds.from_states([DensityMatrix.maximally_mixed(2)])
    with pytest.raises(PreconditionError):
        rhc_check(pg, HermitianOperator.diag([1, 0]), 0.2, 0.8, 2.0)


@pytest.mark.parametrize("t", [0.0, 0.1, 1.0, 5.0])
def test_positivity_gap(rng, t):
    pg = ProductGqds.from_states([random_density_matrix(2, rng), random_density_matrix(3, rng)])
    x = random_psd(6, rng)
    assert positivity_gap_check(pg, t, x) >= -1e-10


@pytest.mark.parametrize("t,d,n", [(0.0, 2, 1), (0.3, 2, 4), (2.0, 3, 2)])
def test_identity_growth(t, d, n):
    assert identity_growth_check(t, d, n).holds(1e-12)
