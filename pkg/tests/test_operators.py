import numpy as np
import pytest

from photonwigner import operators as ops
from photonwigner import state
from photonwigner.checks import random_transverse_state
from photonwigner.units import Units


@pytest.fixture(scope="module")
def grid():
    return state.KGrid.centered(4, 0.7)


@pytest.fixture(scope="module")
def pure(grid):
    return random_transverse_state(grid, np.random.default_rng(7), k0=(0.2, 0.1, 0.8), sigma=0.7)


@pytest.fixture(scope="module")
def density(pure):
    return ops.density_from_pure(pure)


def test_properties(density):
    for name, value in ops.density_properties(density).items():
        assert value <= 1e-10, name


def test_trace_and_idempotency(density):
    rho = density.rho.matrix
    assert abs(np.trace(rho) - 1) <= 1e-12
    np.testing.assert_allclose(rho @ rho, rho, atol=1e-12 * np.max(np.abs(rho)))


@pytest.mark.parametrize("units", [Units(), Units(0.5, 2.0)])
def test_energy_average(pure, density, units):
    H = ops.hamiltonian(pure.grid, units)
    e = state.averages(pure, units)["energy"]
    assert abs(ops.observable_average(H, density) - e) <= 1e-10 * e
    assert abs(ops.observable_average_h(H, density) - e) <= 1e-10 * e


def test_momentum_average(pure, density):
    p = state.averages(pure)["momentum"]
    for j in range(3):
        assert ops.observable_average(ops.momentum_op(pure.grid, j), density) == pytest.approx(p[j], abs=1e-12)


class TestGeneralizedAdjoint:
    def test_multiplication_operators(self, grid):
        assert ops.is_generalized_hermitian(ops.hamiltonian(grid))
        for j in range(3):
            assert ops.is_generalized_hermitian(ops.momentum_op(grid, j))

    @pytest.mark.parametrize("j", range(3))
    def test_position_is_not(self, grid, j):
        assert ops.generalized_hermitian_residual(ops.position_op(grid, j)) > 1e-3

    def test_involution(self, grid, rng):
        n = 3 * grid.size
        g = ops.KernelOperator(grid, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        twice = ops.generalized_adjoint(ops.generalized_adjoint(g))
        np.testing.assert_allclose(twice.matrix, g.matrix, atol=1e-12)


def test_node_cap():
    g = state.KGrid.centered(8, 0.5)
    with pytest.raises(ValueError, match="cap"):
        ops.hamiltonian(g)
    assert ops.hamiltonian(g, cap=g.size).matrix.shape == (3 * g.size,) * 2


def test_requires_normalized_state(grid):
    s = state.gaussian_state(grid, (0, 0, 1), 0.5, normalize=False)
    with pytest.raises(ValueError, match="unit BB norm"):
        ops.density_from_pure(s)


class TestEvolution:
    def test_zero_step(self, density):
        np.testing.assert_array_equal(ops.evolve_density(density, 0.0).rho.matrix, density.rho.matrix)

    def test_matches_evolved_state(self, pure, density):
        a = ops.evolve_density(density, 0.9).rho.matrix
        b = ops.density_from_pure(state.evolve(pure, 0.9)).rho.matrix
        np.testing.assert_allclose(a, b, atol=1e-14)

    def test_liouville(self, density, grid):
        assert ops.liouville_residual(density, 1e-3 / np.max(grid.norm)) <= 1e-6
