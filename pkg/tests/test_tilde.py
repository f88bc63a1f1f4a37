import numpy as np
import pytest

from photonwigner import state, tilde, wigner
from photonwigner.units import Units


@pytest.fixture(scope="module")
def grid():
    return state.KGrid.centered(6, 0.6)


@pytest.fixture(scope="module")
def s(grid):
    return state.gaussian_state(grid, (0.3, 0.2, 1.2), 0.6, (1.0, 0.4j))


def _rel(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


class TestAxes:
    def test_symmetric(self):
        a = tilde.DualAxis.symmetric(0.5, 2)
        np.testing.assert_allclose(a.nodes(), [-1, -0.5, 0, 0.5, 1])
        assert a.zero == 2

    @pytest.mark.parametrize("step,lo,count", [(0.0, 0, 1), (1.0, 1, 3), (1.0, -3, 3)])
    def test_invalid(self, step, lo, count):
        with pytest.raises(ValueError):
            tilde.DualAxis(step, lo, count)

    def test_lattices(self, grid):
        lam = tilde.lambda_axes(grid, Units(hbar=2.0))
        assert lam[0].count == 6 and lam[0].step == pytest.approx(2 * np.pi / (6 * 2.0 * 0.6))
        mu = tilde.mu_axes(grid)
        assert mu[0].step == pytest.approx(1.2) and mu[0].count == 5


@pytest.mark.parametrize("kernel", ["weyl67", "cos69"])
@pytest.mark.parametrize("units", [Units(), Units(1.7, 0.8)])
def test_round_trip(s, kernel, units):
    tf = tilde.tilde_rho(s, 0.4, units)
    spec = wigner.SampleSpec.random(s.grid, 10, 10, np.random.default_rng(2))
    a = tilde.rho_from_tilde(tf, spec, kernel)
    b = wigner.wigner_general(s, spec, kernel, t=0.4, units=units)
    assert _rel(a.values, b.values) <= 1e-6
    assert a.imag_residual <= 1e-10


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_origin_value(s, hbar):
    tf = tilde.tilde_rho(s, 0.0, Units(hbar=hbar))
    expected = (hbar / (2 * np.pi)) ** 3 / 3
    assert abs(tf.at_origin() - expected) <= 1e-3 * expected


def test_zero_state(grid):
    zero = state.PhotonStateK(grid, np.zeros(grid.shape + (3,)))
    assert np.all(tilde.tilde_rho(zero).values == 0)


def test_rho_from_tilde_needs_grid():
    lam = (tilde.DualAxis(1.0, 0, 1),) * 3
    f = tilde.gaussian_field(lam, lam, 1.0)
    with pytest.raises(ValueError, match="k-grid"):
        tilde.rho_from_tilde(f, wigner.SampleSpec(np.zeros((1, 3), int), np.zeros((1, 3))))


class TestBoxtimes:
    line = (tilde.DualAxis.symmetric(0.25, 48),) + (tilde.DualAxis(1.0, 0, 1),) * 2

    @pytest.mark.parametrize("hbar", [1.0, 0.6])
    def test_gaussian_oracle(self, hbar):
        u = Units(hbar=hbar)
        f = tilde.gaussian_field(self.line, self.line, 1.0, units=u)
        g = tilde.gaussian_field(self.line, self.line, 0.7, units=u)
        got = tilde.boxtimes_continuous(f, g).values[:, 0, 0, :, 0, 0, 0, 0]
        l, m = self.line[0].nodes()[:, None], self.line[0].nodes()[None, :]
        # completing the square in (lambda', mu') for exp(-a|z'|^2 - b|z - z'|^2) with the twist phase
        A = 1.7
        b1, b2 = 1.4 * l + 0.5j * hbar * m, 1.4 * m - 0.5j * hbar * l
        exact = np.pi / A * np.exp((b1**2 + b2**2) / (4 * A) - 0.7 * (l**2 + m**2))
        inner = (np.abs(l) < 4) & (np.abs(m) < 4)
        assert np.max(np.abs(got - exact)[inner]) <= 1e-6 * np.max(np.abs(exact))

    def test_identity(self):
        f = tilde.gaussian_field(self.line, self.line, 0.7, grid_weights=np.arange(9).reshape(3, 3))
        d = tilde.delta_field(f)
        assert _rel(tilde.boxtimes_continuous(d, f).values, f.values) <= 1e-10
        assert _rel(tilde.boxtimes_continuous(f, d).values, f.values) <= 1e-10

    def test_grid_factor_follows_table(self):
        from photonwigner.grid import boxtimes_table

        a, b = np.zeros((3, 3)), np.zeros((3, 3))
        a[1, 1], b[0, 1] = 1.0, 1.0
        f = tilde.delta_field(tilde.gaussian_field(self.line, self.line, 1.0), 1, 1)
        g = tilde.delta_field(f, 0, 1)
        out = tilde.boxtimes_continuous(f, g)
        idx = tuple(ax.zero for ax in f.lam + f.mu)
        np.testing.assert_allclose(out.values[idx] * f.weight, boxtimes_table(a, b), atol=1e-14)

    def test_associative(self, rng):
        ax = (tilde.DualAxis.symmetric(0.5, 3),) * 3
        shape = (7,) * 6 + (3, 3)

        def compact():
            v = np.zeros(shape, dtype=complex)
            block = tuple(slice(2, 4) for _ in range(6))
            v[block] = rng.standard_normal((2,) * 6 + (3, 3)) + 1j * rng.standard_normal((2,) * 6 + (3, 3))
            return tilde.TildeField(ax, ax, v)

        a, b, c = compact(), compact(), compact()
        lhs = tilde.boxtimes_continuous(tilde.boxtimes_continuous(a, b), c)
        rhs = tilde.boxtimes_continuous(a, tilde.boxtimes_continuous(b, c))
        assert _rel(lhs.values, rhs.values) <= 1e-5

    def test_support_overflow(self):
        f = tilde.gaussian_field(self.line, self.line, 0.01)
        with pytest.raises(ValueError, match="widen"):
            tilde.boxtimes_continuous(f, f)

    def test_mismatch(self):
        f = tilde.gaussian_field(self.line, self.line, 1.0)
        other = (tilde.DualAxis.symmetric(0.5, 24),) + self.line[1:]
        with pytest.raises(ValueError, match="different"):
            tilde.boxtimes_continuous(f, tilde.gaussian_field(other, other, 1.0))
        with pytest.raises(ValueError, match="units"):
            tilde.boxtimes_continuous(f, tilde.gaussian_field(self.line, self.line, 1.0, units=Units(2.0)))
