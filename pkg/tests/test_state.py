import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from photonwigner import algebra, state
from photonwigner.checks import bb_position_check, pole_adjacent_directions
from photonwigner.units import Units

SQ = np.sqrt(2.0)
kvec = arrays(float, 3, elements=st.floats(-1e3, 1e3, allow_nan=False))


class TestTriad:
    def test_z_axis(self):
        t = state.helicity_triad([0.0, 0.0, 1.0])
        np.testing.assert_allclose(t.e, np.array([1, 1j, 0]) / SQ, atol=1e-15)
        S = algebra.spin1("standard").dot([0, 0, 1])
        np.testing.assert_allclose(S @ t.e, t.e, atol=1e-15)

    def test_negative_z_is_conjugate(self):
        e = state.helicity_triad([0.0, 0.0, 1.0]).e
        np.testing.assert_array_equal(state.helicity_triad([0.0, 0.0, -1.0]).e, e.conj())

    @given(kvec)
    def test_properties(self, k):
        assume(np.linalg.norm(k) > 1e-6)
        r = state.triad_residuals(k[None])
        assert max(r.values()) <= 1e-12, r

    def test_pole_adjacent(self):
        r = state.triad_residuals(pole_adjacent_directions())
        assert max(r.values()) <= 1e-12

    def test_reflection_is_exact(self, rng):
        k = rng.standard_normal((500, 3))
        np.testing.assert_array_equal(state.helicity_triad(-k).e, state.helicity_triad(k).e.conj())

    @pytest.mark.parametrize("k", [[0, 0, 0], [np.nan, 0, 1], [1, 2]])
    def test_rejects(self, k):
        with pytest.raises(ValueError):
            state.helicity_triad(k)


class TestGrid:
    def test_offset_and_measure(self):
        g = state.KGrid.centered(4, 0.5)
        np.testing.assert_allclose(g.nodes1d(0), [-0.75, -0.25, 0.25, 0.75])
        assert g.measure == pytest.approx(0.125 / (2 * np.pi) ** 3)

    def test_odd_count_hits_origin(self):
        with pytest.raises(ValueError, match="k = 0"):
            state.KGrid.centered(5, 0.5)


class TestBuildState:
    def test_round_trip(self, small_grid, rng):
        z = lambda: rng.standard_normal(small_grid.shape) + 1j * rng.standard_normal(small_grid.shape)
        a = state.SpectralAmplitudes(small_grid, z(), z())
        b = state.alpha_from_state(state.build_state(a))
        np.testing.assert_allclose(b.alpha_plus, a.alpha_plus, atol=1e-12)
        np.testing.assert_allclose(b.alpha_minus, a.alpha_minus, atol=1e-12)

    def test_zero_state(self, small_grid):
        zero = np.zeros(small_grid.shape)
        s = state.build_state(state.SpectralAmplitudes(small_grid, zero, zero))
        assert np.all(s.psi == 0)
        a = state.alpha_from_state(s)
        assert np.all(a.alpha_plus == 0) and np.all(a.alpha_minus == 0)

    def test_single_helicity(self, small_grid):
        s = state.gaussian_state(small_grid, (0, 0, 1), 0.5, (1.0, 0.0))
        assert np.max(np.abs(state.alpha_from_state(s).alpha_minus)) <= 1e-12

    def test_bump_polarization(self):
        g = state.KGrid.centered(8, 0.1, offset=(0, 0, 2.0))
        s = state.gaussian_state(g, (0, 0, 2.0), 0.02, (1.0, 0.0))
        idx = np.unravel_index(np.argmax(np.linalg.norm(s.psi, axis=-1)), g.shape)
        v = s.psi[idx] / np.linalg.norm(s.psi[idx])
        assert abs(abs(np.vdot(np.array([1, 1j, 0]) / SQ, v)) - 1) < 1e-3

    def test_non_transverse_rejected(self, small_grid):
        with pytest.raises(ValueError, match="transverse"):
            state.PhotonStateK(small_grid, small_grid.k.astype(complex))

    def test_amplitude_shape_checked(self, small_grid):
        with pytest.raises(ValueError, match="shape"):
            state.SpectralAmplitudes(small_grid, np.zeros((2, 2, 2)), np.zeros(small_grid.shape))


class TestProjection:
    def test_transverse_unchanged(self, packet):
        np.testing.assert_allclose(state.transverse_project(packet.grid, packet.psi).psi, packet.psi, atol=1e-12)

    def test_longitudinal_removed(self, small_grid):
        v = small_grid.k / small_grid.norm[..., None]
        assert np.max(np.abs(state.transverse_project(small_grid, v).psi)) <= 1e-15

    def test_idempotent(self, small_grid, rng):
        v = rng.standard_normal(small_grid.shape + (3,)) + 1j * rng.standard_normal(small_grid.shape + (3,))
        once = state.transverse_project(small_grid, v)
        np.testing.assert_allclose(state.transverse_project(small_grid, once.psi).psi, once.psi, atol=1e-12)


class TestPosition:
    grid = state.KGrid.centered(16, 0.4)
    s = state.gaussian_state(grid, (0.0, 0.3, 2.0), 0.5, (1.0, 0.5j))

    def test_round_trip(self):
        f = state.synthesize_position(self.s)
        back = state.state_from_position(f, self.grid)
        np.testing.assert_allclose(back.psi, self.s.psi, atol=1e-10)

    def test_divergence_free(self):
        assert state.synthesize_position(self.s, t=0.7).divergence_residual <= 1e-6

    @pytest.mark.parametrize("units", [Units(), Units(2.0, 3.0)])
    def test_energy_two_ways(self, units):
        f = state.synthesize_position(self.s, units=units)
        dx3 = np.prod([a.spacing for a in f.axes])
        ex = np.sum(np.abs(f.psi) ** 2) * dx3
        ek = state.averages(self.s, units)["energy"]
        assert abs(ex - ek) <= 1e-6 * ek

    def test_energy_localization_full_box(self):
        f = state.synthesize_position(self.s)
        big = [(-1e3, 1e3)] * 3
        assert state.energy_loc_prob(f, big) == pytest.approx(1.0)
        assert state.energy_loc_prob(f, [(50, 60)] * 3) == 0.0


class TestBB:
    def test_forms_agree(self, packet, rng):
        other = state.gaussian_state(packet.grid, (0, 0.2, 1.0), 0.5, (0.3, 1.0))
        z = state.bb_inner(packet, other)
        za = state.bb_inner_alpha(state.alpha_from_state(packet), state.alpha_from_state(other))
        assert abs(z - za) <= 1e-12 * abs(z)
        assert abs(state.bb_inner(other, packet) - np.conj(z)) <= 1e-15

    def test_norm_positive(self, packet):
        z = state.bb_inner(packet, packet)
        assert z.imag == 0 and z.real > 0
        assert state.bb_norm(packet) == pytest.approx(1.0)

    def test_grid_mismatch(self, packet):
        other = state.gaussian_state(state.KGrid.centered(6, 0.5), (0, 0, 1), 0.5)
        with pytest.raises(ValueError, match="different"):
            state.bb_inner(packet, other)

    def test_position_form_small_grid(self):
        r = bb_position_check(n=8, dk=0.5, k0=(0, 0, 1.5), sigma=0.6)
        assert r["relative_error"] < 0.1

    @pytest.mark.slow
    @pytest.mark.xfail(strict=True, reason="direct x-space double sum reaches about 3% on 16^3, not 2%")
    def test_position_form_16(self):
        r = bb_position_check(n=16)
        assert r["relative_error"] <= 0.02 and r["norm_relative_error"] <= 0.02


class TestProbabilities:
    def test_full_grid(self, packet):
        p = state.probabilities(packet)
        assert p["momentum"] == pytest.approx(1.0, abs=1e-12)
        assert p["helicity_plus"] + p["helicity_minus"] == pytest.approx(p["momentum"], abs=1e-12)

    def test_single_helicity(self, small_grid):
        s = state.gaussian_state(small_grid, (0, 0, 1), 0.5, (0.0, 1.0))
        assert state.helicity_prob(s, 1) <= 1e-24

    def test_box_sum_rule(self, packet):
        box = [(-1, 1), (-1, 0.5), (0, 2)]
        p = state.probabilities(packet, box)
        assert 0 < p["momentum"] < 1
        assert p["helicity_plus"] + p["helicity_minus"] == pytest.approx(p["momentum"], abs=1e-12)

    def test_empty_box(self, packet):
        assert state.momentum_prob(packet, [(50, 60)] * 3) == 0.0

    def test_bad_helicity(self, packet):
        with pytest.raises(ValueError):
            state.helicity_prob(packet, 0)


class TestAverages:
    def test_narrow_packet(self):
        g = state.KGrid.centered(16, 0.05, offset=(0, 0, 3.0))
        s = state.gaussian_state(g, (0, 0, 3.0), 0.08)
        av = state.averages(s)
        assert av["energy"] == pytest.approx(3.0, rel=1e-2)
        assert np.max(np.abs(av["momentum"][:2])) <= 1e-10

    def test_units_scale(self, packet):
        a, b = state.averages(packet), state.averages(packet, Units(2.0, 3.0))
        assert b["energy"] == pytest.approx(6.0 * a["energy"])
        np.testing.assert_allclose(b["momentum"], 2.0 * a["momentum"])

    def test_unnormalized_warns(self, small_grid):
        s = state.gaussian_state(small_grid, (0, 0, 1), 0.5, normalize=False)
        with pytest.warns(RuntimeWarning, match="rescaling"):
            state.averages(s)

    def test_time_independent(self, packet):
        e0 = state.averages(packet)["energy"]
        assert state.averages(state.evolve(packet, 3.7))["energy"] == pytest.approx(e0, rel=1e-14)


class TestEvolve:
    def test_zero_step(self, packet):
        np.testing.assert_array_equal(state.evolve(packet, 0.0).psi, packet.psi)

    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_composition(self, t1, t2):
        g = state.KGrid.centered(4, 0.5)
        s = state.gaussian_state(g, (0, 0, 0.5), 0.5, (1.0, 0.2))
        a = state.evolve(state.evolve(s, t1), t2)
        b = state.evolve(s, t1 + t2)
        np.testing.assert_allclose(a.psi, b.psi, atol=1e-12)
        assert a.t == pytest.approx(t1 + t2)


@pytest.mark.parametrize("weights,helicity", [((1.0, 0.0), 1), ((0.0, 1.0), -1)])
def test_primed_helicity(small_grid, weights, helicity):
    s = state.gaussian_state(small_grid, (0.1, 0, 1.0), 0.5, weights)
    assert state.helicity_check(small_grid, state.primed_representation(s), helicity) <= 1e-10
