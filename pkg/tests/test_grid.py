from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from photonwigner import grid as gq

KERNELS = gq.SHIPPED_KERNELS
OMEGA = np.exp(2j * np.pi / 3)

cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
table = arrays(complex, (3, 3), elements=cplx)
real_table = arrays(float, (3, 3), elements=st.floats(-5, 5, allow_nan=False))


def delta(k, l):
    e = np.zeros((3, 3), dtype=complex)
    e[k, l] = 1.0
    return e


class TestDisplacement:
    def test_identity(self):
        np.testing.assert_array_equal(gq.displacement(0, 0), np.eye(3))

    def test_d10_diagonal(self):
        np.testing.assert_allclose(gq.displacement(1, 0), np.diag([1, OMEGA, OMEGA**2]), atol=1e-15)

    @pytest.mark.parametrize("k,l", list(product(range(3), repeat=2)))
    def test_unitary_and_traces(self, k, l):
        d = gq.displacement(k, l)
        np.testing.assert_allclose(d @ d.conj().T, np.eye(3), atol=1e-15)
        assert abs(np.trace(d) - 3 * (k == 0 and l == 0)) < 1e-15
        for kk, ll in product(range(3), repeat=2):
            expected = 3.0 if (k, l) == (kk, ll) else 0.0
            assert abs(np.trace(d @ gq.displacement(kk, ll).conj().T) - expected) < 1e-14

    def test_bases_are_similar(self):
        for k, l in product(range(3), repeat=2):
            a = gq.PHI_TO_N @ gq.displacement(k, l, "phi") @ gq.PHI_TO_N.conj().T
            np.testing.assert_allclose(a, gq.displacement(k, l, "n"), atol=1e-14)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            gq.displacement(3, 0)
        with pytest.raises(ValueError):
            gq.displacement(0, 0, basis="x")

    @pytest.mark.parametrize("a,b", [((1, 2), (2, 1)), ((2, 2), (1, 1)), ((1, 1), (0, 1))])
    def test_product_phase(self, a, b):
        k, l, q = gq.displacement_product_phase(*a, *b)
        lhs = gq.displacement(*a) @ gq.displacement(*b)
        np.testing.assert_allclose(lhs, gq.phase(q) * gq.displacement(k, l), atol=1e-15)


class TestQuantizer:
    def test_completeness_weyl(self):
        total = gq.all_quantizers("weyl67").sum(axis=(0, 1)) / 3
        np.testing.assert_allclose(total, np.eye(3), atol=1e-15)

    @pytest.mark.parametrize("kernel", KERNELS)
    def test_unit_trace_and_hermitian(self, kernel):
        om = gq.all_quantizers(kernel)
        np.testing.assert_allclose(np.einsum("mnaa->mn", om), 1.0, atol=1e-15)
        np.testing.assert_allclose(om, np.conj(np.swapaxes(om, -1, -2)), atol=1e-15)

    @pytest.mark.parametrize("kernel", KERNELS)
    def test_constant_maps_to_identity(self, kernel):
        np.testing.assert_allclose(gq.grid_weyl_op(np.ones((3, 3)), kernel), np.eye(3), atol=1e-15)

    def test_kernel_values(self):
        np.testing.assert_array_equal(gq.get_kernel("weyl67").table, [[1, 1, 1], [1, -1, 1], [1, 1, 1]])
        cos = gq.get_kernel("cos69").table.real
        np.testing.assert_allclose(cos, [[1, 1, 1], [1, 0.5, -0.5], [1, -0.5, -0.5]], atol=1e-15)
        assert gq.get_kernel("weyl67").unimodular and not gq.get_kernel("cos69").unimodular

    def test_unknown_kernel(self):
        with pytest.raises(ValueError, match="allowed: {weyl67, cos69}"):
            gq.get_kernel("husimi")

    def test_singular_kernel_rejected(self):
        with pytest.raises(ValueError, match="vanishing"):
            gq.KernelK("bad", np.zeros((3, 3)))


@pytest.mark.parametrize("kernel", KERNELS)
@given(f=table)
def test_weyl_round_trip(kernel, f):
    np.testing.assert_allclose(gq.grid_inverse(gq.grid_weyl_op(f, kernel), kernel), f, atol=1e-12)
    np.testing.assert_allclose(gq.grid_untilde(gq.grid_tilde(f, kernel), kernel), f, atol=1e-12)


@pytest.mark.parametrize("kernel", KERNELS)
@given(f=real_table)
def test_real_function_gives_hermitian_operator(kernel, f):
    op = gq.grid_weyl_op(f, kernel)
    np.testing.assert_allclose(op, op.conj().T, atol=1e-12)


class TestTilde:
    @pytest.mark.parametrize("kernel", KERNELS)
    def test_delta(self, kernel):
        np.testing.assert_allclose(gq.grid_tilde(delta(0, 0), kernel), gq.get_kernel(kernel).table / 9, atol=1e-15)

    def test_constant_supported_at_origin(self):
        np.testing.assert_allclose(gq.grid_tilde(np.ones((3, 3))), delta(0, 0), atol=1e-15)

    @given(f=table)
    def test_weyl_op_is_dual_sum(self, f):
        np.testing.assert_allclose(gq.operator_from_dual(gq.grid_tilde(f)), gq.grid_weyl_op(f), atol=1e-12)


class TestBoxtimes:
    def test_printed_examples(self):
        out = gq.boxtimes_table(delta(2, 2), delta(1, 1))
        assert abs(out[0, 0] + 1) < 1e-15
        out = gq.boxtimes_table(delta(1, 1), delta(0, 1))
        assert abs(out[1, 2] - np.exp(1j * np.pi / 3)) < 1e-15

    def test_full_basis_matches_oracle(self):
        v = gq.verify_table()
        assert (v["matched"], v["total"]) == (81, 81)
        assert v["max_residual"] <= 1e-12

    def test_printed_table_disagreements(self):
        # five misprinted terms; three of them also leave the correct (f, g) pair missing from its line
        assert len(gq.table_disagreements()) == 8
        assert gq.table_disagreements(gq.corrected_table()) == []

    def test_printed_table_differs_from_oracle(self):
        bad = 0
        for a, b in product(product(range(3), repeat=2), repeat=2):
            got = gq.boxtimes_table(delta(*a), delta(*b), gq.PRINTED_TABLE)
            bad += not np.allclose(got, gq.boxtimes_oracle(delta(*a), delta(*b)), atol=1e-12)
        assert bad > 0

    @given(table, table)
    def test_random_pairs(self, a, b):
        np.testing.assert_allclose(gq.boxtimes_table(a, b), gq.boxtimes_oracle(a, b), atol=1e-12)

    @given(table, table, table)
    def test_associative(self, a, b, c):
        lhs = gq.boxtimes_table(gq.boxtimes_table(a, b), c)
        rhs = gq.boxtimes_table(a, gq.boxtimes_table(b, c))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12 * max(1.0, np.max(np.abs(lhs))))

    @given(table)
    def test_identity(self, a):
        e = delta(0, 0)
        np.testing.assert_allclose(gq.boxtimes_table(e, a), a, atol=1e-15)
        np.testing.assert_allclose(gq.boxtimes_table(a, e), a, atol=1e-15)


@pytest.mark.parametrize("kernel", KERNELS)
@given(f=table, g=table)
def test_star_matches_operator_route(kernel, f, g):
    rhs = gq.grid_inverse(gq.grid_weyl_op(f, kernel) @ gq.grid_weyl_op(g, kernel), kernel)
    np.testing.assert_allclose(gq.star_grid(f, g, kernel), rhs, atol=1e-11)


@given(f=table)
def test_star_identity(f):
    one = np.ones((3, 3))
    np.testing.assert_allclose(gq.star_grid(one, f), f, atol=1e-12)
    np.testing.assert_allclose(gq.star_grid(f, one), f, atol=1e-12)


@given(f=real_table, g=real_table)
def test_star_sum_is_three_traces(f, g):
    # with f_hat = 1/3 sum f Omega and Tr Omega = 1 the pointwise sum is 3 Tr{f_hat g_hat}
    tr = np.trace(gq.grid_weyl_op(f) @ gq.grid_weyl_op(g))
    assert abs(gq.star_grid(f, g).sum() - 3 * tr) <= 1e-11 * max(1.0, abs(tr))


@given(f=table, g=table, h=table)
def test_star_associative(f, g, h):
    lhs = gq.star_grid(gq.star_grid(f, g), h)
    rhs = gq.star_grid(f, gq.star_grid(g, h))
    np.testing.assert_allclose(lhs, rhs, atol=1e-11 * max(1.0, np.max(np.abs(lhs))))
