import math

import numpy as np
import pytest

from hblab import series


class TestCoeffSeries:

    def test_rejects_non_finite_coefficients(self):
        with pytest.raises(ValueError, match="finite"):
            series.CoeffSeries([1.0, np.inf])

    def test_coefficients_are_read_only(self):
        coeffs = series.CoeffSeries([1.0, 2.0])

        with pytest.raises(ValueError):
            coeffs.coeffs[0] = 5

    def test_values_apply_scale_exponent(self):
        coeffs = series.CoeffSeries([1.0, 2.0], scale_exp=math.log(3))

        np.testing.assert_allclose(coeffs.values(), [3.0, 6.0])

    def test_log_abs_reaches_past_double_range(self):
        coeffs = series.CoeffSeries([1.0, 0.0], scale_exp=1000.0)

        assert coeffs.log_abs()[0] == pytest.approx(1000.0)
        assert coeffs.log_abs()[1] == -np.inf
        assert np.isinf(coeffs.values()[0])

    def test_shift_keeps_truncation(self):
        shifted = series.polynomial([1, 2, 3]).shift(1)

        np.testing.assert_array_equal(shifted.values(), [0, 1, 2])

    def test_truncate_refuses_to_extend(self):
        with pytest.raises(ValueError, match="extend"):
            series.polynomial([1, 2]).truncate(5)

    def test_add_aligns_scales(self):
        left = series.CoeffSeries([1.0, 1.0], scale_exp=math.log(2))
        right = series.CoeffSeries([1.0, 3.0])

        np.testing.assert_allclose(left.add(right).values(), [3.0, 5.0])

    def test_scale_by_folds_overflow_into_exponent(self):
        big = series.CoeffSeries([1e200, 1e200])

        scaled = big.scale_by(1e200)

        assert np.all(np.isfinite(scaled.coeffs))
        np.testing.assert_allclose(scaled.log_abs(), 2 * 200 * math.log(10))

    def test_evaluate_matches_closed_form(self):
        assert series.polynomial([1, -1]).evaluate(0.25) == pytest.approx(0.75)


class TestMul:

    def test_difference_of_squares(self):
        product = series.mul(series.polynomial([1, 1], 2), series.polynomial([1, -1], 2))

        np.testing.assert_allclose(product.values(), [1, 0, -1])

    def test_identity(self):
        values = np.array([0.5, -2, 3j, 4])

        product = series.mul(series.polynomial([1], 3), series.polynomial(values))

        np.testing.assert_allclose(product.values(), values)

    def test_telescoping_geometric(self):
        product = series.mul(series.polynomial([1, -1], 10), series.geometric(1, 10))

        np.testing.assert_allclose(product.values(), [1] + [0] * 10, atol=1e-15)

    def test_truncation_is_smaller_of_the_two(self):
        product = series.mul(series.polynomial([1], 3), series.polynomial([1], 7))

        assert product.trunc == 3

    def test_commutative_and_associative(self):
        rng = np.random.default_rng(3)
        a, b, c = (series.polynomial(rng.uniform(-1, 1, 16) + 1j * rng.uniform(-1, 1, 16)) for _ in range(3))

        np.testing.assert_allclose(series.mul(a, b).values(), series.mul(b, a).values(), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(
            series.mul(series.mul(a, b), c).values(), series.mul(a, series.mul(b, c)).values(), rtol=1e-12, atol=1e-12
        )


class TestBinomialNeg:

    def test_gamma_one_is_geometric(self):
        np.testing.assert_allclose(series.binomial_neg(1, 6).values(), np.ones(7))

    def test_gamma_two_counts(self):
        np.testing.assert_allclose(series.binomial_neg(2, 6).values(), np.arange(1, 8))

    def test_gamma_half(self):
        values = series.binomial_neg(0.5, 2).values()

        assert values[1] == pytest.approx(0.5)
        assert values[2] == pytest.approx(0.375)

    @pytest.mark.parametrize("gamma", [0, -1.5])
    def test_rejects_non_positive_gamma(self, gamma):
        with pytest.raises(ValueError, match="positive"):
            series.binomial_neg(gamma, 4)

    def test_large_exponent_stays_finite(self):
        coeffs = series.binomial_neg(400, 4000)

        assert np.all(np.isfinite(coeffs.coeffs))
        assert coeffs.scale_exp > 0


class TestExpSeries:

    def test_exponential_of_z(self):
        values = series.exp_series(series.polynomial([0, 1], 10)).values()

        np.testing.assert_allclose(values, [1 / math.factorial(n) for n in range(11)], rtol=1e-14)

    def test_exponential_of_zero(self):
        np.testing.assert_allclose(series.exp_series(series.polynomial([0], 5)).values(), [1, 0, 0, 0, 0, 0])

    def test_exponential_of_binomial_half(self):
        values = series.exp_series(series.binomial_neg(0.5, 1)).values()

        assert values[0].real == pytest.approx(2.718282, abs=1e-6)
        assert values[1].real == pytest.approx(1.359141, abs=1e-6)

    def test_exponential_is_a_homomorphism(self):
        rng = np.random.default_rng(11)
        g = series.polynomial(rng.uniform(-1, 1, 21))
        h = series.polynomial(rng.uniform(-1, 1, 21))

        left = series.exp_series(g + h).values()
        right = series.mul(series.exp_series(g), series.exp_series(h)).values()

        np.testing.assert_allclose(left, right, rtol=1e-10, atol=1e-10 * np.max(np.abs(left)))

    def test_rescaling_preserves_materialized_values(self):
        g = series.binomial_neg(0.5, 60).scale_by(3)

        plain = series.exp_series(g)
        rescaled = series.exp_series(g, threshold=1e3)

        assert rescaled.scale_exp > 0
        np.testing.assert_allclose(rescaled.values(), plain.values(), rtol=1e-12)


class TestPhiCoeffs:

    def test_local_dirichlet(self):
        np.testing.assert_allclose(series.phi_coeffs(series.LocalDirichlet(1.0), 4).values(), [0, 1, 1, 1, 1])

    def test_local_dirichlet_off_one_has_unimodular_coefficients(self):
        zeta = np.exp(0.7j)

        values = series.phi_coeffs(series.LocalDirichlet(zeta), 6).values()

        assert values[0] == 0
        np.testing.assert_allclose(np.abs(values[1:]), 1, rtol=1e-12)
        np.testing.assert_allclose(values[1:], zeta ** -np.arange(1, 7), rtol=1e-12)

    def test_local_dirichlet_rejects_point_off_circle(self):
        with pytest.raises(ValueError, match="unit circle"):
            series.LocalDirichlet(0.9)

    def test_rational_pole(self):
        np.testing.assert_allclose(series.phi_coeffs(series.RationalPole(1, 2), 4).values(), [0, 1, 2, 3, 4])

    def test_rational_pole_rejects_zero_order(self):
        with pytest.raises(ValueError, match="N must be"):
            series.RationalPole(0, 0)

    def test_exp_singular(self):
        values = series.phi_coeffs(series.ExpSingular(1, 0.5), 1).values()

        np.testing.assert_allclose(values.real, [math.e, math.e / 2], rtol=1e-12)

    def test_exp_singular_coefficients_real_and_positive(self):
        values = series.phi_coeffs(series.ExpSingular(2, 1 / 3), 300).values()

        assert np.all(values.real > 0)
        np.testing.assert_array_equal(values.imag, 0)

    def test_exp_singular_rejects_gamma_out_of_range(self):
        with pytest.raises(ValueError, match="gamma"):
            series.ExpSingular(1, 1.5)

    def test_user_rational_long_division(self):
        values = series.phi_coeffs(series.UserRational((0, 1), (1, -2, 1)), 5).values()

        np.testing.assert_allclose(values, [0, 1, 2, 3, 4, 5])

    def test_user_rational_rejects_zero_constant_term(self):
        with pytest.raises(ValueError, match="constant term"):
            series.UserRational((1,), (0, 1))

    def test_user_rational_rejects_pole_inside_disk(self):
        with pytest.raises(ValueError, match="inside the disk"):
            series.UserRational((1,), (1, -2))

    def test_negative_truncation_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            series.phi_coeffs(series.LocalDirichlet(), -1)


class TestBoundaryData:

    def test_log_zeros_of_known_families(self):
        assert series.LocalDirichlet().log_zeros() == [(1 + 0j, 1)]
        assert series.RationalPole(1, 3).log_zeros() == [(1 + 0j, 3)]
        assert series.ExpSingular(1, 0.5).log_zeros() == []
        assert series.ExpSingular(1, 0.5).singular_points() == [1 + 0j]

    def test_user_rational_clusters_repeated_boundary_root(self):
        zeros = series.UserRational((1,), (1, -2, 1)).log_zeros()

        assert len(zeros) == 1
        zeta, multiplicity = zeros[0]
        assert multiplicity == 2
        assert zeta == pytest.approx(1)

    def test_user_rational_cancels_shared_root(self):
        assert series.UserRational((1, -1), (1, -2, 1)).log_zeros()[0][1] == 1

    def test_boundary_log_abs_matches_direct_evaluation(self):
        theta = np.linspace(0.5, 6, 7)
        spec = series.RationalPole(2, 2)

        direct = np.log(np.abs(np.exp(2j * theta) / (1 - np.exp(1j * theta)) ** 2))

        np.testing.assert_allclose(spec.boundary_log_abs(theta), direct, rtol=1e-12)

    def test_exp_singular_boundary_log_abs_stays_finite_near_pole(self):
        theta = np.array([1e-6, 1e-3, 0.5])

        assert np.all(np.isfinite(series.ExpSingular(1, 0.5).boundary_log_abs(theta)))


class TestParsePhi:

    def test_zero(self):
        spec = series.parse_phi("zero")

        np.testing.assert_array_equal(series.phi_coeffs(spec, 3).values(), [0, 0, 0, 0])

    def test_dirichlet_default_zeta(self):
        assert series.parse_phi("dirichlet") == series.LocalDirichlet(1.0)

    def test_dirichlet_complex_zeta(self):
        assert series.parse_phi("dirichlet:zeta=0+1i") == series.LocalDirichlet(1j)

    def test_pole(self):
        assert series.parse_phi("pole:M=1,N=2") == series.RationalPole(1, 2)

    def test_exp(self):
        assert series.parse_phi("exp:beta=2,gamma=0.25") == series.ExpSingular(2.0, 0.25)

    def test_rational(self):
        spec = series.parse_phi("rational:num=0 1;den=1 -1")

        np.testing.assert_allclose(series.phi_coeffs(spec, 3).values(), [0, 1, 1, 1])

    def test_missing_parameter(self):
        with pytest.raises(ValueError, match="missing parameter"):
            series.parse_phi("pole:M=1")

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="Unknown symbol family"):
            series.parse_phi("bessel")
