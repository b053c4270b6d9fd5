import math

import numpy as np
import pytest

from hblab import hayman, series


@pytest.fixture
def half():
    return hayman.HaymanModel(1, 0.5)


class TestHaymanModel:

    def test_constants(self, half):
        assert half.C == pytest.approx(3 * 0.5 ** (2 / 3), rel=1e-12)
        assert half.D == pytest.approx(math.sqrt(2 * math.pi * 1.5 / 0.5 ** (2 / 3)), rel=1e-12)
        assert half.D == pytest.approx(3.8679326, abs=1e-7)
        assert half.growth_exponent == pytest.approx(1 / 3)

    def test_as_spec(self, half):
        assert half.as_spec() == series.ExpSingular(1, 0.5)

    @pytest.mark.parametrize("beta", [0, -1])
    def test_rejects_non_positive_beta(self, beta):
        with pytest.raises(ValueError, match="beta must be positive"):
            hayman.HaymanModel(beta, 0.5)

    @pytest.mark.parametrize("gamma", [0, 1, 1.5])
    def test_rejects_gamma_outside_unit_interval(self, gamma):
        with pytest.raises(ValueError, match="gamma must lie in"):
            hayman.HaymanModel(1, gamma)


class TestMab:

    def test_half_radius(self, half):
        log_m, a, b = hayman.mab(half, 0.5)

        assert log_m == pytest.approx(math.sqrt(2))
        assert a == pytest.approx(0.707107, abs=1e-6)
        assert b == pytest.approx(1.767767, abs=1e-6)

    def test_a_is_logarithmic_derivative(self, half):
        r, h = 0.5, 1e-6

        slope = (hayman.mab(half, r + h).log_m - hayman.mab(half, r - h).log_m) / (2 * h)

        assert hayman.mab(half, r).a == pytest.approx(r * slope, rel=1e-8)

    def test_a_is_increasing(self, half):
        radii = np.linspace(0.05, 0.95, 19)

        values = [hayman.mab(half, r).a for r in radii]

        assert np.all(np.diff(values) > 0)

    @pytest.mark.parametrize("r", [0, 1, -0.5])
    def test_rejects_radius_outside_disk(self, half, r):
        with pytest.raises(ValueError, match="Radius must lie in"):
            hayman.mab(half, r)


class TestSolveRn:

    @pytest.mark.parametrize("n", [1, 10, 1_000, 1_000_000])
    def test_residual(self, half, n):
        saddle = hayman.solve_rn(half, n)

        assert abs(hayman.mab(half, saddle.r_n).a - n) <= 1e-10 * n
        assert saddle.s_n == pytest.approx(1 - saddle.r_n)

    def test_first_order_approximation(self, half):
        saddle = hayman.solve_rn(half, 1_000_000)

        assert saddle.s_n == pytest.approx(saddle.first_order, rel=0.05)

    def test_radius_increases_with_n(self, half):
        radii = [hayman.solve_rn(half, n).r_n for n in (1, 10, 100, 1_000, 10_000)]

        assert np.all(np.diff(radii) > 0)

    def test_other_parameters(self):
        model = hayman.HaymanModel(2, 1 / 3)

        saddle = hayman.solve_rn(model, 5_000)

        assert abs(hayman.mab(model, saddle.r_n).a - 5_000) <= 1e-10 * 5_000

    def test_rejects_index_zero(self, half):
        with pytest.raises(ValueError, match="at least 1"):
            hayman.solve_rn(half, 0)


class TestExactCoefficients:

    def test_leading_coefficients(self, half):
        log_coeffs = hayman.exact_log_coefficients(half, 2)

        assert log_coeffs[0] == pytest.approx(1)
        assert log_coeffs[1] == pytest.approx(1 + math.log(0.5))
        #: c_2 = e (3/8 + 1/8)
        assert log_coeffs[2] == pytest.approx(1 + math.log(0.5))

    def test_budget(self, half):
        with pytest.raises(ValueError, match="exceed the budget"):
            hayman.exact_log_coefficients(half, 50, max_order=10)


class TestCompareExact:

    def test_columns(self, half):
        table = hayman.compare_exact(half, [0, 5])

        assert list(table.columns) == [
            "n",
            "log_exact",
            "log_estimate",
            "ratio_estimate",
            "log_closed_form",
            "ratio_closed_form",
        ]

    def test_row_zero_has_no_asymptotics(self, half):
        table = hayman.compare_exact(half, [0, 5])

        assert table["log_exact"].iloc[0] == pytest.approx(1)
        assert np.isnan(table["log_estimate"].iloc[0])
        assert np.isnan(table["ratio_closed_form"].iloc[0])

    @pytest.mark.parametrize(("beta", "gamma"), [(1, 0.5), (2, 1 / 3)])
    def test_ratios_approach_one(self, beta, gamma):
        table = hayman.compare_exact(hayman.HaymanModel(beta, gamma), [20, 200, 2_000])

        estimate_error = np.abs(np.log(table["ratio_estimate"]))
        closed_error = np.abs(np.log(table["ratio_closed_form"]))
        assert np.all(np.diff(estimate_error) < 0)
        assert closed_error.iloc[-1] < closed_error.iloc[0]

    @pytest.mark.parametrize(("beta", "gamma"), [(1, 0.5), (2, 1 / 3)])
    def test_both_routes_within_a_fifth_at_five_thousand(self, beta, gamma):
        table = hayman.compare_exact(hayman.HaymanModel(beta, gamma), [500, 5_000])

        for column in ("ratio_estimate", "ratio_closed_form"):
            error = np.abs(table[column] - 1)
            assert error.iloc[1] < 0.2
            assert error.iloc[1] < error.iloc[0]

    def test_rejects_negative_index(self, half):
        with pytest.raises(ValueError, match="non-negative"):
            hayman.compare_exact(half, [-1, 4])

    def test_rejects_empty_list(self, half):
        with pytest.raises(ValueError, match="No coefficient indices"):
            hayman.compare_exact(half, [])
