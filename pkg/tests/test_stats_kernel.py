import math

import numpy as np
import pytest
from scipy import stats

import oracles
from conftest import T1, T2
from speedcheck.errors import EmptySample, InvalidArgument, UnsupportedSampleSize, ZeroVariance
from speedcheck.stats_kernel import (
    mean,
    median,
    normal_quantile,
    shapiro_wilk,
    t_cdf,
    t_quantile,
    variance,
    welch_one_sided,
)


class TestMedianMean:
    def test_median_example(self):
        assert median(T1) == 2.046

    def test_median_single(self):
        assert median([5.0]) == 5.0

    def test_median_even(self):
        assert median([1.0, 3.0]) == 2.0
        assert median([4.0, 1.0, 3.0, 2.0]) == 2.5

    def test_median_empty(self):
        with pytest.raises(EmptySample):
            median([])

    def test_mean_examples(self):
        # sums 5.225 and 10.225 over 5 values
        assert mean(T2) == pytest.approx(1.045, abs=1e-12)
        assert mean(T1) == pytest.approx(2.045, abs=1e-12)
        assert mean([0.7, 0.7, 0.7]) == pytest.approx(0.7, abs=1e-15)

    def test_mean_empty(self):
        with pytest.raises(EmptySample):
            mean([])

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidArgument):
            mean([1.0, float("nan")])

    def test_variance_matches_numpy(self):
        x = [1.5, 2.25, 3.0, 7.5]
        assert variance(x) == pytest.approx(np.var(x, ddof=1), rel=1e-14)


class TestQuantiles:
    def test_t_median_is_zero(self):
        for df in (0.5, 1, 3.7, 1000):
            assert t_quantile(0.5, df) == 0.0

    @pytest.mark.parametrize(
        "p, df, expected",
        [
            # frozen from oracles.t_quantile (mpmath incomplete beta + bisection)
            (0.95, 8, 1.8595480375308977),
            (0.99, 8, 2.896459447709622),
        ],
    )
    def test_t_frozen(self, p, df, expected):
        assert t_quantile(p, df) == pytest.approx(expected, abs=1e-8)

    def test_t_symmetry(self):
        for df in (1.0, 2.5, 8.0, 40.0):
            assert t_quantile(0.1, df) == pytest.approx(-t_quantile(0.9, df), abs=1e-10)

    def test_t_exact_cauchy(self):
        # df = 1 is the Cauchy distribution: quantile tan(pi (p - 1/2))
        for p in (0.6, 0.9, 0.99):
            assert t_quantile(p, 1.0) == pytest.approx(math.tan(math.pi * (p - 0.5)), abs=1e-8)

    def test_t_large_df_tends_to_normal(self):
        assert abs(t_quantile(0.975, 1e6) - 1.959964) < 1e-4

    def test_t_inverts_cdf(self):
        for p in (1e-6, 0.02, 0.7, 0.999999):
            for df in (0.8, 3.0, 29.5):
                assert t_cdf(t_quantile(p, df), df) == pytest.approx(p, rel=1e-9)

    @pytest.mark.parametrize("p, df", [(0.0, 3), (1.0, 3), (-0.1, 3), (0.5, 0), (0.5, -2), (0.5, float("inf"))])
    def test_t_invalid(self, p, df):
        with pytest.raises(InvalidArgument):
            t_quantile(p, df)

    def test_normal_values(self):
        assert normal_quantile(0.975) == pytest.approx(1.960, abs=5e-4)
        assert normal_quantile(0.5) == 0.0
        # frozen from oracles.normal_quantile (erf + bisection)
        assert normal_quantile(0.95) == pytest.approx(1.6448536269514715, abs=1e-8)

    @pytest.mark.parametrize("p", [0.0, 1.0, 1.5])
    def test_normal_invalid(self, p):
        with pytest.raises(InvalidArgument):
            normal_quantile(p)


class TestShapiroWilk:
    @pytest.mark.parametrize("sample", [T1, T2])
    def test_worked_example(self, sample):
        res = shapiro_wilk(sample, 0.95)
        assert res.w_statistic == pytest.approx(0.9862, abs=5e-5)
        assert res.p_value == pytest.approx(0.9647, abs=5e-5)
        assert res.passed

    def test_constant_sample(self):
        with pytest.raises(ZeroVariance):
            shapiro_wilk([1.0, 1.0, 1.0, 1.0])

    @pytest.mark.parametrize("n", [0, 1, 2, 5001])
    def test_size_limits(self, n):
        x = list(np.linspace(1, 2, n))
        with pytest.raises((UnsupportedSampleSize, EmptySample)):
            shapiro_wilk(x)

    def test_n3_exact(self):
        # equally spaced triple is perfectly "normal": W = 1, p = 1
        res = shapiro_wilk([1.0, 2.0, 3.0])
        assert res.w_statistic == pytest.approx(1.0, abs=1e-12)
        assert res.p_value == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 11, 12, 25, 100, 1000, 5000])
    def test_agrees_with_scipy(self, n):
        rng = np.random.default_rng(n)
        for transform in (lambda z: z, np.exp, lambda z: z**3):
            x = transform(rng.standard_normal(n))
            ours = shapiro_wilk(x)
            ref = stats.shapiro(x)
            # scipy evaluates in single precision
            assert ours.w_statistic == pytest.approx(ref.statistic, abs=1e-5)
            assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-5)

    def test_decision_rule(self):
        x = np.exp(np.random.default_rng(3).standard_normal(40))
        res = shapiro_wilk(x, 0.95)
        assert 0 < res.w_statistic <= 1
        assert res.passed == (res.p_value >= 0.05)
        strict = shapiro_wilk(x, 0.01)
        assert strict.passed == (strict.p_value >= 0.99)

    def test_invalid_level(self):
        with pytest.raises(InvalidArgument):
            shapiro_wilk(T1, 1.0)


class TestWelch:
    @pytest.mark.parametrize(
        "a, b, alpha, expected",
        [
            (T1, T2, 0.99, -0.02574667),
            (T1, T2, 0.95, 0.3414632),
            (T2, T1, 0.01, 0.02574667),
        ],
    )
    def test_worked_example(self, a, b, alpha, expected):
        # printed to 7 significant digits
        assert welch_one_sided(a, b, alpha).lower_bound == pytest.approx(expected, abs=5e-8)

    def test_against_high_precision_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            a = rng.normal(3.0, 0.4, size=rng.integers(2, 12))
            b = rng.normal(2.8, 1.1, size=rng.integers(2, 12))
            alpha = float(rng.uniform(0.05, 0.995))
            ours = welch_one_sided(a, b, alpha).lower_bound
            ref = oracles.welch_lower_bound(a, b, alpha)
            assert ours == pytest.approx(ref, abs=1e-9)

    def test_fields(self):
        res = welch_one_sided(T1, T2, 0.95)
        assert res.mean_difference == pytest.approx(1.0, abs=1e-12)
        # identical spreads, equal sizes: df = k + m - 2
        assert res.degrees_of_freedom == pytest.approx(8.0, abs=1e-9)
        assert res.t_statistic == pytest.approx(res.mean_difference / res.standard_error)
        assert res.lower_bound < res.mean_difference

    def test_matches_scipy(self):
        rng = np.random.default_rng(5)
        a, b = rng.normal(10, 1, 17), rng.normal(9.5, 2, 9)
        ref = stats.ttest_ind(a, b, equal_var=False, alternative="greater").confidence_interval(0.9)
        assert welch_one_sided(a, b, 0.9).lower_bound == pytest.approx(ref.low, abs=1e-8)

    def test_df_range(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            k, m = rng.integers(2, 40, size=2)
            res = welch_one_sided(rng.gamma(2, size=k), rng.gamma(2, size=m) * 5)
            assert min(k, m) - 1 - 1e-9 <= res.degrees_of_freedom <= k + m - 2 + 1e-9

    def test_one_constant_sample_is_fine(self):
        res = welch_one_sided([2.0, 2.0, 2.0], [1.0, 1.2, 0.9])
        assert math.isfinite(res.lower_bound)

    def test_both_constant(self):
        with pytest.raises(ZeroVariance):
            welch_one_sided([2.0, 2.0], [1.0, 1.0])

    def test_too_small(self):
        with pytest.raises(InvalidArgument):
            welch_one_sided([2.0], [1.0, 1.5])
