"""Randomized checks of the invariants, 1000 examples each."""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import confirmed, unconfirmed
from speedcheck.aggregate import (
    WeightKind,
    WeightScheme,
    gain_from_rows,
    min_sample_size,
    min_sample_size_raw,
    overall_gain,
    proportion_ci,
)
from speedcheck.errors import ZeroVariance
from speedcheck.protocol import BASELINE, OPTIMIZED, Decision, TimingSample, assess_speedup
from speedcheck.stats_kernel import median, shapiro_wilk, welch_one_sided

CASES = settings(max_examples=1000, deadline=None)

times = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
samples = st.lists(times, min_size=3, max_size=40)
levels = st.floats(min_value=0.01, max_value=0.999)
scales = st.floats(min_value=1e-3, max_value=1e3)


def spread(xs):
    return max(xs) - min(xs)


@CASES
@given(samples, st.randoms(use_true_random=False))
def test_median_and_normality_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert median(xs) == median(ys)
    assume(spread(xs) > 1e-9 * max(xs))
    a, b = shapiro_wilk(xs), shapiro_wilk(ys)
    assert a.w_statistic == pytest.approx(b.w_statistic, abs=1e-12)
    assert a.p_value == pytest.approx(b.p_value, abs=1e-9)


@CASES
@given(samples, samples, levels, scales)
def test_welch_scale_equivariance(a, b, alpha, lam):
    assume(spread(a) + spread(b) > 1e-6)
    base = welch_one_sided(a, b, alpha)
    scaled = welch_one_sided([lam * x for x in a], [lam * x for x in b], alpha)
    tol = 1e-8 * lam * (abs(base.mean_difference) + base.standard_error * 10)
    assert scaled.lower_bound == pytest.approx(lam * base.lower_bound, abs=tol)


@CASES
@given(samples, samples, levels, st.floats(min_value=-1e-3 / 2, max_value=1e3))
def test_welch_shift_invariance(a, b, alpha, c):
    assume(spread(a) + spread(b) > 1e-6)
    base = welch_one_sided(a, b, alpha)
    shifted = welch_one_sided([x + c for x in a], [x + c for x in b], alpha)
    tol = 1e-9 * (max(a + b) + abs(c)) * 100
    assert shifted.lower_bound == pytest.approx(base.lower_bound, abs=tol)


@CASES
@given(samples, samples, levels, scales)
def test_verdict_scale_invariance(a, b, alpha, lam):
    base, opt = TimingSample("x", BASELINE, a), TimingSample("x", OPTIMIZED, b)
    try:
        v = assess_speedup(base, opt, alpha)
        w = assess_speedup(base.scaled(lam), opt.scaled(lam), alpha)
    except ZeroVariance:
        assume(False)
    # keep clear of decision boundaries, where rounding may legitimately flip a verdict
    for r in (v.baseline_normality, v.optimized_normality):
        if r is not None:
            assume(abs(r.p_value - (1 - r.alpha)) > 1e-6)
    if v.welch is not None:
        assume(abs(v.welch.lower_bound) > 1e-7 * (abs(v.welch.mean_difference) + v.welch.standard_error))
    assert w.decision == v.decision
    if v.speedup is not None:
        assert w.speedup == pytest.approx(v.speedup, rel=1e-12)


@CASES
@given(samples, samples, levels, levels)
def test_confirmation_is_downward_closed_in_alpha(a, b, a1, a2):
    lo, hi = sorted((a1, a2))
    base, opt = TimingSample("x", BASELINE, a), TimingSample("x", OPTIMIZED, b)
    try:
        v_hi = assess_speedup(base, opt, hi, min_runs=1)
        v_lo = assess_speedup(base, opt, lo, min_runs=1)
    except ZeroVariance:
        assume(False)
    assert v_lo.welch.lower_bound >= v_hi.welch.lower_bound
    if v_hi.decision == Decision.SPEEDUP_CONFIRMED:
        assert v_lo.decision == Decision.SPEEDUP_CONFIRMED
    for v in (v_lo, v_hi):
        assert (v.decision == Decision.SPEEDUP_CONFIRMED) == (v.welch.lower_bound > 0)


medians = st.tuples(times, times)
suites = st.lists(medians, min_size=1, max_size=12)


def verdicts_for(pairs, alphas=None):
    return [confirmed(f"b{i}", before, after, 0.95 if alphas is None else alphas[i])
            for i, (before, after) in enumerate(pairs)]


@CASES
@given(suites, st.data())
def test_gain_invariant_under_weight_scaling(pairs, data):
    raw = data.draw(st.lists(st.floats(0.01, 100), min_size=len(pairs), max_size=len(pairs)))
    lam = data.draw(scales)
    verdicts = verdicts_for(pairs)
    w1 = {f"b{i}": w for i, w in enumerate(raw)}
    w2 = {k: lam * w for k, w in w1.items()}
    g1 = overall_gain(verdicts, WeightScheme(WeightKind.USER_SUPPLIED, w1))
    g2 = overall_gain(verdicts, WeightScheme(WeightKind.USER_SUPPLIED, w2))
    assert g2.overall_gain == pytest.approx(g1.overall_gain, rel=1e-9, abs=1e-12)
    assert math.fsum(r.weight for r in g2.included) == pytest.approx(1.0, abs=1e-12)


@CASES
@given(st.lists(times, min_size=1, max_size=12))
def test_no_change_means_no_gain(meds):
    verdicts = [unconfirmed(f"b{i}", m, m, 0.9) for i, m in enumerate(meds)]
    assert overall_gain(verdicts, WeightScheme(WeightKind.UNIFORM), include_slowdowns=True).overall_gain == pytest.approx(0.0, abs=1e-12)


@CASES
@given(suites, st.data(), st.sampled_from([WeightKind.UNIFORM, WeightKind.MEDIAN_PROPORTIONAL]))
def test_gain_increases_when_an_optimized_median_drops(pairs, data, kind):
    j = data.draw(st.integers(0, len(pairs) - 1))
    factor = data.draw(st.floats(0.01, 0.99))
    before, after = pairs[j]
    better = list(pairs)
    better[j] = (before, after * factor)
    alphas = data.draw(st.lists(levels, min_size=len(pairs), max_size=len(pairs)))
    g0 = overall_gain(verdicts_for(pairs, alphas), WeightScheme(kind))
    g1 = overall_gain(verdicts_for(better, alphas), WeightScheme(kind))
    assert g1.overall_gain > g0.overall_gain
    assert g0.overall_gain < 1
    assert g0.aggregate_alpha == min(alphas)
    assert gain_from_rows(g0.included) == pytest.approx(g0.overall_gain, abs=1e-12)


@CASES
@given(st.integers(10, 5000), st.data(), levels)
def test_wald_symmetry(p, data, alpha):
    n = data.draw(st.integers(p, 5000))
    est = proportion_ci(p, n, alpha)
    c = est.proportion
    assert 0 <= est.low <= c <= est.high <= 1
    if c - est.half_width >= 0 and c + est.half_width <= 1:
        assert (est.low + est.high) / 2 == pytest.approx(c, abs=1e-12)
    w = proportion_ci(p, n, alpha, "WilsonContinuity")
    assert 0 <= w.low <= w.high <= 1


proportions = st.floats(min_value=1e-3, max_value=1 - 1e-3)
precisions = st.floats(min_value=1e-3, max_value=0.999)


@CASES
@given(proportions, precisions, precisions, levels, levels)
def test_sample_size_monotone(c, r1, r2, a1, a2):
    r_lo, r_hi = sorted((r1, r2))
    al_lo, al_hi = sorted((a1, a2))
    assert min_sample_size(c, r_hi, al_lo) <= min_sample_size(c, r_lo, al_lo)
    assert min_sample_size(c, r_lo, al_lo) <= min_sample_size(c, r_lo, al_hi)
    assert min_sample_size_raw(c, r_lo, al_lo) <= min_sample_size_raw(0.5, r_lo, al_lo) * (1 + 1e-12)
    n = min_sample_size(c, r_lo, al_lo)
    assert n >= 1 and n >= min_sample_size_raw(c, r_lo, al_lo)
    assert n - 1 < max(1, min_sample_size_raw(c, r_lo, al_lo))
