"""Deterministic statistical primitives used by the speedup protocol.

All functions here are pure. Samples are plain sequences of floats; the
timing-specific checks (strict positivity) live in :mod:`speedcheck.protocol`
so that the normality test can also be exercised on arbitrary real data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import stdtr

from .errors import (
    EmptySample,
    InvalidArgument,
    UnsupportedSampleSize,
    ZeroVariance,
)

_STD_NORMAL = NormalDist()

SW_MIN_SIZE = 3
SW_MAX_SIZE = 5000


def check_level(alpha: float) -> float:
    """Validate a confidence level, returning it as a float."""
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise InvalidArgument(f"confidence level must be a number, got {alpha!r}") from None
    if not 0.0 < alpha < 1.0:
        raise InvalidArgument(f"confidence level must lie in (0, 1), got {alpha}")
    return alpha


def _values(sample: Sequence[float]) -> list[float]:
    values = [float(v) for v in sample]
    if not values:
        raise EmptySample("sample is empty")
    for v in values:
        if not math.isfinite(v):
            raise InvalidArgument(f"sample contains a non-finite value: {v}")
    return values


def mean(sample: Sequence[float]) -> float:
    values = _values(sample)
    return math.fsum(values) / len(values)


def median(sample: Sequence[float]) -> float:
    """Sample median; even sizes average the two middle order statistics."""
    values = sorted(_values(sample))
    n = len(values)
    mid = n // 2
    if n % 2:
        return values[mid]
    return (values[mid - 1] + values[mid]) / 2.0


def variance(sample: Sequence[float]) -> float:
    """Unbiased sample variance (divisor n - 1), two-pass."""
    values = _values(sample)
    if len(values) < 2:
        raise InvalidArgument("variance needs at least 2 values")
    m = math.fsum(values) / len(values)
    return math.fsum((v - m) ** 2 for v in values) / (len(values) - 1)


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


def normal_cdf(x: float) -> float:
    return _STD_NORMAL.cdf(x)


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise InvalidArgument(f"probability must lie in (0, 1), got {p}")
    return _STD_NORMAL.inv_cdf(p)


def t_cdf(x: float, df: float) -> float:
    if not df > 0:
        raise InvalidArgument(f"degrees of freedom must be positive, got {df}")
    return float(stdtr(df, x))


def t_quantile(p: float, df: float) -> float:
    """Inverse Student-t CDF by bracketing and Brent root finding on the CDF."""
    if not 0.0 < p < 1.0:
        raise InvalidArgument(f"probability must lie in (0, 1), got {p}")
    if not (df > 0 and math.isfinite(df)):
        raise InvalidArgument(f"degrees of freedom must be positive and finite, got {df}")
    if p == 0.5:
        return 0.0
    # The t quantile is always farther from 0 than the normal one.
    z = _STD_NORMAL.inv_cdf(p)
    lo, hi = (0.0, z) if z > 0 else (z, 0.0)
    f = lambda x: float(stdtr(df, x)) - p  # noqa: E731
    step = max(1.0, abs(z))
    while f(lo) > 0:
        lo -= step
        step *= 2
    step = max(1.0, abs(z))
    while f(hi) < 0:
        hi += step
        step *= 2
    return brentq(f, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)


# ---------------------------------------------------------------------------
# Shapiro-Wilk (Royston 1995, AS R94)
# ---------------------------------------------------------------------------

# Polynomial coefficients, lowest degree first.
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.544, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)


def _poly(coeffs: Sequence[float], x: float) -> float:
    result = 0.0
    for c in reversed(coeffs):
        result = result * x + c
    return result


@lru_cache(maxsize=256)
def _sw_coefficients(n: int) -> np.ndarray:
    """Antisymmetric weights for the ordered sample, upper half positive."""
    half = n // 2
    upper = np.zeros(half)
    if n == 3:
        upper[0] = math.sqrt(0.5)
    else:
        m = np.array([-_STD_NORMAL.inv_cdf((i - 0.375) / (n + 0.25)) for i in range(1, half + 1)])
        summ2 = 2.0 * float(np.dot(m, m))
        ssumm2 = math.sqrt(summ2)
        rsn = 1.0 / math.sqrt(n)
        a1 = m[0] / ssumm2 + _poly(_C1, rsn)
        if n > 5:
            a2 = m[1] / ssumm2 + _poly(_C2, rsn)
            fac = math.sqrt((summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2) / (1 - 2 * a1**2 - 2 * a2**2))
            upper[2:] = m[2:] / fac
            upper[0], upper[1] = a1, a2
        else:
            fac = math.sqrt((summ2 - 2 * m[0] ** 2) / (1 - 2 * a1**2))
            upper[1:] = m[1:] / fac
            upper[0] = a1
    coeffs = np.zeros(n)
    coeffs[:half] = -upper
    coeffs[n - half :] = upper[::-1]
    coeffs.flags.writeable = False
    return coeffs


def _sw_pvalue(w: float, n: int) -> float:
    if n == 3:
        # exact distribution for n = 3
        pw = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.pi / 3.0)
        return min(1.0, max(0.0, pw))
    w1 = 1.0 - w
    if w1 <= 0.0:
        return 1.0
    y = math.log(w1)
    if n <= 11:
        gamma = _poly(_G, n)
        if y >= gamma:
            return 0.0
        y = -math.log(gamma - y)
        m = _poly(_C3, n)
        s = math.exp(_poly(_C4, n))
    else:
        ln = math.log(n)
        m = _poly(_C5, ln)
        s = math.exp(_poly(_C6, ln))
    z = (y - m) / s
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class NormalityResult:
    w_statistic: float
    p_value: float
    passed: bool
    alpha: float
    size: int

    def to_dict(self) -> dict:
        return {
            "w_statistic": self.w_statistic,
            "p_value": self.p_value,
            "passed": self.passed,
            "alpha": self.alpha,
            "size": self.size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormalityResult":
        return cls(
            w_statistic=float(d["w_statistic"]),
            p_value=float(d["p_value"]),
            passed=bool(d["passed"]),
            alpha=float(d["alpha"]),
            size=int(d["size"]),
        )


def shapiro_wilk(sample: Sequence[float], alpha: float = 0.95) -> NormalityResult:
    """Shapiro-Wilk W test with Royston's p-value approximation.

    The sample passes at confidence level ``alpha`` when the p-value is at
    least ``1 - alpha``. Valid for 3 <= n <= 5000.
    """
    alpha = check_level(alpha)
    values = _values(sample)
    n = len(values)
    if not SW_MIN_SIZE <= n <= SW_MAX_SIZE:
        raise UnsupportedSampleSize(f"Shapiro-Wilk needs {SW_MIN_SIZE} <= n <= {SW_MAX_SIZE}, got {n}")
    x = np.sort(np.asarray(values, dtype=float))
    spread = x[-1] - x[0]
    if spread <= 0.0 or spread < 1e-19 * max(1.0, abs(x[-1])):
        raise ZeroVariance("sample has zero variance")
    # centre and scale by the range to limit rounding error
    x = (x - x.mean()) / spread
    ssq = float(np.dot(x, x))
    num = float(np.dot(_sw_coefficients(n), x))
    w = min(1.0, num * num / ssq)
    p = _sw_pvalue(w, n)
    return NormalityResult(w_statistic=w, p_value=p, passed=p >= 1.0 - alpha, alpha=alpha, size=n)


# ---------------------------------------------------------------------------
# Welch two-sample test, one-sided
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WelchResult:
    mean_difference: float
    lower_bound: float
    degrees_of_freedom: float
    t_statistic: float
    standard_error: float
    alpha: float

    def to_dict(self) -> dict:
        return {
            "mean_difference": self.mean_difference,
            "lower_bound": self.lower_bound,
            "degrees_of_freedom": self.degrees_of_freedom,
            "t_statistic": self.t_statistic,
            "standard_error": self.standard_error,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WelchResult":
        return cls(**{k: float(d[k]) for k in (
            "mean_difference", "lower_bound", "degrees_of_freedom",
            "t_statistic", "standard_error", "alpha",
        )})


def welch_one_sided(a: Sequence[float], b: Sequence[float], alpha: float = 0.95) -> WelchResult:
    """One-sided Welch test of mean(a) > mean(b).

    Returns the lower end of the interval ``[lower_bound, +inf)`` for
    ``mean(a) - mean(b)`` at confidence level ``alpha``.
    """
    alpha = check_level(alpha)
    xa, xb = _values(a), _values(b)
    k, m = len(xa), len(xb)
    if k < 2 or m < 2:
        raise InvalidArgument(f"Welch test needs at least 2 values per sample, got {k} and {m}")
    va = variance(xa) / k
    vb = variance(xb) / m
    se2 = va + vb
    if se2 <= 0.0:
        raise ZeroVariance("both samples have zero variance")
    se = math.sqrt(se2)
    df = se2 * se2 / (va * va / (k - 1) + vb * vb / (m - 1))
    diff = mean(xa) - mean(xb)
    lower = diff - t_quantile(alpha, df) * se
    return WelchResult(
        mean_difference=diff,
        lower_bound=lower,
        degrees_of_freedom=df,
        t_statistic=diff / se,
        standard_error=se,
        alpha=alpha,
    )
