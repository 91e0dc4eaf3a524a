"""Independent reference computations used by the tests.

None of these share code with the package: the Student-t CDF comes from
mpmath's incomplete beta function at 50 digits, the normal CDF from
``math.erf``, and inversion is plain bisection.
"""

import math

import mpmath

mpmath.mp.dps = 50


def t_cdf(x, df):
    x = mpmath.mpf(x)
    df = mpmath.mpf(df)
    tail = mpmath.betainc(df / 2, mpmath.mpf(1) / 2, 0, df / (df + x * x), regularized=True) / 2
    return 1 - tail if x > 0 else tail


def normal_cdf(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def bisect(cdf, p, lo=-1e4, hi=1e4, iterations=200):
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def t_quantile(p, df):
    return float(bisect(lambda x: t_cdf(x, df), mpmath.mpf(p), mpmath.mpf(-1e4), mpmath.mpf(1e4)))


def normal_quantile(p):
    return bisect(normal_cdf, p, -40.0, 40.0)


def wald_interval(p, n, z):
    """Wald interval evaluated at 50 digits."""
    c = mpmath.mpf(p) / n
    r = mpmath.mpf(z) * mpmath.sqrt(c * (1 - c) / n)
    return float(c - r), float(c + r), float(r)


def welch_lower_bound(a, b, alpha):
    """Welch one-sided lower bound at 50 digits with the t quantile found by bisection."""
    a = [mpmath.mpf(str(v)) for v in a]
    b = [mpmath.mpf(str(v)) for v in b]
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    va = sum((v - ma) ** 2 for v in a) / (len(a) - 1) / len(a)
    vb = sum((v - mb) ** 2 for v in b) / (len(b) - 1) / len(b)
    se2 = va + vb
    df = se2**2 / (va**2 / (len(a) - 1) + vb**2 / (len(b) - 1))
    q = t_quantile(alpha, df)
    return float(ma - mb - q * mpmath.sqrt(se2))
