"""speedcheck: decide, at a declared confidence level, whether a program got faster."""

from .aggregate import (
    ProportionMethod,
    WeightKind,
    WeightScheme,
    banned_means,
    min_sample_size,
    overall_gain,
    proportion_ci,
)
from .harness import EnvironmentRecord, RunPlan, execute_plan, warn_independence
from .protocol import Decision, SpeedupVerdict, TimingSample, assess_speedup, naive_speedups
from .stats_kernel import (
    mean,
    median,
    normal_quantile,
    shapiro_wilk,
    t_quantile,
    welch_one_sided,
)

__version__ = "0.1.0"

__all__ = [
    "Decision",
    "EnvironmentRecord",
    "ProportionMethod",
    "RunPlan",
    "SpeedupVerdict",
    "TimingSample",
    "WeightKind",
    "WeightScheme",
    "assess_speedup",
    "banned_means",
    "execute_plan",
    "mean",
    "median",
    "min_sample_size",
    "naive_speedups",
    "normal_quantile",
    "overall_gain",
    "proportion_ci",
    "shapiro_wilk",
    "t_quantile",
    "warn_independence",
    "welch_one_sided",
]
