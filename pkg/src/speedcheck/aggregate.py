"""Suite-level summaries: weighted performance gain and proportion of wins.

The overall gain factor is::

    G = 1 - sum(W_j * ET'_j) / sum(W_j * ET_j)

where ET_j and ET'_j are the baseline and optimized medians of benchmark j
and the weights W_j sum to 1. Its confidence level is the smallest level
among the tests of the benchmarks that enter the sum.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from . import stats_kernel as sk
from .errors import GuardViolated, InvalidArgument, InvalidTiming, NothingToAggregate
from .protocol import Decision, SpeedupVerdict

# Fewest accelerated benchmarks for which the normal approximation is trusted.
MIN_SUCCESSES = 10


class WeightKind(str, Enum):
    MEDIAN_PROPORTIONAL = "MedianProportional"
    UNIFORM = "Uniform"
    USER_SUPPLIED = "UserSupplied"


@dataclass(frozen=True)
class WeightScheme:
    kind: WeightKind = WeightKind.MEDIAN_PROPORTIONAL
    user_weights: Optional[Mapping[str, float]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if self.kind == WeightKind.USER_SUPPLIED:
            if not self.user_weights:
                raise InvalidArgument("UserSupplied weights need a benchmark_id -> weight mapping")
            for k, w in self.user_weights.items():
                if not (math.isfinite(w) and w > 0):
                    raise InvalidArgument(f"weight for {k!r} must be positive, got {w}")

    def weights(self, rows: Sequence[tuple[str, float]]) -> list[float]:
        """Normalized weights for ``(benchmark_id, baseline_median)`` rows."""
        if self.kind == WeightKind.UNIFORM:
            raw = [1.0] * len(rows)
        elif self.kind == WeightKind.MEDIAN_PROPORTIONAL:
            raw = [et for _, et in rows]
        else:
            missing = [bid for bid, _ in rows if bid not in self.user_weights]
            if missing:
                raise InvalidArgument(f"no user weight for: {', '.join(missing)}")
            raw = [float(self.user_weights[bid]) for bid, _ in rows]
        total = math.fsum(raw)
        return [w / total for w in raw]


@dataclass(frozen=True)
class GainRow:
    benchmark_id: str
    weight: float
    baseline_median: float
    optimized_median: float
    weighted_gain: float
    alpha: float
    decision: Decision

    def to_dict(self) -> dict:
        return {
            "benchmark_id": self.benchmark_id,
            "weight": self.weight,
            "baseline_median": self.baseline_median,
            "optimized_median": self.optimized_median,
            "weighted_gain": self.weighted_gain,
            "alpha": self.alpha,
            "decision": self.decision.value,
        }


@dataclass(frozen=True)
class GainReport:
    included: tuple[GainRow, ...]
    excluded: tuple[str, ...]
    overall_gain: float
    aggregate_alpha: float
    include_slowdowns: bool
    weight_kind: WeightKind

    def to_dict(self) -> dict:
        return {
            "overall_gain": self.overall_gain,
            "aggregate_alpha": self.aggregate_alpha,
            "include_slowdowns": self.include_slowdowns,
            "weights": self.weight_kind.value,
            "included": [r.to_dict() for r in self.included],
            "excluded": list(self.excluded),
        }


def gain_from_rows(rows: Iterable[GainRow]) -> float:
    rows = list(rows)
    num = math.fsum(r.weight * r.optimized_median for r in rows)
    den = math.fsum(r.weight * r.baseline_median for r in rows)
    return 1.0 - num / den


def overall_gain(
    verdicts: Sequence[SpeedupVerdict],
    scheme: WeightScheme | None = None,
    include_slowdowns: bool = False,
) -> GainReport:
    """Weighted overall performance gain factor over a benchmark suite.

    By default only confirmed speedups enter; the rest are listed in
    ``excluded`` so the proportion of wins stays visible. With
    ``include_slowdowns`` every verdict enters and the gain may be negative.
    """
    scheme = scheme or WeightScheme()
    included: list[SpeedupVerdict] = []
    excluded: list[str] = []
    for v in verdicts:
        if include_slowdowns or v.decision == Decision.SPEEDUP_CONFIRMED:
            included.append(v)
        else:
            excluded.append(v.benchmark_id)
    if not included:
        raise NothingToAggregate("no benchmark qualifies for the overall gain")
    for v in included:
        for label, med in (("baseline", v.baseline_median), ("optimized", v.optimized_median)):
            if not (math.isfinite(med) and med > 0):
                raise InvalidTiming(f"{v.benchmark_id}: {label} median must be positive, got {med}")

    weights = scheme.weights([(v.benchmark_id, v.baseline_median) for v in included])
    rows = tuple(
        GainRow(
            benchmark_id=v.benchmark_id,
            weight=w,
            baseline_median=v.baseline_median,
            optimized_median=v.optimized_median,
            weighted_gain=w * (v.baseline_median - v.optimized_median),
            alpha=v.alpha,
            decision=v.decision,
        )
        for v, w in zip(included, weights)
    )
    return GainReport(
        included=rows,
        excluded=tuple(excluded),
        overall_gain=gain_from_rows(rows),
        aggregate_alpha=min(r.alpha for r in rows),
        include_slowdowns=include_slowdowns,
        weight_kind=scheme.kind,
    )


@dataclass(frozen=True)
class BannedMeans:
    """Classical averages of speedups, kept only to show why they mislead."""

    arithmetic: float
    geometric: float
    harmonic: float
    caveat: str = "not suitable for publication: ignores benchmark durations"

    def to_dict(self) -> dict:
        return {
            "arithmetic": self.arithmetic,
            "geometric": self.geometric,
            "harmonic": self.harmonic,
            "caveat": self.caveat,
        }


def banned_means(speedups: Sequence[float]) -> BannedMeans:
    values = [float(s) for s in speedups]
    if not values:
        raise InvalidArgument("no speedups given")
    if any(not (math.isfinite(s) and s > 0) for s in values):
        raise InvalidArgument("speedups must be positive")
    return BannedMeans(
        arithmetic=statistics.fmean(values),
        geometric=statistics.geometric_mean(values),
        harmonic=statistics.harmonic_mean(values),
    )


# ---------------------------------------------------------------------------
# Proportion of accelerated benchmarks
# ---------------------------------------------------------------------------


class ProportionMethod(str, Enum):
    WALD = "Wald"
    WILSON_CONTINUITY = "WilsonContinuity"


@dataclass(frozen=True)
class ProportionEstimate:
    accelerated: int
    total: int
    proportion: float
    alpha: float
    method: ProportionMethod
    low: float
    high: float
    half_width: Optional[float] = None

    @property
    def interval(self) -> tuple[float, float]:
        return (self.low, self.high)

    def to_dict(self) -> dict:
        return {
            "accelerated": self.accelerated,
            "total": self.total,
            "proportion": self.proportion,
            "alpha": self.alpha,
            "method": self.method.value,
            "interval": [self.low, self.high],
            "half_width": self.half_width,
        }


def _wilson_cc(p: int, n: int, z: float) -> tuple[float, float]:
    # Continuity correction capped by the distance to n/2, as in the usual
    # one-sample proportion test against 0.5.
    est = p / n
    yates = min(0.5, abs(p - n * 0.5))
    z22n = z * z / (2 * n)
    pc = est + yates / n
    if pc >= 1:
        high = 1.0
    else:
        high = (pc + z22n + z * math.sqrt(pc * (1 - pc) / n + z22n / (2 * n))) / (1 + 2 * z22n)
    pc = est - yates / n
    if pc <= 0:
        low = 0.0
    else:
        low = (pc + z22n - z * math.sqrt(pc * (1 - pc) / n + z22n / (2 * n))) / (1 + 2 * z22n)
    return max(0.0, low), min(1.0, high)


def proportion_ci(
    accelerated: int,
    total: int,
    alpha: float = 0.95,
    method: ProportionMethod | str = ProportionMethod.WALD,
) -> ProportionEstimate:
    """Two-sided interval for the fraction of benchmarks that were accelerated.

    Refuses with :class:`GuardViolated` when fewer than 10 benchmarks were
    accelerated, whatever the method.
    """
    alpha = sk.check_level(alpha)
    method = ProportionMethod(method)
    if isinstance(accelerated, bool) or isinstance(total, bool) or int(accelerated) != accelerated or int(total) != total:
        raise InvalidArgument("counts must be integers")
    p, n = int(accelerated), int(total)
    if n <= 0 or not 0 <= p <= n:
        raise InvalidArgument(f"need 0 <= accelerated <= total and total > 0, got {p}/{n}")
    if p < MIN_SUCCESSES:
        raise GuardViolated(
            f"only {p} of {n} benchmarks accelerated; the interval needs n*C >= {MIN_SUCCESSES}"
        )
    c = p / n
    z = sk.normal_quantile((1 + alpha) / 2)
    if method == ProportionMethod.WALD:
        r = z * math.sqrt(c * (1 - c) / n)
        return ProportionEstimate(p, n, c, alpha, method, max(0.0, c - r), min(1.0, c + r), r)
    low, high = _wilson_cc(p, n, z)
    return ProportionEstimate(p, n, c, alpha, method, low, high)


def min_sample_size_raw(proportion: float, precision: float, alpha: float) -> float:
    """Right-hand side of n >= z^2 C(1-C) / r^2, before rounding up."""
    alpha = sk.check_level(alpha)
    if not 0 < proportion < 1:
        raise InvalidArgument(f"proportion must lie in (0, 1), got {proportion}")
    if not 0 < precision < 1:
        raise InvalidArgument(f"precision must lie in (0, 1), got {precision}")
    z = sk.normal_quantile((1 + alpha) / 2)
    return z * z * proportion * (1 - proportion) / (precision * precision)


def min_sample_size(proportion: float, precision: float, alpha: float) -> int:
    """Smallest number of benchmarks giving a proportion interval of half-width ``precision``."""
    return max(1, math.ceil(min_sample_size_raw(proportion, precision, alpha)))


def count_accelerated(verdicts: Iterable[SpeedupVerdict]) -> tuple[int, int]:
    verdicts = list(verdicts)
    p = sum(1 for v in verdicts if v.decision == Decision.SPEEDUP_CONFIRMED)
    return p, len(verdicts)
