"""Speedup decision protocol.

Given baseline and optimized timing samples and a confidence level, decide
whether a speedup is statistically supported and, only if it is, measure it
as the ratio of medians::

    undersized sample?  -> Shapiro-Wilk on it; failure -> InsufficientRuns
    Welch lower bound   <= 0 -> NoSpeedupAtConfidence
    otherwise           -> SpeedupConfirmed, speedup = median(base) / median(opt)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from . import stats_kernel as sk
from .errors import InvalidArgument, InvalidTiming, MismatchedInput
from .stats_kernel import NormalityResult, WelchResult

BASELINE = "baseline"
OPTIMIZED = "optimized"
VARIANTS = (BASELINE, OPTIMIZED)

DEFAULT_ALPHA = 0.95
DEFAULT_MIN_RUNS = 30
# Level of the normality pre-check when the caller does not choose one.
DEFAULT_NORMALITY_ALPHA = 0.95

INCOHERENT_LOW_CONFIDENCE = "IncoherentLowConfidence"


class Decision(str, Enum):
    SPEEDUP_CONFIRMED = "SpeedupConfirmed"
    NO_SPEEDUP = "NoSpeedupAtConfidence"
    INSUFFICIENT_RUNS = "InsufficientRuns"


@dataclass(frozen=True)
class TimingSample:
    benchmark_id: str
    variant: str
    times: tuple[float, ...]
    metadata: Optional[object] = None  # harness.EnvironmentRecord when produced by a run

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidArgument(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        times = tuple(float(t) for t in self.times)
        for i, t in enumerate(times):
            if not (math.isfinite(t) and t > 0):
                raise InvalidTiming(f"{self.benchmark_id}/{self.variant}: time #{i} is not a positive finite number: {t}")
        object.__setattr__(self, "times", times)

    @property
    def size(self) -> int:
        return len(self.times)

    def scaled(self, factor: float) -> "TimingSample":
        return TimingSample(self.benchmark_id, self.variant, tuple(t * factor for t in self.times), self.metadata)


@dataclass(frozen=True)
class SpeedupVerdict:
    benchmark_id: str
    decision: Decision
    alpha: float
    baseline_median: float
    optimized_median: float
    welch: Optional[WelchResult] = None
    speedup: Optional[float] = None
    baseline_normality: Optional[NormalityResult] = None
    optimized_normality: Optional[NormalityResult] = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        confirmed = self.decision == Decision.SPEEDUP_CONFIRMED
        if confirmed != (self.speedup is not None):
            raise InvalidArgument("speedup must be present exactly when the speedup is confirmed")
        if self.welch is not None and confirmed != (self.welch.lower_bound > 0):
            raise InvalidArgument("decision disagrees with the Welch lower bound")

    @property
    def normality(self) -> tuple[Optional[NormalityResult], Optional[NormalityResult]]:
        return self.baseline_normality, self.optimized_normality

    def to_dict(self) -> dict:
        return {
            "benchmark_id": self.benchmark_id,
            "decision": self.decision.value,
            "alpha": self.alpha,
            "baseline_median": self.baseline_median,
            "optimized_median": self.optimized_median,
            "speedup": self.speedup,
            "welch": self.welch.to_dict() if self.welch else None,
            "normality": {
                BASELINE: self.baseline_normality.to_dict() if self.baseline_normality else None,
                OPTIMIZED: self.optimized_normality.to_dict() if self.optimized_normality else None,
            },
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpeedupVerdict":
        norm = d.get("normality") or {}
        return cls(
            benchmark_id=str(d["benchmark_id"]),
            decision=Decision(d["decision"]),
            alpha=sk.check_level(d["alpha"]),
            baseline_median=float(d["baseline_median"]),
            optimized_median=float(d["optimized_median"]),
            speedup=None if d.get("speedup") is None else float(d["speedup"]),
            welch=WelchResult.from_dict(d["welch"]) if d.get("welch") else None,
            baseline_normality=NormalityResult.from_dict(norm[BASELINE]) if norm.get(BASELINE) else None,
            optimized_normality=NormalityResult.from_dict(norm[OPTIMIZED]) if norm.get(OPTIMIZED) else None,
            warnings=tuple(d.get("warnings", ())),
        )


def _check_pair(baseline: TimingSample, optimized: TimingSample) -> None:
    if baseline.benchmark_id != optimized.benchmark_id:
        raise MismatchedInput(
            f"benchmark ids differ: {baseline.benchmark_id!r} vs {optimized.benchmark_id!r}"
        )
    if baseline.variant == optimized.variant:
        raise MismatchedInput(f"both samples are {baseline.variant!r}; need one baseline and one optimized")


def assess_speedup(
    baseline: TimingSample,
    optimized: TimingSample,
    alpha: float = DEFAULT_ALPHA,
    min_runs: int = DEFAULT_MIN_RUNS,
    normality_alpha: float = DEFAULT_NORMALITY_ALPHA,
) -> SpeedupVerdict:
    """Run the decision protocol on one benchmark.

    ``normality_alpha`` is the confidence level of the Shapiro-Wilk
    pre-check applied to samples with fewer than ``min_runs`` values. It is
    independent of ``alpha`` so that a low test level (say 0.01) does not
    turn the normality check into a near-impossible ``p >= 0.99`` bar.
    """
    alpha = sk.check_level(alpha)
    normality_alpha = sk.check_level(normality_alpha)
    if min_runs < 1:
        raise InvalidArgument(f"min_runs must be >= 1, got {min_runs}")
    _check_pair(baseline, optimized)

    base_med = sk.median(baseline.times)
    opt_med = sk.median(optimized.times)

    normality: dict[str, NormalityResult] = {}
    for s in (baseline, optimized):
        if s.size < min_runs:
            normality[s.variant] = sk.shapiro_wilk(s.times, normality_alpha)
    common = dict(
        benchmark_id=baseline.benchmark_id,
        alpha=alpha,
        baseline_median=base_med,
        optimized_median=opt_med,
        baseline_normality=normality.get(BASELINE),
        optimized_normality=normality.get(OPTIMIZED),
    )
    if any(not r.passed for r in normality.values()):
        return SpeedupVerdict(decision=Decision.INSUFFICIENT_RUNS, **common)

    welch = sk.welch_one_sided(baseline.times, optimized.times, alpha)
    if welch.lower_bound <= 0:
        return SpeedupVerdict(decision=Decision.NO_SPEEDUP, welch=welch, **common)

    speedup = base_med / opt_med
    warnings = (INCOHERENT_LOW_CONFIDENCE,) if speedup < 1 else ()
    return SpeedupVerdict(
        decision=Decision.SPEEDUP_CONFIRMED, welch=welch, speedup=speedup, warnings=warnings, **common
    )


@dataclass(frozen=True)
class NaiveSpeedups:
    """Single-value speedup ratios. Shown for comparison only; never used to decide."""

    min_ratio: float
    max_ratio: float
    mean_ratio: float
    median_ratio: float
    unsound: bool = True

    def to_dict(self) -> dict:
        return {
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "median_ratio": self.median_ratio,
            "unsound": self.unsound,
        }


def naive_speedups(baseline: TimingSample | Sequence[float], optimized: TimingSample | Sequence[float]) -> NaiveSpeedups:
    b = baseline.times if isinstance(baseline, TimingSample) else baseline
    o = optimized.times if isinstance(optimized, TimingSample) else optimized
    return NaiveSpeedups(
        min_ratio=min(sk._values(b)) / min(sk._values(o)),
        max_ratio=max(sk._values(b)) / max(sk._values(o)),
        mean_ratio=sk.mean(b) / sk.mean(o),
        median_ratio=sk.median(b) / sk.median(o),
    )
