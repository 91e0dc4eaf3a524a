"""Machine-readable documents and human-readable rendering.

JSON documents carry full precision. Human output rounds (speedups and
gains to 4 significant digits, interval bounds to 7) and every line that
shows a number also shows the confidence level it was obtained at.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .aggregate import (
    BannedMeans,
    GainReport,
    ProportionEstimate,
    ProportionMethod,
    WeightScheme,
    banned_means,
    count_accelerated,
    overall_gain,
    proportion_ci,
)
from .errors import GuardViolated, NothingToAggregate, ParseError
from .protocol import Decision, NaiveSpeedups, SpeedupVerdict, TimingSample

FORMAT_VERSION = 1

VERDICT_KIND = "verdict"
REPORT_KIND = "report"

NO_ALPHA = "[alpha=none: no confidence level, statistically unsound]"


def _a(alpha: float) -> str:
    return f"[alpha={alpha:g}]"


def _sig4(x: float) -> str:
    return f"{x:.4g}"


def _sig7(x: float) -> str:
    return f"{x:.7g}"


# ---------------------------------------------------------------------------
# Verdict documents
# ---------------------------------------------------------------------------


def verdict_document(
    verdict: SpeedupVerdict,
    baseline: TimingSample,
    optimized: TimingSample,
    naive: NaiveSpeedups,
    min_runs: int,
) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": VERDICT_KIND,
        "min_runs": min_runs,
        "verdict": verdict.to_dict(),
        "naive_speedups": naive.to_dict(),
        "inputs": {
            "baseline": list(baseline.times),
            "optimized": list(optimized.times),
        },
    }


def render_verdict(verdict: SpeedupVerdict, naive: NaiveSpeedups | None = None, alpha_is_default: bool = False) -> str:
    a = _a(verdict.alpha)
    lines = [f"benchmark {verdict.benchmark_id}: {summary_line(verdict)}"]
    lines.append(f"  confidence level: alpha={verdict.alpha:g}" + (" (default)" if alpha_is_default else ""))
    for label, res in (("baseline", verdict.baseline_normality), ("optimized", verdict.optimized_normality)):
        if res is not None:
            status = "passed" if res.passed else "FAILED"
            lines.append(
                f"  normality ({label}, n={res.size}): W={res.w_statistic:.4f} p-value={res.p_value:.4f} "
                f"{status} {_a(res.alpha)}"
            )
    lines.append(f"  decision: {verdict.decision.value} {a}")
    if verdict.welch is not None:
        w = verdict.welch
        lines.append(
            f"  welch lower bound: {_sig7(w.lower_bound)} s (mean difference {_sig7(w.mean_difference)} s, "
            f"df {w.degrees_of_freedom:.4g}) {a}"
        )
    if verdict.decision == Decision.SPEEDUP_CONFIRMED:
        lines.append(f"  speedup (median ratio): {_sig4(verdict.speedup)} {a}")
    elif verdict.decision == Decision.INSUFFICIENT_RUNS:
        lines.append(f"  normality check failed: gather more runs before deciding {a}")
    lines.append(
        f"  medians: baseline {_sig7(verdict.baseline_median)} s, optimized {_sig7(verdict.optimized_median)} s {a}"
    )
    for code in verdict.warnings:
        lines.append(f"  warning: {code} {a}")
    if naive is not None:
        lines.append(f"  naive ratios, not used for the decision {NO_ALPHA}")
        lines.append(
            f"    min {_sig4(naive.min_ratio)}, max {_sig4(naive.max_ratio)}, "
            f"mean {_sig4(naive.mean_ratio)}, median {_sig4(naive.median_ratio)} {NO_ALPHA}"
        )
    return "\n".join(lines)


def summary_line(verdict: SpeedupVerdict) -> str:
    """One-line verdict, e.g. ``SpeedupConfirmed, speedup 1.956, lower bound 0.3414632, alpha=0.95``."""
    parts = [verdict.decision.value]
    if verdict.speedup is not None:
        parts.append(f"speedup {_sig4(verdict.speedup)}")
    if verdict.welch is not None:
        parts.append(f"lower bound {_sig7(verdict.welch.lower_bound)}")
    parts.append(f"alpha={verdict.alpha:g}")
    return ", ".join(parts)


# ---------------------------------------------------------------------------
# Suite reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    verdicts: tuple[SpeedupVerdict, ...]
    gain: Optional[GainReport]
    gain_note: Optional[str]
    proportion: Optional[ProportionEstimate]
    proportion_note: Optional[str]
    proportion_alpha: float
    means: Optional[BannedMeans]

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": REPORT_KIND,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "gain": self.gain.to_dict() if self.gain else None,
            "gain_note": self.gain_note,
            "proportion": self.proportion.to_dict() if self.proportion else None,
            "proportion_note": self.proportion_note,
            "proportion_alpha": self.proportion_alpha,
            "banned_means": self.means.to_dict() if self.means else None,
        }


def confirmed_means(verdicts: Iterable[SpeedupVerdict]) -> Optional[BannedMeans]:
    speedups = [v.speedup for v in verdicts if v.speedup is not None]
    return banned_means(speedups) if speedups else None


def build_report(
    verdicts: Sequence[SpeedupVerdict],
    scheme: WeightScheme | None = None,
    include_slowdowns: bool = False,
    method: ProportionMethod | str = ProportionMethod.WALD,
    proportion_alpha: float | None = None,
) -> Report:
    """Aggregate verdicts into a report.

    The proportion interval defaults to the smallest confidence level among
    the verdicts. Refusals (nothing to aggregate, fewer than 10 wins) are
    recorded as notes instead of aborting the whole report.
    """
    verdicts = tuple(verdicts)
    if not verdicts:
        raise NothingToAggregate("no verdicts given")
    gain = gain_note = None
    try:
        gain = overall_gain(verdicts, scheme, include_slowdowns)
    except NothingToAggregate as exc:
        gain_note = f"NothingToAggregate: {exc}"
    if proportion_alpha is None:
        proportion_alpha = min(v.alpha for v in verdicts)
    accelerated, total = count_accelerated(verdicts)
    proportion = proportion_note = None
    try:
        proportion = proportion_ci(accelerated, total, proportion_alpha, method)
    except GuardViolated as exc:
        proportion_note = f"GuardViolated: {exc}"
    return Report(
        verdicts=verdicts,
        gain=gain,
        gain_note=gain_note,
        proportion=proportion,
        proportion_note=proportion_note,
        proportion_alpha=proportion_alpha,
        means=confirmed_means(verdicts),
    )


def render_report(report: Report, alpha_is_default: bool = False) -> str:
    lines = ["per-benchmark verdicts"]
    for v in report.verdicts:
        lines.append(f"  {v.benchmark_id}: {summary_line(v)}")
    g = report.gain
    if g is not None:
        scope = "slowdowns included" if g.include_slowdowns else "confirmed speedups only"
        lines.append(
            f"overall performance gain G = {_sig4(g.overall_gain * 100)}% "
            f"(weights {g.weight_kind.value}, {scope}) {_a(g.aggregate_alpha)}"
        )
        for r in g.included:
            lines.append(
                f"  {r.benchmark_id}: W={_sig4(r.weight)} ET={_sig7(r.baseline_median)} s "
                f"ET'={_sig7(r.optimized_median)} s g={_sig4(r.weighted_gain)} {_a(r.alpha)}"
            )
    else:
        lines.append(f"overall performance gain: not computed ({report.gain_note})")
    if g is not None and g.excluded:
        lines.append("  excluded (no confirmed speedup): " + ", ".join(g.excluded))
    pa = _a(report.proportion_alpha) + (" (default: minimum test level)" if alpha_is_default else "")
    p = report.proportion
    if p is not None:
        lines.append(
            f"accelerated proportion C = {p.accelerated}/{p.total} = {_sig4(p.proportion)}, "
            f"interval [{_sig7(p.low)}, {_sig7(p.high)}] ({p.method.value}) {pa}"
        )
    else:
        lines.append(f"accelerated proportion: {report.proportion_note} {pa}")
    m = report.means
    if m is not None:
        lines.append(f"classical means of confirmed speedups, not for publication {NO_ALPHA}")
        lines.append(
            f"  arithmetic {_sig4(m.arithmetic)}, geometric {_sig4(m.geometric)}, "
            f"harmonic {_sig4(m.harmonic)} {NO_ALPHA}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Reading documents back
# ---------------------------------------------------------------------------


def load_document(path: str | Path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", str(path)) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("format_version") != FORMAT_VERSION:
        raise ParseError(f"not a format_version {FORMAT_VERSION} speedcheck document", str(path))
    return doc


def verdicts_from_document(doc: dict, path: str | None = None) -> list[SpeedupVerdict]:
    try:
        if doc.get("kind") == VERDICT_KIND:
            return [SpeedupVerdict.from_dict(doc["verdict"])]
        if doc.get("kind") == REPORT_KIND:
            return [SpeedupVerdict.from_dict(v) for v in doc["verdicts"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed verdict: {exc}", path) from None
    raise ParseError(f"unknown document kind {doc.get('kind')!r}", path)


def load_verdicts(paths: Sequence[str | Path]) -> list[SpeedupVerdict]:
    out: list[SpeedupVerdict] = []
    for p in paths:
        out.extend(verdicts_from_document(load_document(p), str(p)))
    return out


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
