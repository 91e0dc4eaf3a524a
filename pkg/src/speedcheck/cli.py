"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or parse error,
3 statistical refusal (insufficient runs, nothing to aggregate),
4 harness failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import timing_file
from .aggregate import ProportionMethod, WeightKind, WeightScheme, min_sample_size, min_sample_size_raw
from .errors import (
    EmptySample,
    HarnessError,
    InvalidArgument,
    InvalidTiming,
    MismatchedInput,
    ParseError,
    SpeedcheckError,
    UnsupportedSampleSize,
    ZeroVariance,
)
from .harness import RunPlan, execute_plan, warn_independence
from .protocol import (
    BASELINE,
    DEFAULT_ALPHA,
    DEFAULT_MIN_RUNS,
    DEFAULT_NORMALITY_ALPHA,
    OPTIMIZED,
    Decision,
    assess_speedup,
    naive_speedups,
)
from .report import (
    build_report,
    dump_json,
    load_verdicts,
    render_report,
    render_verdict,
    verdict_document,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REFUSED = 3
EXIT_HARNESS = 4

REPORT_DIR_ENV = "SPEEDCHECK_REPORT_DIR"

log = logging.getLogger("speedcheck")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"confidence level must lie in (0, 1), got {value}")
    return value


def _report_dir(arg: Optional[str]) -> Optional[Path]:
    if arg:
        return Path(arg)
    env = os.environ.get(REPORT_DIR_ENV)
    return Path(env) if env else None


def _write_new_json(doc: dict, directory: Path, stem: str) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    for attempt in range(1000):
        path = directory / (stem + (f"-{attempt}" if attempt else "") + ".json")
        try:
            with open(path, "x", encoding="utf-8") as fh:
                fh.write(dump_json(doc))
            return path
        except FileExistsError:
            continue
    raise InvalidArgument(f"no free file name for {stem} in {directory}")


def _emit(doc: dict, human: str, fmt: str, json_path: Optional[str]) -> None:
    if json_path:
        Path(json_path).write_text(dump_json(doc), encoding="utf-8")
    if fmt == "json":
        sys.stdout.write(dump_json(doc))
    else:
        print(human)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    if args.plan:
        try:
            data = json.loads(Path(args.plan).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ParseError(f"cannot load plan: {exc}", args.plan) from None
        plan = RunPlan.from_dict(data)
    else:
        command = list(args.command)
        if command and command[0] == "--":
            command = command[1:]
        if not (args.id and args.variant and command):
            raise _UsageError("run needs --id, --variant and a command after '--' (or --plan)")
        plan = RunPlan(
            benchmark_id=args.id,
            variant=args.variant,
            command=tuple(command),
            runs=args.runs,
            cooldown=args.cooldown,
            working_dir=args.workdir,
            timeout=args.timeout,
        )
    for code in warn_independence(plan):
        print(f"warning: {code}", file=sys.stderr)
    sample = execute_plan(plan, force=args.force)
    path = timing_file.write_new(timing_file.from_sample(sample), args.out_dir)
    print(path)
    return EXIT_OK


def cmd_analyze(args) -> int:
    baseline = timing_file.read(args.baseline).single_sample()
    optimized = timing_file.read(args.optimized).single_sample()
    if baseline.variant != BASELINE or optimized.variant != OPTIMIZED:
        raise MismatchedInput(
            f"expected a baseline file then an optimized file, got {baseline.variant} and {optimized.variant}"
        )
    alpha = DEFAULT_ALPHA if args.alpha is None else args.alpha
    verdict = assess_speedup(baseline, optimized, alpha, args.min_runs, args.normality_alpha)
    naive = naive_speedups(baseline, optimized)
    doc = verdict_document(verdict, baseline, optimized, naive, args.min_runs)
    _emit(doc, render_verdict(verdict, naive, alpha_is_default=args.alpha is None), args.format, args.json)
    return EXIT_REFUSED if verdict.decision == Decision.INSUFFICIENT_RUNS else EXIT_OK


def _scheme(args) -> WeightScheme:
    kind = {"median": WeightKind.MEDIAN_PROPORTIONAL, "uniform": WeightKind.UNIFORM, "user": WeightKind.USER_SUPPLIED}[
        args.weights
    ]
    user = None
    if kind == WeightKind.USER_SUPPLIED:
        if not args.user_weights:
            raise _UsageError("--weights user needs --user-weights FILE")
        try:
            user = {str(k): float(v) for k, v in json.loads(Path(args.user_weights).read_text()).items()}
        except (OSError, ValueError, AttributeError) as exc:
            raise ParseError(f"cannot load weights: {exc}", args.user_weights) from None
    return WeightScheme(kind, user)


def _finish_report(report, args) -> int:
    doc = report.to_dict()
    out_dir = _report_dir(args.out_dir)
    if out_dir is not None:
        path = _write_new_json(doc, out_dir, "report")
        print(f"report written to {path}", file=sys.stderr)
    _emit(doc, render_report(report, alpha_is_default=args.alpha is None), args.format, args.json)
    if report.gain is None and report.proportion is None:
        return EXIT_REFUSED
    return EXIT_OK


def cmd_aggregate(args) -> int:
    verdicts = load_verdicts(args.verdicts)
    report = build_report(
        verdicts,
        _scheme(args),
        include_slowdowns=args.include_slowdowns,
        method=ProportionMethod(args.proportion_method),
        proportion_alpha=args.alpha,
    )
    return _finish_report(report, args)


def _collect_timing_files(paths: Sequence[str]) -> list[Path]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.csv")))
        else:
            files.append(p)
    return files


def cmd_report(args) -> int:
    """Analyze every benchmark found in the timing files, then aggregate."""
    groups: dict[str, dict] = {}
    for path in _collect_timing_files(args.inputs):
        for sample in timing_file.read(path).samples():
            slot = groups.setdefault(sample.benchmark_id, {})
            if sample.variant in slot:
                raise ParseError(f"second {sample.variant} sample for {sample.benchmark_id}", str(path))
            slot[sample.variant] = sample
    if not groups:
        raise ParseError("no timing data found")
    alpha = DEFAULT_ALPHA if args.test_alpha is None else args.test_alpha
    verdicts = []
    for bid in sorted(groups):
        slot = groups[bid]
        if set(slot) != {BASELINE, OPTIMIZED}:
            raise MismatchedInput(f"{bid}: need both a baseline and an optimized sample, have {sorted(slot)}")
        verdicts.append(assess_speedup(slot[BASELINE], slot[OPTIMIZED], alpha, args.min_runs, args.normality_alpha))
    if args.test_alpha is None:
        print(f"per-benchmark tests at alpha={alpha:g} (default)", file=sys.stderr)
    report = build_report(
        verdicts,
        _scheme(args),
        include_slowdowns=args.include_slowdowns,
        method=ProportionMethod(args.proportion_method),
        proportion_alpha=args.alpha,
    )
    return _finish_report(report, args)


def cmd_samplesize(args) -> int:
    alpha = DEFAULT_ALPHA if args.alpha is None else args.alpha
    raw = min_sample_size_raw(args.proportion, args.precision, alpha)
    n = min_sample_size(args.proportion, args.precision, alpha)
    if args.format == "json":
        sys.stdout.write(dump_json({
            "format_version": 1, "kind": "samplesize", "proportion": args.proportion,
            "precision": args.precision, "alpha": alpha, "raw": raw, "benchmarks": n,
        }))
    else:
        suffix = " (default)" if args.alpha is None else ""
        print(f"benchmarks needed: {n} (raw {raw:.2f}) [alpha={alpha:g}]{suffix}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    p.add_argument("--json", metavar="PATH", help="also write the machine-readable document here")


def _add_aggregate_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--weights", choices=("median", "uniform", "user"), default="median")
    p.add_argument("--user-weights", metavar="FILE", help="JSON object mapping benchmark_id to weight")
    p.add_argument("--include-slowdowns", action="store_true")
    p.add_argument("--proportion-method", choices=[m.value for m in ProportionMethod], default="Wald")
    p.add_argument("--alpha", type=_alpha, default=None,
                   help="confidence level of the proportion interval (default: minimum test level)")
    p.add_argument("--out-dir", help=f"also save the report JSON here (or set ${REPORT_DIR_ENV})")


def _add_protocol_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-runs", type=int, default=DEFAULT_MIN_RUNS,
                   help="samples smaller than this get a normality check (default %(default)s)")
    p.add_argument("--normality-alpha", type=_alpha, default=DEFAULT_NORMALITY_ALPHA,
                   help="confidence level of the normality check (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="speedcheck", description="Statistically validated program speedups.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="time a command in fresh processes and save a timing file")
    p.add_argument("--plan", help="JSON run plan instead of flags")
    p.add_argument("--id", help="benchmark id")
    p.add_argument("--variant", choices=(BASELINE, OPTIMIZED))
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--cooldown", type=float, default=0.0, help="seconds to sleep between runs")
    p.add_argument("--timeout", type=float, default=3600.0, help="seconds allowed per run")
    p.add_argument("--workdir")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--force", action="store_true", help="run even if another plan holds the host lock")
    p.add_argument("command", nargs=argparse.REMAINDER)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="decide whether a speedup is statistically supported")
    p.add_argument("baseline")
    p.add_argument("optimized")
    p.add_argument("--alpha", type=_alpha, default=None, help=f"confidence level (default {DEFAULT_ALPHA})")
    _add_protocol_opts(p)
    _add_output(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("aggregate", help="combine verdict documents into a suite report")
    p.add_argument("verdicts", nargs="+")
    _add_aggregate_opts(p)
    _add_output(p)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("report", help="analyze all timing files and aggregate in one step")
    p.add_argument("inputs", nargs="+", help="timing files or directories of them")
    p.add_argument("--test-alpha", type=_alpha, default=None,
                   help=f"confidence level of each benchmark's test (default {DEFAULT_ALPHA})")
    _add_protocol_opts(p)
    _add_aggregate_opts(p)
    _add_output(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("samplesize", help="benchmarks needed for a proportion interval of given precision")
    p.add_argument("--proportion", type=float, required=True)
    p.add_argument("--precision", type=float, required=True)
    p.add_argument("--alpha", type=_alpha, default=None, help=f"default {DEFAULT_ALPHA}")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_samplesize)
    return parser


def _exit_code(exc: SpeedcheckError) -> int:
    if isinstance(exc, HarnessError):
        return EXIT_HARNESS
    if isinstance(exc, (ParseError, InvalidTiming, MismatchedInput, ZeroVariance, EmptySample, UnsupportedSampleSize)):
        return EXIT_DATA
    if isinstance(exc, InvalidArgument):
        return EXIT_USAGE
    return EXIT_REFUSED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except _UsageError as exc:
        print(f"speedcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpeedcheckError as exc:
        print(f"speedcheck: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
