"""Raw timing files.

A timing file is CSV with a commented header::

    # speedcheck-timings
    # format_version: 1
    # environment: {"hostname": "...", ...}
    benchmark_id,variant,run_index,time_seconds,captured_at
    bench1,baseline,1,0.201734512,2026-10-16T09:12:44.120931+00:00

Times are kept as the decimal text that was written, so a file read back
and written again is byte-identical. The environment line is optional for
hand-entered data.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional

from .errors import InvalidArgument, ParseError
from .harness import EnvironmentRecord
from .protocol import VARIANTS, TimingSample

MAGIC = "# speedcheck-timings"
FORMAT_VERSION = 1
COLUMNS = ("benchmark_id", "variant", "run_index", "time_seconds", "captured_at")
TIME_DECIMALS = 9

_DECIMAL_RE = re.compile(r"^\d+(\.\d+)?$")


@dataclass(frozen=True)
class TimingRow:
    benchmark_id: str
    variant: str
    run_index: int
    time_text: str
    captured_at: str

    @property
    def time_seconds(self) -> float:
        return float(self.time_text)


@dataclass(frozen=True)
class TimingFile:
    rows: tuple[TimingRow, ...]
    environment: Optional[EnvironmentRecord] = None
    format_version: int = FORMAT_VERSION

    def groups(self) -> dict[tuple[str, str], list[TimingRow]]:
        out: dict[tuple[str, str], list[TimingRow]] = {}
        for row in self.rows:
            out.setdefault((row.benchmark_id, row.variant), []).append(row)
        return out

    def samples(self) -> list[TimingSample]:
        return [
            TimingSample(bid, variant, tuple(r.time_seconds for r in sorted(rows, key=lambda r: r.run_index)),
                         self.environment)
            for (bid, variant), rows in self.groups().items()
        ]

    def single_sample(self) -> TimingSample:
        samples = self.samples()
        if len(samples) != 1:
            keys = ", ".join(f"{s.benchmark_id}/{s.variant}" for s in samples) or "none"
            raise ParseError(f"expected exactly one benchmark/variant, found: {keys}")
        return samples[0]


def format_time(seconds: float) -> str:
    return f"{seconds:.{TIME_DECIMALS}f}"


def from_sample(sample: TimingSample, captured_at: str | None = None) -> TimingFile:
    env = sample.metadata if isinstance(sample.metadata, EnvironmentRecord) else None
    if captured_at is None:
        captured_at = env.captured_at if env else datetime.now(timezone.utc).isoformat(timespec="microseconds")
    rows = tuple(
        TimingRow(sample.benchmark_id, sample.variant, i, format_time(t), captured_at)
        for i, t in enumerate(sample.times, start=1)
    )
    return TimingFile(rows=rows, environment=env)


def dumps(tf: TimingFile) -> str:
    buf = io.StringIO()
    buf.write(MAGIC + "\n")
    buf.write(f"# format_version: {tf.format_version}\n")
    if tf.environment is not None:
        buf.write("# environment: " + json.dumps(tf.environment.to_dict(), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in tf.rows:
        writer.writerow((r.benchmark_id, r.variant, r.run_index, r.time_text, r.captured_at))
    return buf.getvalue()


def loads(text: str, path: str | None = None) -> TimingFile:
    lines = text.splitlines()
    version = None
    env = None
    body_start = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.startswith("#"):
            body_start = lineno - 1
            break
        content = line[1:].strip()
        if content.startswith("format_version:"):
            try:
                version = int(content.split(":", 1)[1])
            except ValueError:
                raise ParseError("bad format_version", path, lineno) from None
        elif content.startswith("environment:"):
            try:
                env = EnvironmentRecord.from_dict(json.loads(content.split(":", 1)[1]))
            except (ValueError, TypeError) as exc:
                raise ParseError(f"bad environment record: {exc}", path, lineno) from None
    else:
        body_start = len(lines)
    if version is None:
        raise ParseError("missing format_version header", path)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version}", path)

    reader = csv.reader(lines[body_start:])
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing column header", path) from None
    if tuple(header) != COLUMNS:
        raise ParseError(f"expected columns {','.join(COLUMNS)}", path, body_start + 1)

    rows = []
    seen = set()
    for offset, fields in enumerate(reader, start=2):
        lineno = body_start + offset
        if not fields:
            continue
        if len(fields) != len(COLUMNS):
            raise ParseError(f"expected {len(COLUMNS)} fields, got {len(fields)}", path, lineno)
        bid, variant, idx, tval, stamp = fields
        if not bid:
            raise ParseError("empty benchmark_id", path, lineno)
        if variant not in VARIANTS:
            raise ParseError(f"variant must be one of {VARIANTS}, got {variant!r}", path, lineno)
        try:
            run_index = int(idx)
        except ValueError:
            raise ParseError(f"run_index is not an integer: {idx!r}", path, lineno) from None
        if not _DECIMAL_RE.match(tval):
            raise ParseError(f"time_seconds is not a plain decimal: {tval!r}", path, lineno)
        try:
            positive = Decimal(tval) > 0
        except InvalidOperation:
            positive = False
        if not positive:
            raise ParseError(f"time_seconds must be positive, got {tval!r}", path, lineno)
        key = (bid, variant, run_index)
        if key in seen:
            raise ParseError(f"duplicate row for {bid}/{variant} run {run_index}", path, lineno)
        seen.add(key)
        rows.append(TimingRow(bid, variant, run_index, tval, stamp))
    return TimingFile(rows=tuple(rows), environment=env, format_version=version)


def read(path: str | Path) -> TimingFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", str(path)) from None
    return loads(text, str(path))


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def write_new(tf: TimingFile, directory: str | Path) -> Path:
    """Write to a fresh file in ``directory``; never overwrites an existing one."""
    if not tf.rows:
        raise InvalidArgument("refusing to write a timing file with no rows")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    first = tf.rows[0]
    stamp = re.sub(r"[^0-9T]", "", first.captured_at)[:22] or "nostamp"
    base = f"{_safe(first.benchmark_id)}--{first.variant}--{stamp}"
    data = dumps(tf)
    for attempt in range(1000):
        path = directory / (base + (f"-{attempt}" if attempt else "") + ".csv")
        try:
            with open(path, "x", encoding="utf-8", newline="") as fh:
                fh.write(data)
            return path
        except FileExistsError:
            continue
    raise InvalidArgument(f"could not find a free file name for {base}")

