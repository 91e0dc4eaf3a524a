"""Run a benchmark command repeatedly, one fresh process per run.

Each run is timed with a monotonic wall clock from just before spawn until
the child has been reaped. Runs are strictly sequential. The environment is
recorded, not controlled: no cache flushing, pinning or frequency locking.
"""

from __future__ import annotations

import hashlib
import logging
import os
import platform
import shutil
import socket
import subprocess
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from filelock import FileLock, Timeout

from .errors import BenchmarkFailed, HostBusy, InvalidArgument, LaunchFailed, RunTimedOut
from .protocol import VARIANTS, TimingSample

log = logging.getLogger(__name__)

RECOMMENDED_RUNS = 30
DEFAULT_TIMEOUT = 3600.0

BACK_TO_BACK_RUNS = "BackToBackRuns"
LOW_RUN_COUNT = "LowRunCount"

HOST_LOCK_PATH = Path(tempfile.gettempdir()) / "speedcheck-host.lock"


@dataclass(frozen=True)
class RunPlan:
    benchmark_id: str
    variant: str
    command: tuple[str, ...]
    runs: int = RECOMMENDED_RUNS
    cooldown: float = 0.0
    working_dir: Optional[str] = None
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        object.__setattr__(self, "command", tuple(str(c) for c in self.command))
        if not self.command:
            raise InvalidArgument("command is empty")
        if not self.benchmark_id:
            raise InvalidArgument("benchmark_id is empty")
        if self.variant not in VARIANTS:
            raise InvalidArgument(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if int(self.runs) != self.runs or self.runs < 1:
            raise InvalidArgument(f"runs must be a positive integer, got {self.runs}")
        if not self.timeout > 0:
            raise InvalidArgument(f"timeout must be positive, got {self.timeout}")
        if self.cooldown < 0:
            raise InvalidArgument(f"cooldown must be >= 0, got {self.cooldown}")

    @classmethod
    def from_dict(cls, d: dict) -> "RunPlan":
        known = {"benchmark_id", "variant", "command", "runs", "cooldown", "working_dir", "timeout"}
        unknown = set(d) - known
        if unknown:
            raise InvalidArgument(f"unknown plan keys: {', '.join(sorted(unknown))}")
        return cls(**{**d, "command": tuple(d.get("command", ()))})


@dataclass(frozen=True)
class EnvironmentRecord:
    hostname: str
    os_name: str
    os_release: str
    os_version: str
    processor: str
    captured_at: str
    env_size_bytes: int
    env_hash: str
    load_average: Optional[float]
    spawn_overhead_seconds: Optional[float] = None
    python: str = field(default_factory=platform.python_version)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EnvironmentRecord":
        return cls(**d)


def _processor_model() -> str:
    try:
        with open("/proc/cpuinfo", encoding="utf-8", errors="replace") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    return line.split(":", 1)[1].strip()
    except OSError:
        pass
    return platform.processor() or platform.machine()


def _env_digest(env: dict[str, str]) -> tuple[int, str]:
    # size counts the "KEY=VALUE\0" block a child process receives
    size = sum(len(k.encode()) + len(v.encode()) + 2 for k, v in env.items())
    h = hashlib.sha256()
    for k in sorted(env):
        h.update(f"{k}={env[k]}\n".encode("utf-8", "surrogateescape"))
    return size, h.hexdigest()


def _noop_command() -> list[str]:
    true = shutil.which("true")
    return [true] if true else [sys.executable, "-c", "pass"]


def measure_spawn_overhead() -> Optional[float]:
    """Wall time of spawning and reaping a no-op process, or None if that fails."""
    try:
        start = time.perf_counter_ns()
        subprocess.run(_noop_command(), stdin=subprocess.DEVNULL, stdout=subprocess.DEVNULL,
                       stderr=subprocess.DEVNULL, check=False, timeout=30)
        return (time.perf_counter_ns() - start) / 1e9
    except (OSError, subprocess.SubprocessError):
        return None


def capture_environment(calibrate: bool = True) -> EnvironmentRecord:
    uname = platform.uname()
    size, digest = _env_digest(dict(os.environ))
    try:
        load = os.getloadavg()[0]
    except (AttributeError, OSError):
        load = None
    return EnvironmentRecord(
        hostname=socket.gethostname(),
        os_name=uname.system,
        os_release=uname.release,
        os_version=uname.version,
        processor=_processor_model(),
        captured_at=datetime.now(timezone.utc).isoformat(timespec="microseconds"),
        env_size_bytes=size,
        env_hash=digest,
        load_average=load,
        spawn_overhead_seconds=measure_spawn_overhead() if calibrate else None,
    )


def warn_independence(plan: RunPlan) -> list[str]:
    warnings = []
    if plan.cooldown == 0:
        warnings.append(BACK_TO_BACK_RUNS)
    if plan.runs < RECOMMENDED_RUNS:
        warnings.append(LOW_RUN_COUNT)
    return warnings


def _run_once(plan: RunPlan, index: int) -> int:
    """Spawn, wait and return elapsed nanoseconds for one run."""
    start = time.perf_counter_ns()
    try:
        proc = subprocess.Popen(
            plan.command,
            cwd=plan.working_dir,
            stdin=subprocess.DEVNULL,
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
    except OSError as exc:
        raise LaunchFailed(f"cannot start {plan.command[0]!r}: {exc}") from exc
    try:
        status = proc.wait(timeout=plan.timeout)
    except subprocess.TimeoutExpired:
        proc.kill()
        proc.wait()
        raise RunTimedOut(index, plan.timeout) from None
    elapsed = time.perf_counter_ns() - start
    if status != 0:
        raise BenchmarkFailed(index, status)
    return elapsed


def execute_plan(plan: RunPlan, force: bool = False, calibrate: bool = True) -> TimingSample:
    """Execute ``plan.runs`` sequential runs and return the timing sample.

    A host-wide lock keeps two plans from measuring at once; ``force``
    skips it for users who accept the interference.
    """
    lock = FileLock(str(HOST_LOCK_PATH))
    if not force:
        try:
            lock.acquire(timeout=0)
        except Timeout:
            raise HostBusy(f"another plan is running on this host (lock {HOST_LOCK_PATH}); use force to override") from None
    try:
        env = capture_environment(calibrate=calibrate)
        times: list[float] = []
        for index in range(1, plan.runs + 1):
            if index > 1 and plan.cooldown:
                time.sleep(plan.cooldown)
            ns = _run_once(plan, index)
            times.append(ns / 1e9)
            log.debug("%s/%s run %d: %.9f s", plan.benchmark_id, plan.variant, index, ns / 1e9)
        return TimingSample(plan.benchmark_id, plan.variant, tuple(times), env)
    finally:
        if lock.is_locked:
            lock.release()

