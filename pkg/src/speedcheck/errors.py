"""Exception hierarchy.

Every error raised on purpose by this package derives from
:class:`SpeedcheckError`; the CLI maps the subclasses onto exit codes.
"""

from __future__ import annotations


class SpeedcheckError(Exception):
    """Base class for all package errors."""


class InvalidArgument(SpeedcheckError, ValueError):
    pass


class EmptySample(SpeedcheckError, ValueError):
    pass


class ZeroVariance(SpeedcheckError, ValueError):
    """Raised when a test statistic is undefined because the data do not vary."""


class UnsupportedSampleSize(SpeedcheckError, ValueError):
    pass


class MismatchedInput(SpeedcheckError, ValueError):
    pass


class NothingToAggregate(SpeedcheckError):
    pass


class InvalidTiming(SpeedcheckError, ValueError):
    pass


class GuardViolated(SpeedcheckError):
    """The proportion interval is refused because fewer than 10 successes were seen."""


class ParseError(SpeedcheckError, ValueError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class HarnessError(SpeedcheckError):
    """Base class for failures while executing a benchmark plan."""


class LaunchFailed(HarnessError):
    pass


class BenchmarkFailed(HarnessError):
    def __init__(self, run_index: int, exit_status: int):
        super().__init__(f"run {run_index} exited with status {exit_status}")
        self.run_index = run_index
        self.exit_status = exit_status


class RunTimedOut(HarnessError):
    def __init__(self, run_index: int, timeout: float):
        super().__init__(f"run {run_index} exceeded timeout of {timeout}s")
        self.run_index = run_index
        self.timeout = timeout


class HostBusy(HarnessError):
    """Another plan holds the host lock and ``force`` was not given."""
