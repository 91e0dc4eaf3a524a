import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from speedcheck.protocol import BASELINE, OPTIMIZED, Decision, SpeedupVerdict, TimingSample  # noqa: E402

# Execution times of the initial and transformed programs in the worked example.
T1 = (2.799, 2.046, 1.259, 1.877, 2.244)
T2 = (1.046, 0.259, 0.877, 1.244, 1.799)


@pytest.fixture
def t1():
    return TimingSample("ex1", BASELINE, T1)


@pytest.fixture
def t2():
    return TimingSample("ex1", OPTIMIZED, T2)


def confirmed(benchmark_id, before, after, alpha):
    """A confirmed verdict built straight from medians, for aggregation tests."""
    return SpeedupVerdict(
        benchmark_id=benchmark_id,
        decision=Decision.SPEEDUP_CONFIRMED,
        alpha=alpha,
        baseline_median=before,
        optimized_median=after,
        speedup=before / after,
    )


def unconfirmed(benchmark_id, before, after, alpha):
    return SpeedupVerdict(
        benchmark_id=benchmark_id,
        decision=Decision.NO_SPEEDUP,
        alpha=alpha,
        baseline_median=before,
        optimized_median=after,
    )


# ---------------------------------------------------------------------------
# acceptance bookkeeping: one PASS/FAIL line per criterion in the summary
# ---------------------------------------------------------------------------

_CRITERIA: dict[int, dict] = {}


class _Recorder:
    def __init__(self, number, title):
        self.entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "notes": []})

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self.entry["ok"] = False
            self.entry["notes"].append(str(exc).splitlines()[0] if str(exc) else exc_type.__name__)
        return False


@pytest.fixture
def criterion():
    return _Recorder


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] else "FAIL"
        line = f"criterion {number}: {status}  {e['title']}"
        if e["notes"]:
            line += "  -- " + "; ".join(e["notes"])
        terminalreporter.write_line(line)
