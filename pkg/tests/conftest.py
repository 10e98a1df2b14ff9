"""Shared test configuration.

Registers the `acceptance` marker and prints one PASS/FAIL line per
acceptance criterion at the end of the run, independent of capture
settings, so the gate is readable straight off the terminal.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, label): marks a test as one acceptance criterion",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    num, label = marker.args
    if report.when == "call":
        _RESULTS[num] = (label, report.passed)
    elif report.failed:
        # setup or teardown blew up; the criterion did not pass
        _RESULTS[num] = (label, False)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        label, passed = _RESULTS[num]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {num:2d} {label}: {status}")
