"""Shared test configuration.

Adds the tests directory to ``sys.path`` so test modules can import the
brute-force oracles, and prints one summary line per acceptance criterion
at the end of the run.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def record_criterion(number: int, status: str, detail: str) -> None:
    _ACCEPTANCE_RESULTS[number] = (status, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_RESULTS):
        status, detail = _ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status} - {detail}")
