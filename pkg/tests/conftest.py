"""Shared fixtures and the acceptance-summary reporter.

Acceptance tests register one line per criterion through the
``criterion_log`` fixture; the terminal summary prints them all at the
end of the run so the pass/fail status of each criterion is visible
regardless of capture settings.
"""
from __future__ import annotations

import pytest

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture(scope="session")
def criterion_log():
    def record(number: int, name: str, passed: bool, detail: str) -> None:
        _CRITERIA[number] = (name, passed, detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        name, passed, detail = _CRITERIA[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number} [{status}] {name}: {detail}")
