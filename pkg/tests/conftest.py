"""Shared fixtures: acceptance criteria reporting.

Each acceptance test records one pass/fail line; the hook below replays
them in the terminal summary so the verdicts are visible even when pytest
captures per-test output.
"""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    def _record(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line, flush=True)
        assert ok, line
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
