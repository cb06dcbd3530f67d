"""Shared fixtures: the acceptance-criterion recorder and its summary block."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance check, then assert it."""

    def record(ok: bool, line: str) -> None:
        ACCEPTANCE_LINES.append(("PASS" if ok else "FAIL") + "  " + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
