"""Shared test plumbing: a recorder that echoes acceptance-criterion
verdict lines into the terminal summary, one line per criterion."""

import pytest

_CRITERION_LINES = []


def _record(line: str) -> None:
    _CRITERION_LINES.append(line)
    print(line)


@pytest.fixture(scope="session")
def criterion_log():
    return _record


def pytest_terminal_summary(terminalreporter):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)
