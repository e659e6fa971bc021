"""Shared fixtures and the acceptance-summary reporter."""

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion_record():
    """Record one pass/fail line per acceptance criterion, then assert."""

    def record(num: int, ok: bool, detail: str) -> None:
        line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
