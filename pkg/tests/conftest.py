"""Collects one pass/fail line per acceptance criterion and prints them at the end."""

import pytest

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def criterion(request):
    """Record a criterion's outcome: call with (label, ok, detail)."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES[label] = f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip()
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
