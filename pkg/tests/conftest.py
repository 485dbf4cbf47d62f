"""Collects one verdict line per acceptance criterion and prints them after the run."""
import pytest

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(number, passed, detail)`` records the verdict line for one criterion."""
    def record(number: int, passed: bool, detail: str) -> bool:
        _LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(_LINES[number])
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_LINES):
            terminalreporter.write_line(_LINES[k])
