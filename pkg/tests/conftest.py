import pytest

_LINES = []


@pytest.fixture
def acceptance_line():
    """Collect one summary line per acceptance criterion."""

    def add(number, passed, text, seconds):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} ({seconds:.1f}s) {text}"
        _LINES.append((number, line))
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
