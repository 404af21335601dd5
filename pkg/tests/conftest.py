import pytest

_LINES: list[str] = []


@pytest.fixture
def record():
    """Collects ``criterion N: pass|fail ...`` lines for the terminal summary."""

    def _record(number: int, title: str, ok: bool, detail: str) -> str:
        line = f"criterion {number:2d} {'pass' if ok else 'fail'}  {title}: {detail}"
        _LINES.append(line)
        print(line)
        return line

    return _record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
