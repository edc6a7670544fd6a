import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert."""

    def record(number: int, title: str, checks: dict[str, tuple[bool, str]]):
        ok = all(passed for passed, _ in checks.values())
        detail = "; ".join(
            f"{name}: {'ok' if passed else 'FAILED'} ({info})" for name, (passed, info) in checks.items()
        )
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title} | {detail}"
        _LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
