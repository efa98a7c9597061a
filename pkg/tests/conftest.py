import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line, print it and fail the test if it did not pass."""

    def record(number, title, passed, detail, seconds=None):
        timing = "" if seconds is None else f" ({seconds:.1f} s)"
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}{timing}"
        request.config.stash.setdefault(_LINES, []).append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
