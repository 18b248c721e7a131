import pytest

ACCEPTANCE: dict[int, str] = {}
CRITERIA = range(1, 10)


@pytest.fixture
def criterion():
    """record(n, ok, detail) logs one acceptance line and fails the test if not ok."""

    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE[n] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        terminalreporter.write_line(ACCEPTANCE.get(n, f"criterion {n}: NOT RUN or did not complete"))
