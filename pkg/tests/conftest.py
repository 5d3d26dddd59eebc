import numpy as np
import pytest

# Acceptance tests record one verdict per criterion here; the terminal
# summary prints them as PASS/FAIL lines.
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA):
        ok, detail = CRITERIA[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    def _record(key, ok, detail):
        CRITERIA[key] = (bool(ok), detail)
        print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    return _record


@pytest.fixture
def gen():
    return np.random.default_rng(20240611)
