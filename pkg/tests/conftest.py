import pytest

from homoclinic.pipeline import solve

ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def bridge05():
    return solve(0.5, "bridge")


@pytest.fixture(scope="session")
def sh05():
    return solve(0.5, "sh")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
