import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent
LASER_PATH = ROOT / "data" / "santafe_laser.txt"

# filled by tests/test_acceptance.py; printed once at the end of the session
ACCEPTANCE_LINES = []


@pytest.fixture
def laser_path():
    return str(LASER_PATH)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
