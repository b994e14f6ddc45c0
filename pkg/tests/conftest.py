import pytest

from rankin_delta.hecke import load_form
from rankin_delta.weights import bump


@pytest.fixture(scope="session")
def form():
    return load_form()


@pytest.fixture(scope="session")
def voronoi_weight():
    # sharper bump: its Mellin transform decays fast enough for a certified dual-sum tail
    return bump(30.0, 60.0, power=4)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
