import numpy as np
import pytest

TWO_POINT_X = np.array([[1.0, 0.0], [0.0, 1.0]])
TWO_POINT_Y = np.array([[1.0, 0.0], [1.0, 1.0]])


@pytest.fixture
def two_point_pair():
    return TWO_POINT_X.copy(), TWO_POINT_Y.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
