import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from odo_lab.games import matching_pennies, rps  # noqa: E402


@pytest.fixture
def rps_matrix():
    return rps()


@pytest.fixture
def pennies():
    return matching_pennies()


@pytest.fixture
def rock():
    return np.array([1.0, 0.0, 0.0])


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
