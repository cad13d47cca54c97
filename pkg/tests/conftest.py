import numpy as np
import pytest

from rmtlab.ensembles import SeedSpec, complex_normal


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def seed(k, master=777, stream=0):
    return SeedSpec(master, k, stream)


def random_unit(rng, n):
    v = complex_normal(rng, n)
    return v / np.linalg.norm(v)


# one line per acceptance criterion, echoed after the run whatever the capture mode
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
