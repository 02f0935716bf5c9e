import numpy as np
import pytest

from fstationarity import FunctionalSeries, get_model, simulate


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_series(rng):
    return FunctionalSeries(rng.standard_normal((12, 5)))


@pytest.fixture(scope="session")
def m0_series():
    return simulate(get_model("M0"), 64, G=12, seed=3)


def random_series(rng, T_max=32, G_max=8, T_min=4):
    T = int(rng.integers(T_min, T_max + 1))
    G = int(rng.integers(1, G_max + 1))
    return FunctionalSeries(rng.standard_normal((T, G)))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
