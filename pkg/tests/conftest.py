import numpy as np
import pytest

from beamwave.grid import make_grid
from beamwave.params import BeamParameters, NlsParameters
from beamwave.profile import solve_beam, solve_nls

L12 = 12 * np.pi

# lines printed by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(256, L12)


@pytest.fixture(scope="session")
def grid512():
    return make_grid(512, L12)


@pytest.fixture(scope="session")
def wave_c1(grid256):
    return solve_beam(BeamParameters(1.0), grid256)


@pytest.fixture(scope="session")
def wave_c1375(grid256):
    return solve_beam(BeamParameters(1.375), grid256)


@pytest.fixture(scope="session")
def wave_nls(grid256):
    return solve_nls(NlsParameters(1.0, 1.0), grid256)
