import math

import numpy as np
import pytest

from adiabatic_qp import AdiabaticProblem, PotentialSpec, SlowPotential, band_edges


@pytest.fixture(scope="session")
def kp():
    return PotentialSpec.kronig_penney(10.0, 0.5)


@pytest.fixture(scope="session")
def kp_bands(kp):
    return band_edges(kp, (-1.0, 200.0))


@pytest.fixture(scope="session")
def kp5(kp):
    """Kronig-Penney with W = 5 cos at E = 8: four crossings, two gaps."""
    return AdiabaticProblem(kp, SlowPotential.cosine(5.0), 8.0)


@pytest.fixture(scope="session")
def free_cos():
    return AdiabaticProblem(PotentialSpec.free(), SlowPotential.cosine(1.0), 0.5)


def wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance lines, printed in the terminal summary so they survive output capture
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE, key=lambda l: (int(l.split()[1].rstrip(":").split(".")[0]), "diag" in l.split()[1])):
        terminalreporter.write_line(line)
