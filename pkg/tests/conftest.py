import numpy as np
import pytest

from kagome_jja.coupling import finite_kernel
from kagome_jja.lattice import build_lattice, build_plaquettes, single_plaquette

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def plaquette():
    return single_plaquette()


@pytest.fixture(scope="session")
def plaquette_kernel(plaquette):
    return finite_kernel(plaquette)


@pytest.fixture(scope="session")
def small_kernels():
    """Finite kernels for the plaquette grids used in the polarization curves."""
    return {shape: finite_kernel(build_plaquettes(*shape)) for shape in [(1, 1), (1, 2), (2, 1), (2, 2)]}


@pytest.fixture(scope="session")
def open_lattice_30():
    return build_lattice(30, 30)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
