import pytest

import beamspec as bs

# the systems shipped as example configs; acceptance criteria quantify over these
SHIPPED_BUILDERS = {
    "uniform_m0": lambda: bs.uniform_system(0.0),
    "uniform_m05": lambda: bs.uniform_system(0.5),
    "uniform_m1": lambda: bs.uniform_system(1.0),
    "uniform_m10": lambda: bs.uniform_system(10.0),
    "variable_m0": lambda: bs.variable_system(0.0),
    "variable_m1": lambda: bs.variable_system(1.0),
}


@pytest.fixture(scope="session")
def shipped_systems():
    return {name: build() for name, build in SHIPPED_BUILDERS.items()}


@pytest.fixture(scope="session")
def shipped_modes(shipped_systems):
    """First six eigenpairs of every shipped system (shared: expensive)."""
    return {name: bs.solve_modes(system, 6)
            for name, system in shipped_systems.items()}


@pytest.fixture(scope="session")
def uniform_m0(shipped_systems):
    return shipped_systems["uniform_m0"]


@pytest.fixture(scope="session")
def uniform_m1(shipped_systems):
    return shipped_systems["uniform_m1"]


@pytest.fixture(scope="session")
def variable_m1(shipped_systems):
    return shipped_systems["variable_m1"]


@pytest.fixture(scope="session")
def uniform_m0_modes(shipped_modes):
    return shipped_modes["uniform_m0"]


@pytest.fixture(scope="session")
def uniform_m1_modes(shipped_modes):
    return shipped_modes["uniform_m1"]
