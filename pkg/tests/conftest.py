import numpy as np
import pytest

from twoslit import optics

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def geom():
    return optics.DEFAULT_GEOMETRY


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_state(rng, env_dim):
    chi = rng.normal(size=(2, env_dim)) + 1j * rng.normal(size=(2, env_dim))
    return optics.QuantonEnvironmentState(chi / np.linalg.norm(chi))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
