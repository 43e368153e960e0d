import numpy as np
import pytest

from projrw import CosmologyParams, ScaleState, SpacetimePoint

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def flat_dust():
    """kappa = 0 dust with R = t^(2/3)."""
    return CosmologyParams(kappa=0, G=1.0, M=2.0 / 9.0)


@pytest.fixture
def generic_state():
    return SpacetimePoint(0.3, 0.2, -0.5, 0.4), ScaleState(0.3, 1.2, 0.7, -0.4)
