import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jumplock.dynamics import FullLambdaParams, ReducedLambdaParams, TwoLevelParams
from jumplock.qstate import BrightDarkBasis

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_density(rng, dim):
    """Random full-rank density matrix from a Ginibre sample."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@st.composite
def density_matrices(draw, dim=2):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_density(np.random.default_rng(seed), dim)


@st.composite
def ball_points(draw):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    n = np.linalg.norm(v)
    return v / n * draw(st.floats(0, 1)) if n > 1e-9 else np.zeros(3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_level():
    return TwoLevelParams(delta=0.25, u_bar=0.06, v_bar=0.06, omega=1.0)


@pytest.fixture
def reduced():
    return ReducedLambdaParams(0.2, 0.03, 20.0, BrightDarkBasis.from_angle(math.pi / 4))


@pytest.fixture
def full():
    return FullLambdaParams(0.1, 1.0, 1.0, 3.0, 3.0, 0.03, 26.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
