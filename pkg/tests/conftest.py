import numpy as np
import pytest
from hypothesis import settings, strategies as st

from exprecog.fixtures import fixture_set, random_exppoly_1d, random_exppoly_2d

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def exppolys(draw, dims=(1, 2), max_dimension=4, **kwargs):
    """Random ExpPoly built from a drawn seed, so failures shrink to a seed."""
    seed = draw(st.integers(0, 2**32 - 1))
    d = draw(st.sampled_from(dims))
    n = draw(st.integers(1, max_dimension))
    rng = np.random.default_rng(seed)
    if d == 1:
        return random_exppoly_1d(rng, n, **kwargs)
    return random_exppoly_2d(rng, n, **kwargs)


@pytest.fixture(scope="session")
def fixtures100():
    return fixture_set(100)


def rel_close(a, b, rtol):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    scale = max(np.abs(a).max(initial=0), np.abs(b).max(initial=0), 1e-300)
    return np.abs(a - b).max(initial=0) <= rtol * scale


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
