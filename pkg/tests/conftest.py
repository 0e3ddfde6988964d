import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hyptutte import hyp2
from hyptutte.balance import solve
from hyptutte.fuchsian import regular_group
from hyptutte.gmap import Weights
from hyptutte.simplicial import builtin_mapping

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")

# acceptance results, printed in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:2d} {'PASS' if ok else 'FAIL'}: {line}")


# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------

def points_from_seed(seed: int, n: int, radius: float = 2.5) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * np.pi, n)
    return np.stack([np.sinh(r) * np.cos(th), np.sinh(r) * np.sin(th), np.cosh(r)], -1)


coord = st.floats(-3.0, 3.0, allow_nan=False)


@st.composite
def hpoints(draw, radius=2.5):
    """Points within ``radius`` of the origin."""
    z = np.array([draw(coord), draw(coord)])
    r = np.hypot(*z)
    if r > np.sinh(radius):
        z *= np.sinh(radius) / r
    return hyp2.project_arr(np.array([z[0], z[1], 0.0]))


@st.composite
def tangents(draw, p, max_norm=5.0):
    v = hyp2.to_tangent_arr(p, np.array([draw(coord), draw(coord), draw(coord)]))
    n = hyp2.tnorm_at(p, v)
    if n > max_norm:
        v = v * (max_norm / n)
    return v


# ---------------------------------------------------------------------------
# shared fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def g2():
    return regular_group(2)


@pytest.fixture(scope="session")
def g3():
    return regular_group(3)


@pytest.fixture(scope="session")
def mesh0(g2):
    return builtin_mapping(g2, refine=0)


@pytest.fixture(scope="session")
def mesh1(g2):
    return builtin_mapping(g2, refine=1)


@pytest.fixture(scope="session")
def solved0(mesh0):
    m, _ = solve(mesh0, Weights.uniform(mesh0.complex))
    return m


@pytest.fixture(scope="session")
def solved1(mesh1):
    m, _ = solve(mesh1, Weights.uniform(mesh1.complex))
    return m
