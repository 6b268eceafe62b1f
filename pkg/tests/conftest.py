import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ksband.field import Grid, SpectralField

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_field(grid: Grid, rng, decay: float = 0.0) -> SpectralField:
    """Random real field; with ``decay`` > 0 coefficients fall off like exp(-decay |k|_1)."""
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if decay:
        c = c * np.exp(-decay * grid.l1)
    return SpectralField(grid, c).symmetrized()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid1():
    return Grid(1, 16)


@pytest.fixture
def grid2():
    return Grid(2, 16)


def cos_x(grid: Grid) -> SpectralField:
    return SpectralField.from_function(grid, lambda *x: np.cos(x[0]))


TWO_PI = 2 * math.pi


def cos_x_exact(grid: Grid) -> SpectralField:
    """cos x1 from its two coefficients (no roundoff in other modes)."""
    c = np.zeros(grid.shape, complex)
    one = (1,) + (0,) * (grid.d - 1)
    c[one] = c[tuple(-i for i in one)] = 0.5
    return SpectralField(grid, c)


def ks_config(**integrator):
    from ksband.config import RunConfig

    return RunConfig().replace(grid={"d": 1, "n": 256, "L": 32 * math.pi},
                               integrator={"h": 0.05, "T": 200.0, "record_every": 100, **integrator})


@pytest.fixture(scope="session")
def ks_attractor():
    """KS state on L = 32 pi after spinning up to t = 200 from seeded random data."""
    from ksband.integrator import integrate

    cfg = ks_config()
    _, state, _ = integrate(cfg)
    return cfg, state.u


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
