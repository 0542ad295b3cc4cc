"""Session-cached reference runs shared across the test modules."""

import pytest

from tpim import integrate, validate_parameters

from support import SYMMETRIC, TABLE1, scenario


@pytest.fixture(scope="session")
def table1():
    return validate_parameters(TABLE1)


@pytest.fixture(scope="session")
def symmetric():
    return validate_parameters(SYMMETRIC)


@pytest.fixture(scope="session")
def rated_trace(table1):
    """Rated startup: 230 V rms / 50 Hz quadrature, 1.0096 N*m, 1.0 s."""
    return integrate(table1, scenario())


@pytest.fixture(scope="session")
def symmetric_trace(symmetric):
    """Symmetric reduction of the rated startup, run to full steady state."""
    return integrate(symmetric, scenario(duration=2.0))


@pytest.fixture(scope="session")
def euler_reference(table1):
    """Forward-Euler oracle at dt=1e-7 over the first 0.2 s, recorded every
    1e-4 s so records align index-for-index with dt=1e-4 runs."""
    return integrate(
        table1, scenario(method="euler", dt=1e-7, duration=0.2, record_every=1000)
    )


@pytest.fixture(scope="session")
def rk4_02_trace(table1):
    return integrate(table1, scenario(duration=0.2))
