import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from plasmonbus.coupling import QDParams
from plasmonbus.plasmon import NanowireGeometry, silver_pmma

settings.register_profile(
    "plasmonbus", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("plasmonbus")

E_TAU = 1305.0968248129765  # meV at 950 nm (mpmath)


@pytest.fixture(scope="session")
def mat():
    return silver_pmma()


@pytest.fixture(scope="session")
def geom20():
    return NanowireGeometry(20e-9, 10e-6)


@pytest.fixture(scope="session")
def qd30():
    return QDParams(100.0, E_TAU, 30e-9)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield
