import math

import pytest

from biphoton import PumpSpectrum, ppktp_790, solve_grating_period

OMEGA_3THZ = 2.0 * math.pi * 3.0


@pytest.fixture(scope="session")
def unpoled():
    return ppktp_790()


@pytest.fixture(scope="session")
def poled(unpoled):
    return unpoled.with_period(solve_grating_period(unpoled))


@pytest.fixture(scope="session")
def linear(poled):
    """Poled preset truncated at first order: exchange-symmetric amplitudes."""
    return poled.first_order()


@pytest.fixture(scope="session")
def pump(poled):
    return PumpSpectrum(poled.omega_p, OMEGA_3THZ)
