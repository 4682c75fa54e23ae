import numpy as np
import pytest

from tdho import OscillatorProfile


@pytest.fixture(scope="session")
def static_profile():
    return OscillatorProfile.static(m0=1.0, omega0=1.0)


@pytest.fixture(scope="session")
def quench_profile():
    return OscillatorProfile.tanh_quench(
        m0=1.0, omega_initial=2.0, omega_final=1.0, t_center=5.0, width=0.5
    )


@pytest.fixture(scope="session")
def mass_ramp_profile():
    return OscillatorProfile.mass_linear_ramp(m0=1.0, omega0=1.0, rate=0.005)


@pytest.fixture(scope="session")
def sinusoidal_profile():
    return OscillatorProfile.sinusoidal(m0=1.0, omega0=2.0, depth=0.5, rate=1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
