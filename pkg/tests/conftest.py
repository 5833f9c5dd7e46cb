import numpy as np
import pytest

from app.config import settings
from app.scattering import InitialDatum, ScatteringData
from app.soliton import SolitonSeed, imaginary_pair_spectrum, one_soliton_excess
from app.validation import synthetic_profile

OMEGA = 2.0


@pytest.fixture(scope="session")
def small_config():
    return settings.with_overrides(
        real_nodes=64,
        circle_nodes=32,
        argument_nodes=128,
        search_grid=12,
        quad_tol=1e-9,
        ode_rtol=1e-9,
        ode_atol=1e-11,
    )


@pytest.fixture(scope="session")
def pair_seed():
    return SolitonSeed.imaginary_pair(OMEGA)


@pytest.fixture(scope="session")
def soliton_datum():
    x = np.arange(-15.0, 15.0 + 1e-9, 0.02)
    return InitialDatum(x=x, q=1 + one_soliton_excess(x, 0.0, OMEGA), sigma=-1, q_minus=1.0)


@pytest.fixture(scope="session")
def gaussian_datum():
    x = np.linspace(-10.0, 10.0, 801)
    return InitialDatum(x=x, q=1 + 0.3 * np.exp(-x ** 2), sigma=-1, q_minus=1.0)


@pytest.fixture(scope="session")
def profile_data(small_config):
    return ScatteringData.from_profile(synthetic_profile, sigma=-1, q_minus=1.0,
                                       discrete=imaginary_pair_spectrum(OMEGA), config=small_config)


@pytest.fixture(scope="session")
def pair_data(small_config):
    return ScatteringData.reflectionless_data(imaginary_pair_spectrum(OMEGA), sigma=-1, config=small_config)
