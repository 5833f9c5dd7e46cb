import numpy as np
import pytest
from scipy.special import gamma

from app.exceptions import GammaPoleError
from app.special import complex_gamma, reciprocal_gamma


@pytest.mark.parametrize("z", [0.5, 1.0, 3.7, 0.2 + 0.3j, -0.5 + 0.3j, 0.05j, -0.03j, -2.5 - 1.0j, 4 + 6j])
def test_complex_gamma_matches_scipy(z):
    expected = gamma(complex(z))
    assert abs(complex_gamma(z) - expected) < 1e-11 * abs(expected)


def test_gamma_half():
    assert abs(complex_gamma(0.5) - np.sqrt(np.pi)) < 1e-14


@pytest.mark.parametrize("pole", [0, -1, -4])
def test_gamma_poles(pole):
    with pytest.raises(GammaPoleError):
        complex_gamma(pole)
    assert reciprocal_gamma(pole) == 0


def test_reciprocal_gamma_near_origin():
    z = 1e-8j
    assert abs(reciprocal_gamma(z) - z) < 1e-15
