import numpy as np
import pytest

from app.exceptions import DomainError
from app.spectral import (
    Region,
    Uniformization,
    classify,
    sector_bound,
    fit_sector_constant,
    phase,
    re_2it_theta,
    sample_sector,
    signature_grid,
    stationary_points,
    theta,
    theta_derivatives,
)


def test_uniformization_identity():
    for z in (0.3 + 0.1j, 2.0, -1.5j, np.exp(0.7j)):
        assert Uniformization.at(z).residual() < 1e-12


def test_uniformization_rejects_zero():
    with pytest.raises(DomainError):
        Uniformization.at(0)


def test_theta_special_values():
    assert abs(theta(1.0, -8.0) + 10) < 1e-14
    assert abs(theta(1j, 3.7)) < 1e-14
    assert abs(theta(2.0, -8.0) + theta(-0.5, -8.0)) < 1e-12


def test_theta_derivative_vanishes_at_one():
    first, _ = theta_derivatives(1.0, -11.0)
    assert abs(first) < 1e-14


def test_theta_derivative_matches_finite_difference():
    z, h = 0.8 + 0.3j, 1e-6
    first, second = theta_derivatives(z, -8.0)
    assert abs(first - (theta(z + h, -8.0) - theta(z - h, -8.0)) / (2 * h)) < 1e-7
    d1_plus, _ = theta_derivatives(z + h, -8.0)
    d1_minus, _ = theta_derivatives(z - h, -8.0)
    assert abs(second - (d1_plus - d1_minus) / (2 * h)) < 1e-6


def test_phase_is_t_theta():
    z, t = 1.3 + 0.4j, 2.5
    x = -8.0 * t
    assert abs(phase(x, t, z) - t * theta(z, -8.0)) < 1e-12


def test_classify_regions():
    assert classify(-8) is Region.I
    assert classify(0) is Region.II
    assert classify(10) is Region.III
    assert classify(-6) is Region.BOUNDARY


def test_stationary_points_region_one():
    geometry = stationary_points(-8.0)
    assert geometry.region is Region.I
    assert abs(geometry.point(5) - 1.488372) < 1e-6
    assert abs(geometry.point(1) - 0.671875) < 1e-6
    assert abs(geometry.point(1) * geometry.point(5) - 1) < 1e-12
    inside = [p for p in geometry.points if abs(p) < 1 - 1e-12]
    assert len(inside) == 2
    for p in geometry.points:
        assert abs(p.imag) < 1e-14
        assert abs(theta_derivatives(p, -8.0)[0]) < 1e-10


def test_stationary_points_region_three():
    geometry = stationary_points(10.0)
    assert abs(geometry.point(5) - np.sqrt(3) * 1j) < 1e-6 or abs(geometry.point(5) + np.sqrt(3) * 1j) < 1e-6
    assert abs(abs(geometry.point(1)) - 1 / np.sqrt(3)) < 1e-12
    for p in geometry.points[:2] + geometry.points[4:]:
        assert abs(p.real) < 1e-14
        assert abs(theta_derivatives(p, 10.0)[0]) < 1e-10


def test_stationary_points_region_two_on_circle():
    geometry = stationary_points(2.0)
    for p in geometry.points:
        assert abs(abs(p) - 1) < 1e-10
        assert abs(theta_derivatives(p, 2.0)[0]) < 1e-10


def test_stationary_points_random_rays():
    rng = np.random.default_rng(7)
    for xi in np.concatenate([rng.uniform(-20, -6.01, 25), rng.uniform(6.01, 20, 25)]):
        geometry = stationary_points(xi)
        for p in geometry.points:
            assert abs(theta_derivatives(p, xi)[0]) < 1e-10
        assert abs(geometry.point(1) * geometry.point(5) - (1 if xi < 0 else -1)) < 1e-12


def test_boundary_points_collapse():
    geometry = stationary_points(-6.0)
    assert all(abs(abs(p.real) - 1) < 1e-12 for p in geometry.points)


def test_re_2it_theta_vanishes_on_sigma():
    assert re_2it_theta(1.7, -8.0) == 0
    assert abs(re_2it_theta(np.exp(0.4j), -8.0)) < 1e-14


def test_re_2it_theta_matches_direct_formula():
    z, xi, t = 1.1 + 0.05j, -8.0, 3.0
    direct = (2j * t * theta(z, xi)).real
    assert abs(re_2it_theta(z, xi, t) - direct) < 1e-10


def test_signature_grid_marks_origin():
    re, im, signs = signature_grid(-8.0, 1.0, 5, 5, (-1, 1, -1, 1))
    centre = np.argmin(np.abs(re + 1j * im))
    assert signs[centre] == 0
    assert set(np.unique(signs)) <= {-1.0, 0.0, 1.0}


def test_sector_samples_lie_in_expected_half_plane():
    geometry = stationary_points(-8.0)
    z = sample_sector(geometry, "11", 50, np.random.default_rng(0))
    assert np.all(z.imag > 0)
    assert np.all(z.real < geometry.point(1).real)
    mirrored = sample_sector(geometry, "21", 50, np.random.default_rng(0))
    assert np.allclose(mirrored, -np.conj(z))


def test_sector_constants_positive():
    geometry = stationary_points(-8.0)
    for label in ("11", "13"):
        assert fit_sector_constant(geometry, label, n=200, seed=1) > 0


def random_points(n, seed):
    rng = np.random.default_rng(seed)
    return np.exp(rng.uniform(np.log(0.2), np.log(5.0), n)) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))


@pytest.mark.parametrize("xi", [-8.0, 10.0])
def test_theta_symmetries_on_random_points(xi):
    z = random_points(1000, 11)
    value = theta(z, xi)
    scale = 1 + np.abs(value)
    assert np.max(np.abs(theta(-1 / z, xi) + value) / scale) < 1e-10
    assert np.max(np.abs(theta(-np.conj(z), xi) + np.conj(value)) / scale) < 1e-10
    assert np.max(np.abs(theta(np.conj(z), xi) - np.conj(value)) / scale) < 1e-10


def test_region_three_sector_signs():
    geometry = stationary_points(10.0)
    rng = np.random.default_rng(5)
    upper = sample_sector(geometry, "01", 100, rng)
    assert np.all(upper.real > 0) and np.all(upper.imag > 0)
    assert np.all(np.abs(upper) < 0.6)
    for label in ("01", "02", "03", "04"):
        sign, weight = sector_bound(label, Region.III)
        z = sample_sector(geometry, label, 200, np.random.default_rng(3))
        assert np.all(sign * re_2it_theta(z, 10.0) > 0)
        assert np.all(weight(z) > 0)
        assert fit_sector_constant(geometry, label, n=200, seed=3) > 1
    with pytest.raises(DomainError):
        sample_sector(geometry, "11", 10, rng)
