import numpy as np
import pytest
from scipy.integrate import trapezoid

from app.contour import NodeSet
from app.exceptions import DomainError
from app.scattering import (
    InitialDatum,
    ScatteringData,
    argument_count,
    find_discrete_spectrum,
    jost_solve,
    reflection,
    scattering_matrix,
)
from app.soliton import imaginary_pair_spectrum


def test_datum_enforces_boundary_rules():
    x = np.linspace(-5, 5, 11)
    with pytest.raises(DomainError):
        InitialDatum(x=x, q=np.ones_like(x), sigma=0, q_minus=1.0)
    with pytest.raises(DomainError):
        InitialDatum(x=x, q=np.ones_like(x), sigma=-1, q_minus=2.0)
    datum = InitialDatum(x=x, q=np.ones_like(x), sigma=1, q_minus=1.0)
    assert datum.delta == -1
    assert datum.q_plus == -1.0


def test_tail_weight_of_pure_background_is_zero():
    x = np.linspace(-5, 5, 11)
    datum = InitialDatum(x=x, q=np.ones_like(x), sigma=-1, q_minus=1.0)
    assert datum.tail_weight() == 0


def test_background_datum_keeps_background_columns(small_config):
    x = np.linspace(-5, 5, 41)
    datum = InitialDatum(x=x, q=np.ones_like(x), sigma=-1, q_minus=1.0)
    pair = jost_solve(datum, 2.0, small_config)
    assert np.max(np.abs(pair.mu_minus - pair.E_minus[None])) < 1e-7


def test_determinant_conservation(gaussian_datum, small_config):
    real = [-4.0, -2.5, -1.6, -1.2, -0.7, -0.4, 0.3, 0.55, 0.8, 1.4, 2.0, 3.0, 4.5]
    circle = np.exp(1j * np.array([0.3, 0.9, 1.3, 2.0, 2.6, -0.5, -2.4]))
    for z in list(real) + list(circle):
        pair = jost_solve(gaussian_datum, z, small_config)
        assert pair.det_deviation() < 1e-7


def test_reflection_symmetry(gaussian_datum, small_config):
    rho_two, rho_tilde_two = reflection(gaussian_datum, 2.0, small_config)
    rho_image, _ = reflection(gaussian_datum, -0.5, small_config)
    assert abs(rho_tilde_two - rho_image) < 1e-6


def test_reflection_product_below_one_on_circle(gaussian_datum, small_config):
    for angle in (0.3, 1.0, 2.2):
        rho, rho_tilde = reflection(gaussian_datum, np.exp(1j * angle), small_config)
        assert abs(rho * rho_tilde) < 1


def test_soliton_datum_is_reflectionless(soliton_datum, small_config):
    z = np.array([2.0, 0.5, -1.7, np.exp(0.25j * np.pi)])
    S = scattering_matrix(soliton_datum, z, small_config)
    assert np.max(np.abs(S[:, 1, 0])) < 1e-4


def test_argument_count_of_winding_samples():
    w = np.exp(2j * np.pi * np.arange(64) / 64)
    assert argument_count(w ** 2) == 2
    assert argument_count(w + 3) == 0


def test_discrete_spectrum_of_imaginary_pair(soliton_datum, small_config):
    found = find_discrete_spectrum(soliton_datum, small_config)
    expected = imaginary_pair_spectrum(2.0)
    assert len(found) == 2
    for target in expected:
        match = min(found, key=lambda ev: abs(ev.eta - target.eta))
        assert abs(match.eta - target.eta) < 1e-5
        assert abs(match.proportionality ** 2 - 1) < 1e-4
        assert abs(abs(match.norming) - abs(target.norming)) < 1e-4 * abs(target.norming)


def test_image_norming():
    ev = imaginary_pair_spectrum(2.0)[0]
    assert abs(ev.image - 0.5j) < 1e-15
    assert abs(ev.image_norming - ev.image ** 2 * ev.norming) < 1e-15


def test_from_profile_symmetry(small_config):
    data = ScatteringData.from_profile(lambda z: z ** 2 / (z ** 4 + 4), sigma=-1, config=small_config)
    for s in (0.7, 1.9, np.exp(0.9j)):
        assert abs(data.rho_tilde(s) - data.rho(-1 / s)) < 1e-6


def test_scattering_data_dict_round_trip(profile_data, small_config):
    restored = ScatteringData.from_dict(profile_data.to_dict(), small_config)
    assert np.array_equal(restored.rho_values, profile_data.rho_values)
    assert len(restored.discrete) == len(profile_data.discrete)
    assert restored.discrete[0].eta == profile_data.discrete[0].eta


def test_nodes_avoid_special_points(small_config):
    nodes = NodeSet.build(small_config)
    assert np.min(np.abs(nodes.all_points - 1j)) > 1e-3
    assert np.min(np.abs(nodes.all_points)) > 0


def sigma_points(n, seed):
    """n points of the real axis and the unit circle, clear of 0 and +-i"""
    rng = np.random.default_rng(seed)
    real = np.exp(rng.uniform(np.log(0.2), np.log(5.0), n // 2)) * rng.choice([-1, 1], n // 2)
    angle = rng.uniform(0.15, np.pi / 2 - 0.15, n - n // 2) + rng.choice([0, np.pi / 2], n - n // 2)
    return np.concatenate([real, np.exp(1j * angle * rng.choice([-1, 1], n - n // 2))])


@pytest.fixture(scope="module")
def tight_config(small_config):
    return small_config.with_overrides(ode_rtol=1e-13, ode_atol=1e-15)


def test_scattering_matrix_symmetries(gaussian_datum, tight_config):
    z = sigma_points(1000, 21)
    S = scattering_matrix(gaussian_datum, z, tight_config)
    scale = np.max(np.abs(S), axis=(1, 2))
    conjugate = np.conj(scattering_matrix(gaussian_datum, -np.conj(z), tight_config))
    assert np.max(np.max(np.abs(S - conjugate), axis=(1, 2)) / scale) < 1e-10
    # (sigma3 Q-)^-1 S(-1/z) (sigma3 Q+) swaps the diagonal and the off-diagonal pairs
    delta = gaussian_datum.q_plus / gaussian_datum.q_minus
    image = scattering_matrix(gaussian_datum, -1 / z, tight_config)
    swapped = delta * image[:, ::-1, ::-1]
    assert np.max(np.max(np.abs(S - swapped), axis=(1, 2)) / scale) < 1e-10


def mirrored_mass(datum):
    """integral of sigma q(y) q(-y) + 1 over the datum window"""
    return trapezoid(datum.sigma * datum.q * datum.q[::-1] + 1, datum.x)


def test_s11_limit_at_zero(gaussian_datum, small_config):
    mass = mirrored_mass(gaussian_datum)
    sigma = gaussian_datum.sigma
    assert abs(mass + 0.6 * np.sqrt(np.pi) + 0.09 * np.sqrt(np.pi / 2)) < 1e-6
    z = np.array([0.02, 0.01, 0.004])
    s11 = scattering_matrix(gaussian_datum, z, small_config)[:, 0, 0]
    errors = np.abs(s11 + sigma)
    assert np.all(np.diff(errors) < 0)
    assert errors[-1] < 0.01
    # first-order term: s11 = -sigma (1 + i M z) + O(z^2)
    slope = (s11[-1] + sigma) / z[-1]
    assert abs(slope + 1j * sigma * mass) < 0.03 * abs(mass)


def test_s11_large_z_coefficient(gaussian_datum, small_config):
    mass = mirrored_mass(gaussian_datum)
    z = np.array([50.0, 100.0, 250.0])
    s11 = scattering_matrix(gaussian_datum, z, small_config)[:, 0, 0]
    gaps = np.abs((s11 - 1) * z - 1j * mass)
    assert gaps[-1] < gaps[0]
    assert gaps[-1] < 0.03 * abs(mass)


def test_reflection_at_special_points(gaussian_datum, small_config):
    sigma = gaussian_datum.sigma
    assert reflection(gaussian_datum, 1j, small_config) == (sigma, sigma)
    assert reflection(gaussian_datum, -1j, small_config) == (-sigma, -sigma)
    rho, _ = reflection(gaussian_datum, np.exp(1j * (np.pi / 2 - 0.002)), small_config)
    assert abs(rho - sigma) < 0.1


def test_reflection_decays_like_inverse_square(gaussian_datum, small_config):
    z = np.array([2.0, 5.0, 10.0, 20.0, 40.0, -12.0])
    S = scattering_matrix(gaussian_datum, z, small_config)
    weighted = np.abs(S[:, 1, 0] / S[:, 0, 0]) * z ** 2
    assert np.all(weighted <= weighted[0] + 1e-6)
    # rho_tilde(-1/z) = rho(z): the same bound makes rho_tilde O(z^2) at the origin
    near_zero = -1 / z
    S = scattering_matrix(gaussian_datum, near_zero, small_config)
    assert np.all(np.abs(S[:, 0, 1] / S[:, 1, 1]) / near_zero ** 2 <= weighted[0] + 1e-6)
