"""
Scalar Riemann-Hilbert data built from the reflection coefficients:

    nu(s)   = -(1/2pi) log(1 - rho(s) rho_tilde(s))
    delta(z) = exp(i int nu(s)/(s - z) ds)
    T(z)    = prod_{eta in Delta} s_eta eta (z - eta_hat)/(z - eta)
              * exp(i int nu(s) (1/(s - z) - 1/(2s)) ds)

with s_eta = +1 for Re eta > 0 and -1 otherwise. The integrals run over
Gamma for xi < -6 and over Sigma for xi > 6.
"""
import cmath
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config import RunConfig, settings
from app.contour import Contour, ContourQuadrature, contour_summary, gamma_contour, sigma_contour
from app.exceptions import DomainError, OutOfScopeRegionError, PoleHitError, SpectralSingularityError
from app.scattering import DiscreteEigenvalue, ScatteringData
from app.spectral import PhaseGeometry, Region, re_2it_theta, stationary_points

logger = logging.getLogger(__name__)

POLE_RADIUS = 1e-8
BRANCH_TOL = 1e-10


def nu(product: complex) -> complex:
    """nu from the value of rho * rho_tilde, principal branch"""
    one_minus = 1 - complex(product)
    if abs(one_minus) < BRANCH_TOL:
        raise SpectralSingularityError("1 - rho*rho_tilde vanishes; the branch of nu is ambiguous",
                                       product=complex(product))
    return -cmath.log(one_minus) / (2 * np.pi)


@dataclass
class SpectrumPartition:
    delta0: float
    varrho: float
    Delta: Tuple[int, ...]
    Nabla: Tuple[int, ...]
    Lambda: Tuple[int, ...]
    values: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def delta_lambda(self) -> Tuple[int, ...]:
        return tuple(k for k in self.Lambda if k in self.Delta)

    @property
    def nabla_lambda(self) -> Tuple[int, ...]:
        return tuple(k for k in self.Lambda if k in self.Nabla)


def _disc_radius(etas: Sequence[complex], geometry: PhaseGeometry) -> float:
    points = list(etas) + [-1 / eta for eta in etas]
    candidates = [abs(eta.imag) for eta in etas]
    for i, a in enumerate(points):
        candidates += [abs(a - b) for b in points[i + 1:]]
        candidates += [abs(a - zeta) for zeta in geometry.points]
    return 0.5 * min(candidates) if candidates else 1.0


def partition(spectrum: Sequence[DiscreteEigenvalue], xi: float, config: RunConfig = settings,
              delta0: Optional[float] = None) -> SpectrumPartition:
    """
    Delta: Re(2i theta(eta)) < 0, Nabla: >= 0, Lambda: |Re(2i theta(eta))| <= delta0.
    delta0 defaults to a fraction of the largest |Re(2i theta)| with a floor.
    """
    geometry = stationary_points(xi)
    etas = [ev.eta for ev in spectrum]
    values = tuple(float(re_2it_theta(eta, xi, 1.0)) for eta in etas)
    if delta0 is None:
        largest = max((abs(v) for v in values), default=0.0)
        delta0 = max(config.delta0_fraction * largest, config.delta0_floor)
    Delta = tuple(k for k, v in enumerate(values) if v < 0)
    Nabla = tuple(k for k, v in enumerate(values) if v >= 0)
    Lambda = tuple(k for k, v in enumerate(values) if abs(v) <= delta0)
    varrho = _disc_radius(etas, geometry)
    if delta0 >= varrho and Lambda:
        logger.warning(f"delta0={delta0:.3g} is not below the disc radius {varrho:.3g}")
    return SpectrumPartition(delta0=delta0, varrho=varrho, Delta=Delta, Nabla=Nabla,
                             Lambda=Lambda, values=values)


def _orientation_sign(eta: complex) -> float:
    return 1.0 if eta.real > 0 else -1.0


# Cutoff intervals and local branches at the phase points of Gamma.
# (interval, length exponent sign, exp(pi nu) power, power sign, branch)
_BOUNDARY_RULES = {
    1: (lambda z: (0.0, z), 1, 0, -1, "principal"),
    2: (lambda z: (z, 0.0), -1, 1, 1, "upper"),
    5: (lambda z: (z, z + 1), 1, -1, -1, "upper"),
    6: (lambda z: (z - 1, z), -1, 0, 1, "principal"),
}


def _log_branch(w: complex, branch: str) -> complex:
    value = cmath.log(w)
    if branch == "upper" and value.imag <= 0:
        value += 2j * np.pi
    return value


class RhTransforms:
    def __init__(self, data: ScatteringData, geometry: PhaseGeometry, partition: SpectrumPartition,
                 config: RunConfig = settings):
        if geometry.region is Region.I:
            self.contour: Contour = gamma_contour(geometry)
        elif geometry.region is Region.III:
            self.contour = sigma_contour()
        else:
            raise OutOfScopeRegionError(f"transforms are built for xi < -6 or xi > 6, got xi={geometry.xi}")
        self.data = data
        self.geometry = geometry
        self.partition = partition
        self.quadrature = ContourQuadrature(config)
        self.poles: List[complex] = [data.discrete[k].eta for k in partition.Delta]
        self.trivial = data.reflectionless
        self._moment: Optional[complex] = None
        self._mass: Optional[complex] = None
        logger.info(f"Built transforms on {self.contour.name} with {len(self.poles)} poles in Delta")

    def nu(self, s: complex) -> complex:
        if self.trivial:
            return 0j
        return nu(self.data.product(s))

    def _cauchy(self, z: complex) -> complex:
        if self.trivial:
            return 0j
        return self.quadrature.cauchy(self.nu, self.contour, z)

    @property
    def moment(self) -> complex:
        """int nu(s)/s ds"""
        if self._moment is None:
            self._moment = 0j if self.trivial else self.quadrature.moment(self.nu, self.contour)
        return self._moment

    @property
    def mass(self) -> complex:
        """int nu(s) ds"""
        if self._mass is None:
            self._mass = 0j if self.trivial else self.quadrature.integral(self.nu, self.contour)
        return self._mass

    def delta(self, z: complex) -> complex:
        return cmath.exp(1j * self._cauchy(z))

    def _check_poles(self, z: complex, skip: Optional[complex] = None):
        for eta in self.poles:
            if eta == skip:
                continue
            if abs(z - eta) < POLE_RADIUS:
                raise PoleHitError("T evaluated at a pole", z=z, pole=eta)

    def blaschke(self, z: complex, skip: Optional[complex] = None) -> complex:
        value = 1 + 0j
        for eta in self.poles:
            if eta == skip:
                continue
            value *= _orientation_sign(eta) * eta * (z + 1 / eta) / (z - eta)
        return value

    def T(self, z: complex) -> complex:
        z = complex(z)
        self._check_poles(z)
        return self.blaschke(z) * cmath.exp(1j * (self._cauchy(z) - self.moment / 2))

    def T_without(self, z: complex, eta: complex) -> complex:
        """T with the factor belonging to the pole eta removed"""
        z = complex(z)
        self._check_poles(z, skip=eta)
        return self.blaschke(z, skip=eta) * cmath.exp(1j * (self._cauchy(z) - self.moment / 2))

    def inverse_T_derivative(self, eta: complex) -> complex:
        """(1/T)'(eta) at a pole eta of T"""
        rest = self.T_without(eta, eta)
        return 1 / (_orientation_sign(eta) * eta * (eta + 1 / eta) * rest)

    def T_derivative_at_zero(self, eta: complex) -> complex:
        """T'(eta_hat) at the zero eta_hat = -1/eta of T"""
        image = -1 / eta
        rest = self.T_without(image, eta)
        return _orientation_sign(eta) * eta / (image - eta) * rest

    @property
    def T_inf(self) -> complex:
        value = 1 + 0j
        for eta in self.poles:
            value *= _orientation_sign(eta) * eta
        return value * cmath.exp(-0.5j * self.moment)

    @property
    def T1(self) -> complex:
        """coefficient of 1/z in T(z)/T(inf)"""
        return sum((eta + 1 / eta for eta in self.poles), 0j) - 1j * self.mass

    @property
    def symmetry_sign(self) -> int:
        """T(z) T(-1/z)"""
        return (-1) ** len(self.poles)

    def jump_ratio(self, s0: complex, eps: float = 1e-4, which: str = "T") -> Tuple[complex, complex]:
        """(f_+/f_- at s0 from two-sided limits, 1 - rho rho_tilde(s0)) for f = T or delta"""
        z_plus, z_minus = self.contour.side_points(s0, eps)
        f = self.T if which == "T" else self.delta
        return f(z_plus) / f(z_minus), 1 - self.data.product(s0)

    def Ti_boundary(self, index: int) -> complex:
        """
        Regularised T_i(zeta_i) with T(z) ~ T_i (z - zeta_i)^(-+ i nu(zeta_i))
        as z -> zeta_i; see local_power for the branches.
        """
        if self.geometry.region is not Region.I:
            raise DomainError("boundary constants are defined for xi < -6")
        if index not in _BOUNDARY_RULES:
            raise DomainError(f"phase point index must be 1, 2, 5 or 6, got {index}")
        zeta = self.geometry.point(index).real
        interval, ell_sign, pi_power, _, _ = _BOUNDARY_RULES[index]
        lo, hi = interval(zeta)
        nu_i = self.nu(zeta)
        ell = hi - lo
        regular = 0j
        if not self.trivial:
            for piece in self.contour.pieces:
                breaks = [1 / v for v in (lo, hi) if piece.kind == "inverted" and v != 0]

                def integrand(tau, p=piece):
                    s = complex(p.point(tau))
                    chi = 1.0 if lo <= s.real <= hi else 0.0
                    return (self.nu(s) - nu_i * chi) * complex(p.kernel(tau, zeta))

                regular += self.quadrature.integrate_piece(piece, integrand, points=breaks)
        R = regular - self.moment / 2
        factor = cmath.exp(1j * ell_sign * nu_i * np.log(ell) + pi_power * np.pi * nu_i)
        return self.blaschke(zeta) * cmath.exp(1j * R) * factor

    def local_power(self, index: int, z: complex) -> complex:
        """(z - zeta_i)^(-+ i nu_i) on the branch whose cut lies along the adjacent Gamma piece"""
        zeta = self.geometry.point(index).real
        _, _, _, power_sign, branch = _BOUNDARY_RULES[index]
        return cmath.exp(power_sign * 1j * self.nu(zeta) * _log_branch(complex(z) - zeta, branch))

    def summary(self, points: Sequence[complex] = ()) -> Dict:
        report = {
            "xi": self.geometry.xi,
            "region": self.geometry.region.value,
            "contour": contour_summary(self.contour),
            "T_inf": self.T_inf,
            "T1": self.T1,
            "symmetry_sign": self.symmetry_sign,
            "T": [self.T(z) for z in points],
            "delta": [self.delta(z) for z in points],
        }
        if self.geometry.region is Region.I:
            report["nu"] = {i: self.nu(self.geometry.point(i).real) for i in (1, 2, 5, 6)}
        return report


def build_transforms(data: ScatteringData, xi: float, config: RunConfig = settings,
                     delta0: Optional[float] = None) -> RhTransforms:
    geometry = stationary_points(xi)
    parts = partition(data.discrete, xi, config, delta0)
    return RhTransforms(data, geometry, parts, config)
