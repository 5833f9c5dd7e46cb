"""
Uniformization, the phase function theta, its stationary points and the
signature of Re(2it theta).

    theta(z) = (1/2)(z + 1/z)[xi - 2 + (z - 1/z)^2]

All functions accept scalars or numpy arrays.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Tuple

import numpy as np

from app.exceptions import DomainError

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12
PHASE_INDICES = (1, 2, 5, 6)


class Region(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    BOUNDARY = "boundary"


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("the phase function is singular at z = 0", z=0j)
    return arr


def _out(value):
    return complex(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class Uniformization:
    z: complex
    k: complex
    lam: complex

    @classmethod
    def at(cls, z: complex) -> "Uniformization":
        z = complex(_as_complex(z))
        return cls(z=z, k=(z - 1 / z) / 2, lam=(z + 1 / z) / 2)

    def residual(self) -> float:
        """|lambda^2 - k^2 - 1|, zero up to rounding"""
        return abs(self.lam ** 2 - self.k ** 2 - 1)


def theta(z, xi: float):
    z = _as_complex(z)
    return _out(0.5 * (z + 1 / z) * (xi - 2 + (z - 1 / z) ** 2))


def theta_derivatives(z, xi: float):
    """First and second derivative of theta, both in closed form"""
    z = _as_complex(z)
    first = -(1 - z ** 2) * (3 * z ** 4 + xi * z ** 2 + 3) / (2 * z ** 4)
    second = 3 * z + 6 * z ** -5 + (xi - 3) * z ** -3
    return _out(first), _out(second)


def phase(x, t, z):
    """t*theta(x/t, z) = lambda (x + (4k^2 - 2) t), also valid at t = 0"""
    z = _as_complex(z)
    lam = (z + 1 / z) / 2
    k = (z - 1 / z) / 2
    return lam * (np.asarray(x) + (4 * k ** 2 - 2) * np.asarray(t))


def re_2it_theta(z, xi: float, t: float = 1.0):
    """Re[2it theta(z)] in the factored form that vanishes on R and |z| = 1"""
    z = _as_complex(z)
    u, v = z.real, z.imag
    r2 = np.abs(z) ** 2
    bracket = xi - 3 + (1 + 1 / r2 + 1 / r2 ** 2) * (3 * u ** 2 - v ** 2)
    value = -t * v * (1 - 1 / r2) * bracket
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class PhaseGeometry:
    xi: float
    points: Tuple[complex, ...]
    region: Region
    t: float = 1.0

    def point(self, index: int) -> complex:
        return self.points[index - 1]

    @property
    def phase_points(self) -> Dict[int, complex]:
        return {i: self.point(i) for i in PHASE_INDICES}

    def theta(self, z):
        return theta(z, self.xi)

    def theta2(self, index: int) -> complex:
        return theta_derivatives(self.point(index), self.xi)[1]

    def re_2it_theta(self, z):
        return re_2it_theta(z, self.xi, self.t)


def classify(xi: float) -> Region:
    if abs(xi + 6) < BOUNDARY_TOL or abs(xi - 6) < BOUNDARY_TOL:
        return Region.BOUNDARY
    if xi < -6:
        return Region.I
    if xi > 6:
        return Region.III
    return Region.II


def stationary_points(xi: float, t: float = 1.0) -> PhaseGeometry:
    """
    The six zeros of theta'. Ordered (zeta_1, ..., zeta_6) with zeta_3 = 1,
    zeta_4 = -1, zeta_2 = -zeta_1, zeta_6 = -zeta_5 and zeta_1 the inner point.
    """
    xi = float(xi)
    region = classify(xi)
    if region is Region.BOUNDARY:
        double = 1.0 + 0j if xi < 0 else 1j
        inner = outer = double
    elif region is Region.I:
        w_outer = (-xi + np.sqrt(xi * xi - 36)) / 6
        outer = complex(np.sqrt(w_outer))
        inner = 1 / outer
    elif region is Region.III:
        w_outer = (-xi - np.sqrt(xi * xi - 36)) / 6
        a = np.sqrt(-w_outer)
        outer = complex(0, a)
        inner = complex(0, 1 / a)
    else:
        w_upper = complex(-xi, np.sqrt(36 - xi * xi)) / 6
        inner = complex(np.sqrt(w_upper))
        outer = inner.conjugate()
    points = (inner, -inner, 1 + 0j, -1 + 0j, outer, -outer)
    logger.debug(f"Stationary points at xi={xi}: region {region.value}")
    return PhaseGeometry(xi=xi, points=points, region=region, t=t)


def signature_grid(xi: float, t: float, nx: int, ny: int, window: Tuple[float, float, float, float]):
    """Sign of Re(2it theta) on a rectangular grid, with z = 0 mapped to sign 0"""
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    re, im = np.meshgrid(xs, ys, indexing="xy")
    z = (re + 1j * im).ravel()
    signs = np.zeros(z.size)
    mask = z != 0
    signs[mask] = np.sign(re_2it_theta(z[mask], xi, t))
    return re.ravel(), im.ravel(), signs


# Sectors near the phase points, 0 and +-1 used by the sign estimates.
# Mirror images (z -> -conj z) keep Re(2i theta) unchanged.
_MIRRORS = {"2": "1", "6": "5", "4": "3"}
_OFFSETS_UPPER_LEFT_FIRST = {"1": (-1, 1), "2": (1, 1), "3": (1, -1), "4": (-1, -1)}
_OFFSETS_UPPER_RIGHT_FIRST = {"1": (1, 1), "2": (-1, 1), "3": (-1, -1), "4": (1, -1)}


def _sector_frame(geometry: PhaseGeometry, label: str):
    """Centre, horizontal reach and (dx, dy) orientation of a base sector"""
    head, tail = label[0], label[1]
    if geometry.region is Region.III:
        if head != "0":
            raise DomainError(f"sector {label} is only defined for xi < -6")
        reach = {"1": 0.5, "4": 0.5}
        if tail not in reach:
            raise DomainError(f"sector {label} is not a base sector")
        return 0.0, reach[tail], (1, 1 if tail == "1" else -1)
    if geometry.region is not Region.I:
        raise DomainError("sectors are defined in regions I and III only")
    z1 = geometry.point(1).real
    z5 = geometry.point(5).real
    if head == "0":
        if tail not in ("1", "4"):
            raise DomainError(f"sector {label} is not a base sector")
        return 0.0, z1 / 2, (1, 1 if tail == "1" else -1)
    if head == "1":
        dx, dy = _OFFSETS_UPPER_LEFT_FIRST[tail]
        return z1, (z1 / 2 if dx < 0 else (1 - z1) / 2), (dx, dy)
    if head == "5":
        dx, dy = _OFFSETS_UPPER_LEFT_FIRST[tail]
        return z5, ((z5 - 1) / 2 if dx < 0 else 1.0), (dx, dy)
    if head == "3":
        dx, dy = _OFFSETS_UPPER_RIGHT_FIRST[tail]
        return 1.0, ((1 - z1) / 2 if dx < 0 else (z5 - 1) / 2), (dx, dy)
    raise DomainError(f"unknown sector {label}")


def sample_sector(geometry: PhaseGeometry, label: str, n: int, rng: np.random.Generator,
                  aperture: float = 0.2) -> np.ndarray:
    """
    n points inside the sector Omega_<label>, e.g. "11" or "53". Sectors
    are wedges of half-angle min(aperture, pi/4) between the centre and the
    midpoint to the next special point.
    """
    if len(label) != 2:
        raise DomainError(f"sector labels have two digits, got {label!r}")
    head, tail = label
    mirrored = False
    if head == "0" and tail in ("2", "3"):
        mirrored, tail = True, {"2": "1", "3": "4"}[tail]
    elif head in _MIRRORS:
        mirrored, head = True, _MIRRORS[head]
    centre, reach, (dx, dy) = _sector_frame(geometry, head + tail)
    phi = min(aperture, np.pi / 4)
    offset = reach * rng.uniform(0.05, 0.95, n)
    angle = phi * rng.uniform(0.05, 0.95, n)
    z = centre + dx * offset + 1j * dy * offset * np.tan(angle)
    return -np.conj(z) if mirrored else z


def sector_bound(label: str, region: Region) -> Tuple[int, Callable[[np.ndarray], np.ndarray]]:
    """Expected sign of Re(2i theta) in the sector and the weight it dominates"""
    head, tail = label
    if head == "0":
        sign = 1 if tail in ("1", "2") else -1
        if region is Region.III:
            return sign, lambda z: np.abs(z.imag)
        return sign, lambda z: np.abs(np.sin(np.angle(z))) * (1 / np.abs(z) - np.abs(z))
    sign = 1 if tail in ("1", "3") else -1
    if head in ("3", "4"):
        return sign, lambda z: np.abs(1 - np.abs(z) ** -2) * z.imag ** 2
    return sign, lambda z: z.imag ** 2


def fit_sector_constant(geometry: PhaseGeometry, label: str, n: int = 200, seed: int = 0,
                        aperture: float = 0.2) -> float:
    """Largest c with sign*Re(2i theta) >= c*weight on the sampled points"""
    rng = np.random.default_rng(seed)
    z = sample_sector(geometry, label, n, rng, aperture)
    sign, weight = sector_bound(label, geometry.region)
    ratio = sign * re_2it_theta(z, geometry.xi, 1.0) / weight(z)
    return float(np.min(ratio))
