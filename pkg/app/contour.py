"""
Oriented contours in the z-plane, node sets on them, interpolation of
sampled functions and Cauchy-type quadrature.

Every piece is oriented with D+ = {(|z| - 1) Im z > 0} on its left:
real pieces with |s| > 1 run left to right, real pieces with |s| < 1 right
to left, and arcs of the unit circle run from -1 to 1.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import BarycentricInterpolator, CubicSpline

from app.config import RunConfig, settings
from app.exceptions import QuadratureError
from app.spectral import PhaseGeometry, Region

logger = logging.getLogger(__name__)

NEAR_DISTANCE = 0.25
WINDOW = 0.25


@dataclass(frozen=True)
class Piece:
    """
    A smooth oriented piece parametrised by tau running from tau_a to tau_b.

    kind "line":     s = tau
    kind "inverted": s = 1/tau (used for the half-lines reaching infinity)
    kind "arc":      s = exp(i tau)
    """
    kind: str
    tau_a: float
    tau_b: float

    def point(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "line":
            return tau + 0j
        if self.kind == "inverted":
            return 1 / tau + 0j
        return np.exp(1j * tau)

    def kernel(self, tau, z: complex):
        """s'(tau) / (s(tau) - z) written without overflow near s = infinity"""
        tau = np.asarray(tau, dtype=float)
        if self.kind == "line":
            return 1 / (tau - z)
        if self.kind == "inverted":
            return -1 / (tau * (1 - tau * z))
        e = np.exp(1j * tau)
        return 1j * e / (e - z)

    def speed(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "line":
            return np.ones_like(tau) + 0j
        if self.kind == "inverted":
            return -1 / tau ** 2 + 0j
        return 1j * np.exp(1j * tau)

    def interior(self, n: int) -> np.ndarray:
        lo, hi = sorted((self.tau_a, self.tau_b))
        span = hi - lo
        return np.linspace(lo + 1e-6 * span, hi - 1e-6 * span, n)

    def nearest(self, z: complex) -> Tuple[float, float]:
        taus = self.interior(2049)
        dist = np.abs(self.point(taus) - z)
        j = int(np.argmin(dist))
        return float(taus[j]), float(dist[j])

    def left_normal(self, tau: float) -> complex:
        sign = 1.0 if self.tau_b > self.tau_a else -1.0
        tangent = sign * complex(self.speed(tau))
        return 1j * tangent / abs(tangent)


@dataclass(frozen=True)
class Contour:
    name: str
    pieces: Tuple[Piece, ...]

    def nearest(self, z: complex) -> Tuple[Piece, float, float]:
        best = None
        for piece in self.pieces:
            tau, dist = piece.nearest(z)
            if best is None or dist < best[2]:
                best = (piece, tau, dist)
        return best

    def side_points(self, s0: complex, eps: float) -> Tuple[complex, complex]:
        """(z_plus, z_minus): points at distance eps on the D+ and D- sides of s0"""
        piece, tau, _ = self.nearest(s0)
        normal = piece.left_normal(tau)
        return s0 + eps * normal, s0 - eps * normal


def gamma_contour(geometry: PhaseGeometry) -> Contour:
    """(-inf, z6) + (z2, 0) + (0, z1) + (z5, inf) for xi < -6"""
    if geometry.region is not Region.I:
        raise QuadratureError(f"the real contour is defined for xi < -6, got xi={geometry.xi}")
    z1 = geometry.point(1).real
    z5 = geometry.point(5).real
    pieces = (
        Piece("inverted", 0.0, -1 / z5),
        Piece("line", 0.0, -z1),
        Piece("line", z1, 0.0),
        Piece("inverted", 1 / z5, 0.0),
    )
    return Contour("gamma", pieces)


def sigma_contour() -> Contour:
    """The real line and the unit circle, split at +-1, 0 and +-i"""
    pieces = (
        Piece("inverted", 0.0, -1.0),
        Piece("line", 0.0, -1.0),
        Piece("line", 1.0, 0.0),
        Piece("inverted", 1.0, 0.0),
        Piece("arc", np.pi, np.pi / 2),
        Piece("arc", np.pi / 2, 0.0),
        Piece("arc", np.pi, 1.5 * np.pi),
        Piece("arc", 1.5 * np.pi, 2 * np.pi),
    )
    return Contour("sigma", pieces)


class ContourQuadrature:
    """Adaptive Gauss-Kronrod integration over contour pieces"""

    def __init__(self, config: RunConfig = settings):
        self.tol = config.quad_tol
        self.limit = config.quad_limit

    def _real_quad(self, func, a: float, b: float, points=None) -> Tuple[float, float]:
        value, err = quad(func, a, b, epsabs=self.tol, epsrel=self.tol,
                          limit=self.limit, points=points)
        return value, err

    def integrate_piece(self, piece: Piece, integrand: Callable, a: Optional[float] = None,
                        b: Optional[float] = None, points: Optional[Sequence[float]] = None) -> complex:
        """Integrate a complex function of tau over [a, b] (default: the whole piece)"""
        a = piece.tau_a if a is None else a
        b = piece.tau_b if b is None else b
        if a == b:
            return 0j
        lo, hi = min(a, b), max(a, b)
        inner = [p for p in (points or ()) if lo < p < hi] or None
        if inner and a > b:
            return -self.integrate_piece(piece, integrand, b, a, inner)
        re, err_re = self._real_quad(lambda u: complex(integrand(u)).real, a, b, inner)
        im, err_im = self._real_quad(lambda u: complex(integrand(u)).imag, a, b, inner)
        if not np.isfinite(re) or not np.isfinite(im):
            raise QuadratureError("non-finite contour integral", piece=piece.kind,
                                  tau_a=a, tau_b=b)
        if max(err_re, err_im) > 1e3 * self.tol * max(1.0, abs(re) + abs(im)):
            logger.warning(f"Quadrature error estimate {max(err_re, err_im):.2e} on {piece.kind} piece")
        return complex(re, im)

    def integral(self, g: Callable, contour: Contour, weight: Optional[Callable] = None) -> complex:
        """sum over pieces of the integral of g(s) * weight(tau) dtau, weight defaults to ds/dtau"""
        total = 0j
        for piece in contour.pieces:
            w = weight or piece.speed
            total += self.integrate_piece(
                piece, lambda tau, p=piece, w=w: g(complex(p.point(tau))) * complex(w(tau))
            )
        return total

    def moment(self, g: Callable, contour: Contour) -> complex:
        """integral of g(s)/s ds"""
        total = 0j
        for piece in contour.pieces:
            total += self.integrate_piece(
                piece, lambda tau, p=piece: g(complex(p.point(tau))) * complex(p.kernel(tau, 0j))
            )
        return total

    def cauchy(self, g: Callable, contour: Contour, z: complex) -> complex:
        """
        integral of g(s)/(s - z) ds. When z is close to a piece the constant
        g(s0) at the nearest point is subtracted on a window around s0 and
        added back through the exact logarithm.
        """
        z = complex(z)
        total = 0j
        for piece in contour.pieces:
            tau0, dist = piece.nearest(z)
            if dist < 1e-14:
                raise QuadratureError("Cauchy integral evaluated on the contour", z=z, distance=dist)
            if dist >= NEAR_DISTANCE:
                total += self.integrate_piece(
                    piece, lambda tau, p=piece: g(complex(p.point(tau))) * complex(p.kernel(tau, z))
                )
                continue
            total += self._subtracted(g, piece, z, tau0)
        return total

    def _subtracted(self, g: Callable, piece: Piece, z: complex, tau0: float) -> complex:
        a, b = piece.tau_a, piece.tau_b
        lo, hi = min(a, b), max(a, b)
        w_lo, w_hi = max(lo, tau0 - WINDOW), min(hi, tau0 + WINDOW)
        s0 = complex(piece.point(tau0))
        g0 = g(s0)

        def plain(tau):
            return g(complex(piece.point(tau))) * complex(piece.kernel(tau, z))

        def reduced(tau):
            return (g(complex(piece.point(tau))) - g0) * complex(piece.kernel(tau, z))

        forward = b > a
        outer = 0j
        if w_lo > lo:
            outer += self.integrate_piece(piece, plain, lo, w_lo)
        if w_hi < hi:
            outer += self.integrate_piece(piece, plain, w_hi, hi)
        window = self.integrate_piece(piece, reduced, w_lo, w_hi, points=[tau0])
        window += g0 * _log_increment(piece, z, w_lo, w_hi)
        return (outer + window) if forward else -(outer + window)


def _log_increment(piece: Piece, z: complex, tau_lo: float, tau_hi: float) -> complex:
    """integral of ds/(s - z) along the piece from tau_lo to tau_hi, branch followed continuously"""
    taus = np.linspace(tau_lo, tau_hi, 257)
    if piece.kind == "inverted":
        taus = taus[taus != 0]
    diffs = piece.point(taus) - z
    angle = np.unwrap(np.angle(diffs))
    return complex(np.log(np.abs(diffs[-1]) / np.abs(diffs[0])), angle[-1] - angle[0])


# Node sets and interpolation of sampled functions on the real line and the circle

def chebyshev_nodes(n: int, a: float, b: float) -> np.ndarray:
    """Chebyshev points of the first kind on (a, b), increasing"""
    j = np.arange(n)
    x = -np.cos((2 * j + 1) * np.pi / (2 * n))
    return (a + b) / 2 + (b - a) / 2 * x


@dataclass(frozen=True)
class NodeSet:
    """
    inner: Chebyshev nodes on (1/L, 1); the outer half-lines use their
    reciprocals and the negative half-lines their negatives. circle: angles
    offset by half a step so that +-i are never nodes.
    """
    inner: np.ndarray
    angles: np.ndarray
    cutoff: float

    @classmethod
    def build(cls, config: RunConfig = settings) -> "NodeSet":
        cutoff = config.contour_cutoff
        inner = chebyshev_nodes(config.real_nodes, 1 / cutoff, 1.0)
        m = 4 * config.circle_nodes
        angles = (np.arange(m) + 0.5) * 2 * np.pi / m
        return cls(inner=inner, angles=angles, cutoff=cutoff)

    @property
    def real_points(self) -> np.ndarray:
        return np.concatenate([self.inner, -self.inner, 1 / self.inner, -1 / self.inner]) + 0j

    @property
    def circle_points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    @property
    def all_points(self) -> np.ndarray:
        return np.concatenate([self.real_points, self.circle_points])


class SampledFunction:
    """
    Interpolant of a function known at the nodes of a NodeSet. Real
    segments use barycentric interpolation (the outer ones in the variable
    1/s), the circle a periodic cubic spline in the angle. Beyond the
    truncation the function continues as c s^2 near 0 and c s^-2 near infinity.
    """

    def __init__(self, nodes: NodeSet, values: np.ndarray):
        values = np.asarray(values, dtype=complex)
        n = nodes.inner.size
        self.nodes = nodes
        self.values = values
        self._inner_pos = BarycentricInterpolator(nodes.inner, values[:n])
        self._inner_neg = BarycentricInterpolator(nodes.inner, values[n:2 * n])
        self._outer_pos = BarycentricInterpolator(nodes.inner, values[2 * n:3 * n])
        self._outer_neg = BarycentricInterpolator(nodes.inner, values[3 * n:4 * n])
        circle = values[4 * n:]
        angles = np.append(nodes.angles, nodes.angles[0] + 2 * np.pi)
        self._circle = CubicSpline(angles, np.append(circle, circle[0]), bc_type="periodic")
        self._angle0 = nodes.angles[0]

    def _real(self, x: float) -> complex:
        L = self.nodes.cutoff
        r = abs(x)
        inner = self._inner_pos if x > 0 else self._inner_neg
        outer = self._outer_pos if x > 0 else self._outer_neg
        if r == 0:
            return 0j
        if r < 1 / L:
            return complex(inner(1 / L)) * (r * L) ** 2
        if r <= 1:
            return complex(inner(r))
        if r <= L:
            return complex(outer(1 / r))
        return complex(outer(1 / L)) * (L / r) ** 2

    def __call__(self, s) -> complex:
        s = complex(s)
        if abs(s.imag) < 1e-13:
            return self._real(s.real)
        angle = (np.angle(s) - self._angle0) % (2 * np.pi) + self._angle0
        return complex(self._circle(angle))


def contour_summary(contour: Contour) -> List[dict]:
    return [{"kind": p.kind, "tau_a": p.tau_a, "tau_b": p.tau_b} for p in contour.pieces]
