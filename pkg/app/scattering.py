"""
Forward scattering for initial data with nonzero boundary values.

Lax pair x-part X = ik sigma3 + Q, Q = [[0, q], [r, 0]] with r(x) = sigma q(-x).
The modified Jost solutions mu = Phi exp(-i lambda x sigma3) satisfy

    mu' = X mu - i lambda mu sigma3,    mu -> E(z) = [[1, iq/z], [iq/z, 1]]

at the respective end of the line, and Phi_+ = Phi_- S defines the
scattering matrix S through Wronskians divided by det E = 1 + z^-2.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.interpolate import CubicSpline

from app.config import RunConfig, settings
from app.contour import NodeSet, SampledFunction
from app.exceptions import (
    DomainError,
    IntegrationError,
    SpectralSingularityError,
    SpectrumCountError,
)

logger = logging.getLogger(__name__)

SINGULARITY_TOL = 1e-10
SPECIAL_POINT_RADIUS = 1e-3


@dataclass
class InitialDatum:
    """Tabulated real q0(x) with constant tails q- (x < x[0]) and q+ (x > x[-1])"""
    x: np.ndarray
    q: np.ndarray
    sigma: int
    q_minus: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.sigma not in (1, -1):
            raise DomainError(f"sigma must be +1 or -1, got {self.sigma}")
        if abs(abs(self.q_minus) - 1) > 1e-12:
            raise DomainError(f"|q_minus| must be 1, got {self.q_minus}")
        if self.x.ndim != 1 or self.x.size != self.q.size or self.x.size < 4:
            raise DomainError("x and q must be matching one-dimensional samples")
        if np.any(np.diff(self.x) <= 0):
            raise DomainError("x samples must be strictly increasing")
        self._spline = CubicSpline(self.x, self.q)
        edge = max(abs(self.q[0] - self.q_minus), abs(self.q[-1] - self.q_plus))
        if edge > 1e-6:
            logger.warning(f"Datum differs from its tails by {edge:.2e} at the window edge")

    @property
    def delta(self) -> int:
        """q+ = delta q- with sigma delta = -1"""
        return -self.sigma

    @property
    def q_plus(self) -> float:
        return self.delta * self.q_minus

    @property
    def half_width(self) -> float:
        return float(max(abs(self.x[0]), abs(self.x[-1])))

    @classmethod
    def from_function(cls, func: Callable, x: np.ndarray, sigma: int, q_minus: float) -> "InitialDatum":
        x = np.asarray(x, dtype=float)
        return cls(x=x, q=np.real(func(x)), sigma=sigma, q_minus=q_minus)

    def background(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, self.q_minus, self.q_plus)

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        inside = self._spline(np.clip(x, self.x[0], self.x[-1]))
        return np.where(x < self.x[0], self.q_minus, np.where(x > self.x[-1], self.q_plus, inside))

    def mirrored(self, x):
        """r(x) = sigma q(-x)"""
        return self.sigma * self.potential(-np.asarray(x, dtype=float))

    def tail_weight(self) -> float:
        """discrete L^{1,2} norm of q0 - q+-"""
        bracket = 1 + self.x ** 2
        return float(trapezoid(np.abs(self.q - self.background(self.x)) * bracket, self.x))


def background_matrix(q_inf: float, z) -> np.ndarray:
    """E(z) for boundary value q_inf, shape (2, 2) + z.shape"""
    z = np.asarray(z, dtype=complex)
    off = 1j * q_inf / z
    one = np.ones_like(z)
    return np.array([[one, off], [off, one]])


def _uniformize(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("the spectral parameter must be nonzero", z=0j)
    return (z - 1 / z) / 2, (z + 1 / z) / 2


def _integrate_column(datum: InitialDatum, z: np.ndarray, column: int, start: float, stop: float,
                      t_eval: Optional[np.ndarray], config: RunConfig) -> np.ndarray:
    """
    Integrate column `column` (0 or 1) of the modified Jost matrix started
    from the background column at x = start. Returns shape (nt, 2, nz).
    """
    k, lam = _uniformize(z)
    s = 1.0 if column == 0 else -1.0
    a = 1j * (k - s * lam)
    d = -1j * (k + s * lam)
    q_inf = datum.q_minus if start < stop else datum.q_plus
    y0 = background_matrix(q_inf, z)[:, column, :].ravel()
    nz = z.size

    def rhs(x, y):
        c1, c2 = y[:nz], y[nz:]
        q = datum.potential(x)
        r = datum.mirrored(x)
        return np.concatenate([a * c1 + q * c2, r * c1 + d * c2])

    sol = solve_ivp(rhs, (start, stop), y0, method=config.ode_method, t_eval=t_eval,
                    rtol=config.ode_rtol, atol=config.ode_atol)
    if not sol.success:
        raise IntegrationError(f"Jost integration failed: {sol.message}", z=complex(z.flat[0]),
                               status=sol.status, nfev=sol.nfev)
    values = sol.y.T if t_eval is not None else sol.y[:, -1:].T
    return values.reshape(-1, 2, nz)


@dataclass
class JostPair:
    x: np.ndarray
    z: complex
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    E_plus: np.ndarray
    E_minus: np.ndarray

    def determinants(self) -> Tuple[np.ndarray, np.ndarray]:
        det = lambda m: m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        return det(self.mu_plus), det(self.mu_minus)

    def det_deviation(self) -> float:
        target = 1 + self.z ** -2
        plus, minus = self.determinants()
        return float(max(np.max(np.abs(plus - target)), np.max(np.abs(minus - target))))

    def phi(self, which: str) -> np.ndarray:
        """Phi = mu exp(i lambda x sigma3) on the grid"""
        lam = (self.z + 1 / self.z) / 2
        mu = self.mu_plus if which == "plus" else self.mu_minus
        phase = np.exp(1j * lam * self.x)
        out = mu.copy()
        out[:, :, 0] *= phase[:, None]
        out[:, :, 1] /= phase[:, None]
        return out


def jost_solve(datum: InitialDatum, z: complex, config: RunConfig = settings,
               x: Optional[np.ndarray] = None) -> JostPair:
    """Both modified Jost matrices on the grid x (default: the datum grid)"""
    z = complex(z)
    for special in (1j, -1j):
        if abs(z - special) < SPECIAL_POINT_RADIUS:
            logger.warning(f"z={z} is within {SPECIAL_POINT_RADIUS} of {special}; det E is nearly singular")
    grid = datum.x if x is None else np.asarray(x, dtype=float)
    L = max(datum.half_width, abs(grid[0]), abs(grid[-1]))
    za = np.array([z])
    minus_cols = [_integrate_column(datum, za, j, -L, grid[-1], grid, config)[:, :, 0] for j in (0, 1)]
    plus_cols = [_integrate_column(datum, za, j, L, grid[0], grid[::-1], config)[::-1, :, 0] for j in (0, 1)]
    mu_minus = np.stack(minus_cols, axis=2)
    mu_plus = np.stack(plus_cols, axis=2)
    return JostPair(
        x=grid, z=z, mu_plus=mu_plus, mu_minus=mu_minus,
        E_plus=background_matrix(datum.q_plus, z), E_minus=background_matrix(datum.q_minus, z),
    )


def _wronskian(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[0] * b[1] - a[1] * b[0]


def scattering_matrix(datum: InitialDatum, z: Sequence[complex], config: RunConfig = settings) -> np.ndarray:
    """S(z) for an array of z on Sigma, shape (nz, 2, 2); one vectorised solve per column"""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    L = datum.half_width
    minus = [_integrate_column(datum, z, j, -L, 0.0, None, config)[0] for j in (0, 1)]
    plus = [_integrate_column(datum, z, j, L, 0.0, None, config)[0] for j in (0, 1)]
    det_e = 1 + z ** -2
    s11 = _wronskian(plus[0], minus[1]) / det_e
    s12 = _wronskian(plus[1], minus[1]) / det_e
    s21 = _wronskian(minus[0], plus[0]) / det_e
    s22 = _wronskian(minus[0], plus[1]) / det_e
    return np.stack([np.stack([s11, s12], axis=-1), np.stack([s21, s22], axis=-1)], axis=-2)


@dataclass(frozen=True)
class ResidueForm:
    """s11 ~ s_pm / (z -+ i) near z = +-i"""
    point: complex
    s_pm: complex


def residue_constant(datum: InitialDatum, point: complex, config: RunConfig = settings) -> ResidueForm:
    z = np.array([point], dtype=complex)
    L = datum.half_width
    plus1 = _integrate_column(datum, z, 0, L, 0.0, None, config)[0]
    minus2 = _integrate_column(datum, z, 1, -L, 0.0, None, config)[0]
    # d/dz (1 + z^-2) at z = +-i
    slope = -2 * point ** -3
    return ResidueForm(point=point, s_pm=complex(_wronskian(plus1, minus2)[0] / slope))


def scattering_coefficients(datum: InitialDatum, z: complex,
                            config: RunConfig = settings) -> Union[Tuple[complex, ...], ResidueForm]:
    """(s11, s12, s21, s22) at z, or the residue form when z is at +-i"""
    z = complex(z)
    for special in (1j, -1j):
        if abs(z - special) < SPECIAL_POINT_RADIUS:
            return residue_constant(datum, special, config)
    S = scattering_matrix(datum, [z], config)[0]
    return complex(S[0, 0]), complex(S[0, 1]), complex(S[1, 0]), complex(S[1, 1])


def reflection(datum: InitialDatum, z: complex, config: RunConfig = settings) -> Tuple[complex, complex]:
    """(rho, rho_tilde) = (s21/s11, s12/s22)"""
    z = complex(z)
    for special in (1j, -1j):
        if abs(z - special) < SPECIAL_POINT_RADIUS:
            form = residue_constant(datum, special, config)
            if abs(form.s_pm) > SINGULARITY_TOL:
                sign = 1 if special == 1j else -1
                return complex(sign * datum.sigma), complex(sign * datum.sigma)
            # reflectionless at +-i: continuous limit along the circle
            angle = np.angle(special)
            near = np.exp(1j * (angle + np.array([-1, 1]) * 2 * SPECIAL_POINT_RADIUS))
            S = scattering_matrix(datum, near, config)
            rho = np.mean(S[:, 1, 0] / S[:, 0, 0])
            rho_tilde = np.mean(S[:, 0, 1] / S[:, 1, 1])
            return complex(rho), complex(rho_tilde)
    s11, s12, s21, s22 = scattering_coefficients(datum, z, config)
    if abs(s11) < SINGULARITY_TOL or abs(s22) < SINGULARITY_TOL:
        raise SpectralSingularityError("s11 vanishes on the continuous spectrum", z=z, s11=s11)
    return s21 / s11, s12 / s22


# Discrete spectrum

def s11_analytic(datum: InitialDatum, z, config: RunConfig = settings) -> np.ndarray:
    """s11 on D+ from the columns mu_{+,1} and mu_{-,2}, integrated in their stable directions"""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    L = datum.half_width
    plus1 = _integrate_column(datum, z, 0, L, 0.0, None, config)[0]
    minus2 = _integrate_column(datum, z, 1, -L, 0.0, None, config)[0]
    return _wronskian(plus1, minus2) / (1 + z ** -2)


@dataclass(frozen=True)
class DiscreteEigenvalue:
    eta: complex
    norming: complex
    proportionality: complex = 1 + 0j

    @property
    def image(self) -> complex:
        return -1 / self.eta

    @property
    def image_norming(self) -> complex:
        """A[eta_hat] = eta_hat^2 A[eta]"""
        return self.image ** 2 * self.norming


@dataclass(frozen=True)
class SearchRegion:
    r0: float
    r1: float
    phi0: float
    phi1: float

    def boundary(self, n: int) -> np.ndarray:
        """positively oriented boundary of the polar rectangle"""
        t = np.linspace(0, 1, n, endpoint=False)
        phis = self.phi0 + (self.phi1 - self.phi0) * t
        radii = self.r0 + (self.r1 - self.r0) * (t + 1 / n)
        return np.concatenate([
            self.r1 * np.exp(1j * phis),
            radii[::-1] * np.exp(1j * self.phi1),
            self.r0 * np.exp(1j * (self.phi1 - (self.phi1 - self.phi0) * t)),
            radii * np.exp(1j * self.phi0),
        ])

    def grid(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        radii = np.linspace(self.r0, self.r1, n + 2)[1:-1]
        phis = np.linspace(self.phi0, self.phi1, n + 2)[1:-1]
        rr, pp = np.meshgrid(radii, phis, indexing="ij")
        return rr, pp

    def contains(self, z: complex) -> bool:
        r, phi = abs(z), np.angle(z)
        return self.r0 < r < self.r1 and self.phi0 < phi < self.phi1


def search_regions(config: RunConfig = settings) -> Tuple[SearchRegion, SearchRegion]:
    """upper-outer and lower-inner parts of D+ kept off Sigma by the margin"""
    R, m = config.search_radius, config.search_margin
    return (
        SearchRegion(1 + m, R, m, np.pi - m),
        SearchRegion(1 / R, 1 / (1 + m), -np.pi + m, -m),
    )


def argument_count(values: np.ndarray) -> int:
    phase = np.unwrap(np.angle(np.append(values, values[0])))
    return int(round((phase[-1] - phase[0]) / (2 * np.pi)))


def _derivative(datum: InitialDatum, z: complex, config: RunConfig, radius: float = 1e-3, m: int = 8):
    """s11 and s11' at z from samples on a small circle (trapezoidal Cauchy formula)"""
    w = np.exp(2j * np.pi * np.arange(m) / m)
    values = s11_analytic(datum, np.append(z + radius * w, z), config)
    slope = np.mean(values[:m] / w) / radius
    return complex(values[-1]), complex(slope)


def _newton(datum: InitialDatum, z: complex, config: RunConfig, max_iter: int = 50) -> Tuple[complex, complex]:
    for _ in range(max_iter):
        value, slope = _derivative(datum, z, config)
        if abs(slope) < 1e-8:
            raise SpectrumCountError("near-multiple zero of s11", z=z, slope=abs(slope))
        step = value / slope
        z = z - step
        if abs(step) < config.root_tol:
            break
    value, slope = _derivative(datum, z, config)
    return z, slope


def _local_minima(values: np.ndarray) -> List[Tuple[int, int]]:
    padded = np.pad(values, 1, mode="constant", constant_values=np.inf)
    hits = []
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            block = padded[i:i + 3, j:j + 3]
            if values[i, j] <= block.min():
                hits.append((i, j))
    return hits


def norming_constant(datum: InitialDatum, eta: complex, config: RunConfig = settings) -> complex:
    """b with Phi_{+,1}(eta) = b Phi_{-,2}(eta), least squares over the norming window"""
    w = config.norming_window
    xs = np.linspace(-w, w, 41)
    L = datum.half_width
    z = np.array([eta])
    plus1 = _integrate_column(datum, z, 0, L, -w, xs[::-1], config)[::-1, :, 0]
    minus2 = _integrate_column(datum, z, 1, -L, w, xs, config)[:, :, 0]
    lam = (eta + 1 / eta) / 2
    phi_plus = plus1 * np.exp(1j * lam * xs)[:, None]
    phi_minus = minus2 * np.exp(-1j * lam * xs)[:, None]
    return complex(np.vdot(phi_minus, phi_plus) / np.vdot(phi_minus, phi_minus))


def find_discrete_spectrum(datum: InitialDatum, config: RunConfig = settings) -> List[DiscreteEigenvalue]:
    """
    Zeros of s11 in D+: counted by the argument principle on each search
    region, located from grid minima of |s11| and polished by Newton.
    """
    found: List[DiscreteEigenvalue] = []
    for region in search_regions(config):
        count = argument_count(s11_analytic(datum, region.boundary(config.argument_nodes), config))
        if count == 0:
            continue
        rr, pp = region.grid(config.search_grid)
        values = np.abs(s11_analytic(datum, (rr * np.exp(1j * pp)).ravel(), config)).reshape(rr.shape)
        roots: List[Tuple[complex, complex]] = []
        for i, j in _local_minima(values):
            root, slope = _newton(datum, complex(rr[i, j] * np.exp(1j * pp[i, j])), config)
            if not region.contains(root):
                continue
            if all(abs(root - other) > 1e-6 for other, _ in roots):
                roots.append((root, slope))
        if len(roots) != count:
            raise SpectrumCountError(
                f"argument principle counts {count} zeros, Newton converged to {len(roots)}",
                expected=count, found=len(roots),
            )
        for root, slope in roots:
            b = norming_constant(datum, root, config)
            found.append(DiscreteEigenvalue(eta=root, norming=b / slope, proportionality=b))
    if datum.sigma == 1 and any(abs(ev.eta.real) < 1e-8 for ev in found):
        logger.warning("Imaginary eigenvalue found for sigma = +1")
    logger.info(f"Discrete spectrum: {len(found)} zeros of s11 in D+")
    return found


# Contour samples

@dataclass
class ScatteringData:
    sigma: int
    q_minus: float
    nodes: NodeSet
    rho_values: np.ndarray
    rho_tilde_values: np.ndarray
    discrete: List[DiscreteEigenvalue] = field(default_factory=list)
    s11_values: Optional[np.ndarray] = None
    s21_values: Optional[np.ndarray] = None

    def __post_init__(self):
        self.rho = SampledFunction(self.nodes, self.rho_values)
        self.rho_tilde = SampledFunction(self.nodes, self.rho_tilde_values)

    @property
    def reflectionless(self) -> bool:
        return bool(np.max(np.abs(self.rho_values)) < 1e-12 and np.max(np.abs(self.rho_tilde_values)) < 1e-12)

    @property
    def q_plus(self) -> float:
        return -self.sigma * self.q_minus

    def product(self, s: complex) -> complex:
        return self.rho(s) * self.rho_tilde(s)

    @classmethod
    def from_profile(cls, rho: Callable[[complex], complex], sigma: int, q_minus: float = 1.0,
                     discrete: Sequence[DiscreteEigenvalue] = (), config: RunConfig = settings) -> "ScatteringData":
        """Scattering data from an analytic reflection profile, rho_tilde(z) = rho(-1/z)"""
        nodes = NodeSet.build(config)
        points = nodes.all_points
        values = np.array([rho(s) for s in points], dtype=complex)
        tilde = np.array([rho(-1 / s) for s in points], dtype=complex)
        return cls(sigma=sigma, q_minus=q_minus, nodes=nodes, rho_values=values,
                   rho_tilde_values=tilde, discrete=list(discrete))

    @classmethod
    def reflectionless_data(cls, discrete: Sequence[DiscreteEigenvalue], sigma: int, q_minus: float = 1.0,
                            config: RunConfig = settings) -> "ScatteringData":
        return cls.from_profile(lambda s: 0j, sigma, q_minus, discrete, config)

    def to_dict(self) -> Dict:
        pairs = lambda arr: [[float(v.real), float(v.imag)] for v in np.asarray(arr)]
        return {
            "sigma": self.sigma,
            "q_minus": self.q_minus,
            "contour_cutoff": self.nodes.cutoff,
            "real_nodes": int(self.nodes.inner.size),
            "circle_nodes": int(self.nodes.angles.size // 4),
            "nodes": pairs(self.nodes.all_points),
            "rho": pairs(self.rho_values),
            "rho_tilde": pairs(self.rho_tilde_values),
            "discrete": [
                {"eta": pairs([ev.eta])[0], "norming": pairs([ev.norming])[0],
                 "proportionality": pairs([ev.proportionality])[0]}
                for ev in self.discrete
            ],
        }

    @classmethod
    def from_dict(cls, payload: Dict, config: RunConfig = settings) -> "ScatteringData":
        complexify = lambda rows: np.array([complex(a, b) for a, b in rows])
        config = config.with_overrides(
            contour_cutoff=payload["contour_cutoff"],
            real_nodes=payload["real_nodes"],
            circle_nodes=payload["circle_nodes"],
        )
        discrete = [
            DiscreteEigenvalue(eta=complex(*d["eta"]), norming=complex(*d["norming"]),
                               proportionality=complex(*d.get("proportionality", [1.0, 0.0])))
            for d in payload.get("discrete", [])
        ]
        return cls(sigma=int(payload["sigma"]), q_minus=float(payload["q_minus"]),
                   nodes=NodeSet.build(config), rho_values=complexify(payload["rho"]),
                   rho_tilde_values=complexify(payload["rho_tilde"]), discrete=discrete)


def sample_scattering(datum: InitialDatum, config: RunConfig = settings,
                      with_spectrum: bool = True) -> ScatteringData:
    """rho and rho_tilde at every contour node, plus the discrete spectrum"""
    nodes = NodeSet.build(config)
    S = scattering_matrix(datum, nodes.all_points, config)
    s11, s22 = S[:, 0, 0], S[:, 1, 1]
    worst = float(min(np.min(np.abs(s11)), np.min(np.abs(s22))))
    if worst < SINGULARITY_TOL:
        j = int(np.argmin(np.abs(s11)))
        raise SpectralSingularityError("s11 vanishes on the contour", z=complex(nodes.all_points[j]))
    logger.info(f"Sampled scattering data at {nodes.all_points.size} contour nodes")
    discrete = find_discrete_spectrum(datum, config) if with_spectrum else []
    return ScatteringData(
        sigma=datum.sigma, q_minus=datum.q_minus, nodes=nodes,
        rho_values=S[:, 1, 0] / s11, rho_tilde_values=S[:, 0, 1] / s22,
        discrete=discrete, s11_values=s11, s21_values=S[:, 1, 0],
    )
