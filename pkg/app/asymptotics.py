"""
Long-time expansion along rays x = xi t.

    xi < -6:  q = T(inf)^-2 [q^Lambda - i sum_i t^(-1/2 + Im nu_i) f_i] + O(t^R)
    xi > 6:   q = T(inf)^-2 q^Lambda + O(1/t)

with the sum over the phase points zeta_1, zeta_2, zeta_5, zeta_6.
"""
import cmath
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config import RunConfig, settings
from app.exceptions import DomainError, OutOfScopeRegionError
from app.scattering import ScatteringData
from app.soliton import SolitonField, SolitonSeed, decay_rate, msol_error_bound
from app.special import reciprocal_gamma
from app.spectral import PHASE_INDICES, Region, classify, stationary_points
from app.transforms import RhTransforms, partition

logger = logging.getLogger(__name__)

EXPONENT_TOL = 1e-12
SQRT_2PI = np.sqrt(2 * np.pi)


@dataclass(frozen=True)
class PhasePointData:
    index: int
    zeta: float
    nu: complex
    theta: float
    theta2: float
    Ti: complex
    rho: complex
    rho_tilde: complex

    def __post_init__(self):
        if abs(self.nu.imag) >= 0.5:
            raise DomainError(f"|Im nu| must stay below 1/2 at zeta_{self.index}", nu=self.nu)
        if abs(self.theta2) < 1e-8:
            raise DomainError(f"degenerate phase point zeta_{self.index}", theta2=self.theta2)


def pc_coefficients(pd: PhasePointData, t: float, hook: complex = 1 + 0j) -> Tuple[complex, complex, complex, complex]:
    """(beta12, beta21, beta12 t^-Im nu, beta21 t^Im nu) of the parabolic-cylinder model"""
    nu = pd.nu
    scale = 2 * t * abs(pd.theta2)
    oscillation = cmath.exp(2j * t * pd.theta)
    rho_z = pd.rho * pd.Ti ** -2 * oscillation * scale ** (1j * nu) * hook
    rho_tilde_z = pd.rho_tilde * pd.Ti ** 2 / oscillation * scale ** (-1j * nu) / hook
    if abs(nu) < 1e-14 or rho_z == 0 or rho_tilde_z == 0:
        return 0j, 0j, 0j, 0j
    damping = cmath.exp(-np.pi * nu / 2)
    b12 = -SQRT_2PI * cmath.exp(0.25j * np.pi) * damping * reciprocal_gamma(-1j * nu) / rho_z
    b21 = SQRT_2PI * cmath.exp(-0.25j * np.pi) * damping * reciprocal_gamma(1j * nu) / rho_tilde_z
    return b12, b21, b12 * t ** (-nu.imag), b21 * t ** nu.imag


def f_terms(m: np.ndarray, pd: PhasePointData, t: float, hook: complex = 1 + 0j) -> complex:
    """second-order coefficient f_i from m^Lambda(zeta_i)"""
    _, _, bt12, bt21 = pc_coefficients(pd, t, hook)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-12:
        raise DomainError(f"m is nearly singular at zeta_{pd.index}", det=complex(det))
    return (m[0, 0] ** 2 * bt12 - m[0, 1] ** 2 * bt21) / (2 * cmath.sqrt(pd.theta2) * det)


@dataclass
class ExponentReport:
    value: Optional[float]
    branch: Optional[int]
    boundary: bool = False
    note: str = ""


def error_exponent(im_nu: Sequence[float]) -> ExponentReport:
    """Exponent of the remainder from a = max Im nu, b = min Im nu, c = max |Im nu|"""
    values = [float(v) for v in im_nu]
    a, b, c = max(values), min(values), max(abs(v) for v in values)
    eq = lambda u, v: abs(u - v) < EXPONENT_TOL
    if all(abs(v) < EXPONENT_TOL for v in values):
        return ExponentReport(-0.75, 3, boundary=True, note="all Im nu vanish")
    if (0 < b <= a and eq(a, c) and c < 0.5) or (-1 / 6 < 2 * a - 0.5 < b < 0 < a and eq(a, c) and c < 0.5):
        return ExponentReport(-1 + a + c, 1)
    if (a / 2 - 0.25 < b < 0 < a and eq(a, c) and c <= 1 / 6) or \
            (a / 2 - 0.25 < b < 0 < a < c and eq(c, -b) and c < 0.5):
        return ExponentReport(-0.75 + a / 2, 2)
    if -0.25 < b <= a < 0 < c and eq(c, -b) and c < 0.5:
        return ExponentReport(-0.75, 3)
    return ExponentReport(None, None, note="outside tabulated branches")


@dataclass
class AsymptoticExpansion:
    t: float
    x: float
    region: Region
    leading: complex
    second: complex
    value: complex
    envelope: float
    exponent: float
    terms: Dict[int, complex] = field(default_factory=dict)


class AsymptoticPipeline:
    """Everything along one ray that does not depend on t"""

    def __init__(self, data: ScatteringData, xi: float, config: RunConfig = settings,
                 delta0: Optional[float] = None):
        region = classify(xi)
        if region in (Region.II, Region.BOUNDARY) or min(abs(xi - 6), abs(xi + 6)) < config.boundary_margin:
            raise OutOfScopeRegionError(f"xi={xi} is outside the regions xi < -6 and xi > 6")
        self.xi = xi
        self.config = config
        self.data = data
        self.geometry = stationary_points(xi)
        self.partition = partition(data.discrete, xi, config, delta0)
        self.transforms = RhTransforms(data, self.geometry, self.partition, config)
        self.seed = SolitonSeed.dressed(data, self.transforms, self.partition)
        self.field = SolitonField(self.seed)
        self.T_inf = self.transforms.T_inf
        self.hook = cmath.exp(1j * config.phase_hook)
        self.phase_points: List[PhasePointData] = []
        if self.geometry.region is Region.I:
            self.phase_points = [self._phase_point(i) for i in PHASE_INDICES]
            self.report = error_exponent(self.im_nu())
            self.exponent = self.report.value if self.report.value is not None else -0.75
        else:
            self.report = ExponentReport(-1.0, None, note="xi > 6")
            self.exponent = -1.0
        logger.info(f"Asymptotic pipeline at xi={xi}: |Lambda|={len(self.partition.Lambda)}, "
                     f"exponent {self.exponent:.4f}")

    def _phase_point(self, index: int) -> PhasePointData:
        zeta = self.geometry.point(index).real
        theta2 = self.geometry.theta2(index)
        return PhasePointData(
            index=index, zeta=zeta, nu=self.transforms.nu(zeta), theta=self.geometry.theta(zeta).real,
            theta2=theta2.real, Ti=self.transforms.Ti_boundary(index),
            rho=self.data.rho(zeta), rho_tilde=self.data.rho_tilde(zeta),
        )

    def im_nu(self) -> List[float]:
        """Im nu at zeta_1 .. zeta_6"""
        return [self.transforms.nu(self.geometry.point(i).real).imag for i in range(1, 7)]

    def second_terms(self, t: float) -> Dict[int, complex]:
        """t^(-1/2 + Im nu_i) f_i per phase point"""
        x = self.xi * t
        terms = {}
        for pd in self.phase_points:
            m = self.field.m(x, t, pd.zeta)
            terms[pd.index] = t ** (-0.5 + pd.nu.imag) * f_terms(m, pd, t, self.hook)
        return terms

    def second_term_bounds(self, t: float) -> Dict[int, float]:
        """
        t^(-1/2 + Im nu_i) (|m11^2 bt12| + |m12^2 bt21|) / |2 sqrt(theta'') det m|, the
        modulus of each term with its oscillating relative phase removed
        """
        x = self.xi * t
        bounds = {}
        for pd in self.phase_points:
            m = self.field.m(x, t, pd.zeta)
            _, _, bt12, bt21 = pc_coefficients(pd, t, self.hook)
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            size = (abs(m[0, 0] ** 2 * bt12) + abs(m[0, 1] ** 2 * bt21)) / abs(2 * cmath.sqrt(pd.theta2) * det)
            bounds[pd.index] = t ** (-0.5 + pd.nu.imag) * size
        return bounds

    def expand(self, t: float) -> AsymptoticExpansion:
        if t <= 0:
            raise DomainError("t must be positive")
        x = self.xi * t
        q_lambda = complex(self.field.q([x], t)[0])
        terms = self.second_terms(t) if self.phase_points else {}
        second = sum(terms.values(), 0j)
        value = self.T_inf ** -2 * (q_lambda - 1j * second)
        return AsymptoticExpansion(
            t=t, x=x, region=self.geometry.region, leading=self.T_inf ** -2 * q_lambda, second=second,
            value=value, envelope=float(t ** self.exponent), exponent=self.exponent, terms=terms,
        )

    def soliton_envelope(self, t: float) -> float:
        return msol_error_bound(t, decay_rate(self.partition))


def q_asymptotic(x: float, t: float, pipeline: AsymptoticPipeline) -> Tuple[complex, float]:
    if abs(x / t - pipeline.xi) > 1e-9 * max(1.0, abs(pipeline.xi)):
        raise DomainError(f"x/t={x / t} does not match the pipeline ray xi={pipeline.xi}")
    expansion = pipeline.expand(t)
    return expansion.value, expansion.envelope
