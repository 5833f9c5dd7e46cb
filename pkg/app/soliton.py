"""
Reflectionless Riemann-Hilbert solutions.

    m(z) = I + (i q_eff / z) sigma1 + sum_p Res_p / (z - p)

A LOWER pole p carries Res m = [c_p e^{-2it theta(p)} m_col2(p), 0],
an UPPER pole Res m = [0, c_p e^{2it theta(p)} m_col1(p)]. Evaluating the
ansatz at the poles closes a linear system for the column values; the
potential is q = -i lim z m_12.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.exceptions import DomainError, PoleHitError, SingularSystemError
from app.scattering import DiscreteEigenvalue, ScatteringData
from app.spectral import phase
from app.transforms import RhTransforms, SpectrumPartition

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
SHIFT = 1e-9


class PoleKind(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class Pole:
    point: complex
    constant: complex
    kind: PoleKind


def trace_derivative(etas: Sequence[complex], j: int) -> complex:
    """F'(eta_j) for F(z) = prod (z - eta_k)/(z + 1/eta_k)"""
    eta = etas[j]
    num = np.prod([eta - e for k, e in enumerate(etas) if k != j])
    den = np.prod([eta + 1 / e for e in etas])
    return complex(num / den)


@dataclass
class SolitonSeed:
    poles: List[Pole]
    sigma: int = -1
    q_minus: float = 1.0
    q_eff: float = 1.0
    scale: complex = 1 + 0j

    @classmethod
    def raw(cls, discrete: Sequence[DiscreteEigenvalue], sigma: int, q_minus: float = 1.0) -> "SolitonSeed":
        """eta LOWER with A[eta], eta_hat UPPER with A[eta_hat] = eta_hat^2 A[eta]"""
        poles = []
        for ev in discrete:
            poles.append(Pole(ev.eta, ev.norming, PoleKind.LOWER))
            poles.append(Pole(ev.image, ev.image_norming, PoleKind.UPPER))
        return cls(poles=poles, sigma=sigma, q_minus=q_minus, q_eff=q_minus)

    @classmethod
    def from_scattering(cls, data: ScatteringData) -> "SolitonSeed":
        return cls.raw(data.discrete, data.sigma, data.q_minus)

    @staticmethod
    def _reflectionless_spectrum(etas: Sequence[complex], signs: Sequence[float],
                                 sigma: int) -> List[DiscreteEigenvalue]:
        if sigma != -1:
            raise DomainError("reflectionless spectra exist only for sigma = -1")
        product = np.prod([-e * e for e in etas])
        if abs(product - 1) > 1e-10:
            raise DomainError(f"prod(-eta^2) must equal 1, got {product}")
        out = []
        for j, (eta, b) in enumerate(zip(etas, signs)):
            if not (abs(eta) - 1) * eta.imag > 0:
                raise DomainError(f"{eta} does not lie in D+")
            out.append(DiscreteEigenvalue(eta=eta, norming=b / trace_derivative(etas, j), proportionality=b))
        return out

    @classmethod
    def imaginary_pair(cls, omega: float, b: float = 1.0, q_minus: float = 1.0) -> "SolitonSeed":
        """zeros i omega and -i/omega (omega > 1) with b = (+b, -b), a regular one-soliton"""
        return cls.raw(imaginary_pair_spectrum(omega, b), sigma=-1, q_minus=q_minus)

    @classmethod
    def quartet(cls, z: complex, signs: Sequence[float] = (1.0, 1.0, -1.0, -1.0),
                q_minus: float = 1.0) -> "SolitonSeed":
        """zeros {z, -conj z, 1/z, -1/conj z} for z in the upper half plane outside the unit circle"""
        return cls.raw(quartet_spectrum(z, signs), sigma=-1, q_minus=q_minus)

    @classmethod
    def dressed(cls, data: ScatteringData, transforms: RhTransforms, parts: SpectrumPartition) -> "SolitonSeed":
        """Poles in Lambda only, with residues conjugated by T"""
        poles = []
        for k in parts.Lambda:
            ev = data.discrete[k]
            eta, image = ev.eta, ev.image
            if k in parts.Delta:
                poles.append(Pole(eta, 1 / ev.norming / transforms.inverse_T_derivative(eta) ** 2, PoleKind.UPPER))
                poles.append(Pole(image, 1 / ev.image_norming / transforms.T_derivative_at_zero(eta) ** 2,
                                  PoleKind.LOWER))
            else:
                poles.append(Pole(eta, ev.norming / transforms.T(eta) ** 2, PoleKind.LOWER))
                poles.append(Pole(image, ev.image_norming * transforms.T(image) ** 2, PoleKind.UPPER))
        return cls(poles=poles, sigma=data.sigma, q_minus=data.q_minus,
                   q_eff=data.q_minus * transforms.symmetry_sign, scale=transforms.T_inf)

    def to_dict(self) -> Dict:
        return {
            "sigma": self.sigma,
            "q_minus": self.q_minus,
            "q_eff": self.q_eff,
            "scale": [self.scale.real, self.scale.imag],
            "poles": [
                {"point": [p.point.real, p.point.imag], "constant": [p.constant.real, p.constant.imag],
                 "kind": p.kind.value}
                for p in self.poles
            ],
        }

    @classmethod
    def from_dict(cls, payload: Dict) -> "SolitonSeed":
        poles = [Pole(complex(*p["point"]), complex(*p["constant"]), PoleKind(p["kind"]))
                 for p in payload.get("poles", [])]
        q_minus = float(payload.get("q_minus", 1.0))
        return cls(poles=poles, sigma=int(payload.get("sigma", -1)), q_minus=q_minus,
                   q_eff=float(payload.get("q_eff", q_minus)), scale=complex(*payload.get("scale", [1.0, 0.0])))


def imaginary_pair_spectrum(omega: float, b: float = 1.0) -> List[DiscreteEigenvalue]:
    if omega <= 1:
        raise DomainError(f"omega must exceed 1, got {omega}")
    return SolitonSeed._reflectionless_spectrum([1j * omega, -1j / omega], [b, -b], sigma=-1)


def quartet_spectrum(z: complex, signs: Sequence[float] = (1.0, 1.0, -1.0, -1.0)) -> List[DiscreteEigenvalue]:
    z = complex(z)
    if z.imag <= 0 or abs(z) <= 1 or abs(z.real) < 1e-12:
        raise DomainError("the quartet generator must lie off the imaginary axis in the upper half plane outside |z| = 1")
    etas = [z, -z.conjugate(), 1 / z, -1 / z.conjugate()]
    return SolitonSeed._reflectionless_spectrum(etas, signs, sigma=-1)


@dataclass
class SolitonField:
    seed: SolitonSeed
    last_condition: float = field(default=1.0, init=False)

    def _factors(self, x: np.ndarray, t: float) -> np.ndarray:
        """c_p exp(-+2i t theta(p)) per pole, shape (nx, npoles)"""
        out = np.empty((x.size, len(self.seed.poles)), dtype=complex)
        for j, p in enumerate(self.seed.poles):
            sign = -1 if p.kind is PoleKind.LOWER else 1
            out[:, j] = p.constant * np.exp(sign * 2j * phase(x, t, p.point))
        return out

    def _system(self, x: np.ndarray, t: float):
        poles = self.seed.poles
        n = len(poles)
        c = self._factors(x, t)
        K = np.zeros((x.size, n, n), dtype=complex)
        rhs = np.zeros((x.size, n, 2), dtype=complex)
        for j, pj in enumerate(poles):
            lead = 1 if pj.kind is PoleKind.LOWER else 0
            rhs[:, j, lead] = 1.0
            rhs[:, j, 1 - lead] = 1j * self.seed.q_eff / pj.point
            for k, pk in enumerate(poles):
                if pk.kind is not pj.kind:
                    K[:, j, k] = c[:, k] / (pj.point - pk.point)
        return np.eye(n)[None] - K, rhs, c

    def solve(self, x, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """pole values w (nx, npoles, 2) and the time-dressed constants (nx, npoles)"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if not self.seed.poles:
            return np.zeros((x.size, 0, 2), dtype=complex), np.zeros((x.size, 0), dtype=complex)
        M, rhs, c = self._system(x, t)
        cond = np.linalg.cond(M)
        self.last_condition = float(np.max(cond))
        bad = ~np.isfinite(cond) | (cond > CONDITION_LIMIT)
        if np.any(bad):
            logger.warning(f"Singular soliton system at {int(bad.sum())} points; shifting x by {SHIFT}")
            M_s, rhs_s, c_s = self._system(x[bad] + SHIFT, t)
            cond_s = np.linalg.cond(M_s)
            if np.any(~np.isfinite(cond_s) | (cond_s > CONDITION_LIMIT)):
                raise SingularSystemError("soliton linear system is singular", condition=float(np.max(cond_s)),
                                          x=float(x[bad][0]), t=t)
            M[bad], rhs[bad], c[bad] = M_s, rhs_s, c_s
        return np.linalg.solve(M, rhs), c

    def q(self, x, t: float) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        w, c = self.solve(x, t)
        value = np.full(x.size, self.seed.q_eff, dtype=complex)
        for j, p in enumerate(self.seed.poles):
            if p.kind is PoleKind.UPPER:
                value -= 1j * c[:, j] * w[:, j, 0]
        return value

    def m(self, x: float, t: float, z: complex) -> np.ndarray:
        z = complex(z)
        if z == 0:
            raise DomainError("m is singular at z = 0")
        for p in self.seed.poles:
            if abs(z - p.point) < 1e-14:
                raise PoleHitError("m evaluated at a pole", z=z, pole=p.point)
        w, c = self.solve([x], t)
        off = 1j * self.seed.q_eff / z
        out = np.array([[1, off], [off, 1]], dtype=complex)
        for j, p in enumerate(self.seed.poles):
            column = 0 if p.kind is PoleKind.LOWER else 1
            out[:, column] += c[0, j] * w[0, j] / (z - p.point)
        return out


def solve_mLambda(seed: SolitonSeed, x: float, t: float, z: complex) -> np.ndarray:
    return SolitonField(seed).m(x, t, z)


def q_soliton(seed: SolitonSeed, x, t: float) -> np.ndarray:
    return SolitonField(seed).q(x, t)


def msol_error_bound(t: float, c: float) -> float:
    """exp(-c t) envelope of m^sol m^Lambda^-1 - I"""
    return float(np.exp(-c * t))


def decay_rate(parts: SpectrumPartition) -> float:
    """smallest |Re(2i theta)| among the poles left out of Lambda"""
    outside = [abs(v) for k, v in enumerate(parts.values) if k not in parts.Lambda]
    return min(outside) if outside else parts.delta0


def circle_jump_norm(data: ScatteringData, transforms: RhTransforms, parts: SpectrumPartition,
                     xi: float, t: float, n: int = 32) -> float:
    """
    sup over the circles |z - p| = varrho around poles outside Lambda of the
    off-diagonal jump entry of the dressed problem.
    """
    x = xi * t
    radius = parts.varrho
    circle = np.exp(2j * np.pi * np.arange(n) / n)
    worst = 0.0
    for k, ev in enumerate(data.discrete):
        if k in parts.Lambda:
            continue
        for centre, constant, lower in ((ev.eta, ev.norming, True), (ev.image, ev.image_norming, False)):
            z = centre + radius * circle
            sign = -1 if lower else 1
            if k in parts.Delta:
                sign = -sign
            exponent = np.exp(sign * 2j * phase(x, t, z))
            worst = max(worst, float(np.max(np.abs(constant * exponent))) / radius)
    return worst


def one_soliton_excess(x, t: float, omega: float, b: float = 1.0) -> np.ndarray:
    """
    Closed form of the imaginary-pair soliton (sigma = -1, q- = 1):

        q = 1 + (b D kappa / 2) / (cosh(D (x - v t)) + b kappa / D)

    with D = omega - 1/omega, kappa = 2(omega^2 - 1)/(omega^2 + 1), v = 6 + D^2.
    Returns q - 1, which keeps the exponentially small tails exact.
    """
    D = omega - 1 / omega
    kappa = 2 * (omega ** 2 - 1) / (omega ** 2 + 1)
    v = 6 + D ** 2
    x = np.asarray(x, dtype=float)
    return (b * D * kappa / 2) / (np.cosh(D * (x - v * t)) + b * kappa / D)
