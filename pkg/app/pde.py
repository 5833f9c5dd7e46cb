"""
Independent checks against the equation

    q_t - 6 sigma q(x,t) q(-x,-t) q_x + q_xxx = 0.

residual() differentiates a candidate solution by central differences;
evolve() integrates the local system for u = q(x,t), v = q(-x,-t),

    u_t = 6 sigma u v u_x - u_xxx,    v_t = 6 sigma u v v_x - v_xxx,

after subtracting a smooth background ramp from both components.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.interpolate import RectBivariateSpline

from app.config import RunConfig, settings
from app.exceptions import BlowUpError, DomainError

logger = logging.getLogger(__name__)

BLOW_UP = 1e3
RAMP_WIDTH = 2.0


def residual(q: Callable, x, t: float, h: float, sigma: int) -> np.ndarray:
    """|q_t - 6 sigma q q(-x,-t) q_x + q_xxx| with second-order central differences in x and t"""
    x = np.asarray(x, dtype=float)
    q_t = (q(x, t + h) - q(x, t - h)) / (2 * h)
    q_x = (q(x + h, t) - q(x - h, t)) / (2 * h)
    q_xxx = (q(x + 2 * h, t) - 2 * q(x + h, t) + 2 * q(x - h, t) - q(x - 2 * h, t)) / (2 * h ** 3)
    return np.abs(q_t - 6 * sigma * q(x, t) * q(-x, -t) * q_x + q_xxx)


@dataclass
class GridField:
    x: np.ndarray
    values: np.ndarray
    q_minus: float
    q_plus: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        steps = np.diff(self.x)
        if steps.size < 7 or np.ptp(steps) > 1e-9 * steps[0]:
            raise DomainError("GridField needs a uniform grid of at least 8 points")
        edge = max(abs(self.values[0] - self.q_minus), abs(self.values[-1] - self.q_plus))
        if edge > 1e-8:
            logger.warning(f"Field differs from its tails by {edge:.2e} at the window edge")

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])


def ramp(x: np.ndarray, left: float, right: float) -> np.ndarray:
    return (left + right) / 2 + (right - left) / 2 * np.tanh(x / RAMP_WIDTH)


def ramp_derivatives(x: np.ndarray, left: float, right: float):
    s = 1 / np.cosh(x / RAMP_WIDTH) ** 2
    th = np.tanh(x / RAMP_WIDTH)
    amp = (right - left) / 2
    first = amp * s / RAMP_WIDTH
    third = amp * (-2 * s * (s - 2 * th ** 2)) / RAMP_WIDTH ** 3
    return first, third


@dataclass
class CoupledState:
    """u(x, t) = q(x, t) and v(x, t) = q(-x, -t) on a grid symmetric about 0"""
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    sigma: int
    q_minus: float
    t: float = 0.0

    @classmethod
    def from_field(cls, grid: GridField, sigma: int) -> "CoupledState":
        if not np.allclose(grid.x, -grid.x[::-1], atol=1e-12):
            raise DomainError("the coupled system needs a grid symmetric about x = 0")
        return cls(x=grid.x, u=grid.values.copy(), v=grid.values[::-1].copy(), sigma=sigma,
                   q_minus=grid.q_minus)

    @property
    def q_plus(self) -> float:
        return -self.sigma * self.q_minus

    def mirror_defect(self, backward: Optional["CoupledState"] = None) -> float:
        """max |v(x, t) - u(-x, -t)|; u(., -t) comes from `backward`, or from this state when t = 0"""
        partner = self if backward is None else backward
        if abs(partner.t + self.t) > 1e-12:
            raise DomainError(f"mirror check needs a state at t={-self.t}, got t={partner.t}")
        if partner.x.shape != self.x.shape or not np.allclose(partner.x, self.x):
            raise DomainError("mirror check needs both states on one grid")
        return float(np.max(np.abs(self.v - partner.u[::-1])))


def _derivatives(w: np.ndarray, h: float):
    """fourth-order first and third derivatives with zero padding beyond the window"""
    p = np.pad(w, 3)
    shift = lambda k: p[3 + k:p.size - 3 + k]
    first = (-shift(2) + 8 * shift(1) - 8 * shift(-1) + shift(-2)) / (12 * h)
    third = (-shift(3) + 8 * shift(2) - 13 * shift(1) + 13 * shift(-1) - 8 * shift(-2) + shift(-3)) / (8 * h ** 3)
    return first, third


class _Background:
    """tanh ramps for u and v and their derivatives"""

    def __init__(self, state: CoupledState):
        x = state.x
        self.u = ramp(x, state.q_minus, state.q_plus)
        self.v = ramp(x, state.q_plus, state.q_minus)
        self.u_x, self.u_xxx = ramp_derivatives(x, state.q_minus, state.q_plus)
        self.v_x, self.v_xxx = ramp_derivatives(x, state.q_plus, state.q_minus)


def _check_bounded(u: np.ndarray, v: np.ndarray, t: float):
    if np.max(np.abs(u)) > BLOW_UP or np.max(np.abs(v)) > BLOW_UP or not np.all(np.isfinite(u)):
        raise BlowUpError("coupled evolution blew up", t=float(t), max_u=float(np.max(np.abs(u))))


def _evolve_lines(state: CoupledState, t_end: float, dt: float, config: RunConfig) -> np.ndarray:
    x, h, n = state.x, state.x[1] - state.x[0], state.x.size
    bg = _Background(state)
    y0 = np.concatenate([state.u - bg.u, state.v - bg.v])
    sigma = state.sigma

    def rhs(s, y):
        wu, wv = y[:n], y[n:]
        u, v = bg.u + wu, bg.v + wv
        _check_bounded(u, v, s)
        wu_x, wu_xxx = _derivatives(wu, h)
        wv_x, wv_xxx = _derivatives(wv, h)
        du = 6 * sigma * u * v * (bg.u_x + wu_x) - (bg.u_xxx + wu_xxx)
        dv = 6 * sigma * u * v * (bg.v_x + wv_x) - (bg.v_xxx + wv_xxx)
        return np.concatenate([du, dv])

    sol = solve_ivp(rhs, (state.t, state.t + t_end), y0.astype(complex), method="RK45",
                    max_step=dt, rtol=config.ode_rtol, atol=config.ode_atol)
    if not sol.success:
        raise BlowUpError(f"coupled evolution failed: {sol.message}", t=float(sol.t[-1]))
    logger.debug(f"Method of lines used {sol.nfev} evaluations")
    return np.stack([sol.y[:n, -1], sol.y[n:, -1]])


def _etdrk4_coefficients(lin: np.ndarray, tau: float, contour_points: int = 32):
    """exponential time-differencing weights, evaluated as means over a unit circle around tau * L"""
    roots = np.exp(2j * np.pi * (np.arange(contour_points) + 0.5) / contour_points)
    lr = tau * lin[..., None] + roots
    half = tau * np.mean((np.exp(lr / 2) - 1) / lr, axis=-1)
    f1 = tau * np.mean((-4 - lr + np.exp(lr) * (4 - 3 * lr + lr ** 2)) / lr ** 3, axis=-1)
    f2 = tau * np.mean((2 + lr + np.exp(lr) * (-2 + lr)) / lr ** 3, axis=-1)
    f3 = tau * np.mean((-4 - 3 * lr - lr ** 2 + np.exp(lr) * (4 - lr)) / lr ** 3, axis=-1)
    return np.exp(tau * lin), np.exp(tau * lin / 2), half, f1, f2, f3


def _evolve_spectral(state: CoupledState, t_end: float, dt: float) -> np.ndarray:
    """
    Fourth-order exponential integrator on the periodic extension of the window.

    The perturbations w = u - ramp and w = v - ramp vanish at both edges, so the
    dispersive part -w_xxx + c w_x with c = 6 sigma q+ q- is integrated exactly
    in Fourier space; the remainder of the nonlinearity is stepped explicitly.
    """
    x, n = state.x, state.x.size
    h = float(x[1] - x[0])
    steps = max(1, int(np.ceil(abs(t_end) / dt - 1e-9)))
    tau = t_end / steps
    bg = _Background(state)
    sigma = state.sigma
    c = 6 * sigma * state.q_plus * state.q_minus
    ik = 2j * np.pi * np.fft.fftfreq(n, d=h)
    if n % 2 == 0:
        ik[n // 2] = 0
    lin = -ik ** 3 + c * ik
    e_full, e_half, half, f1, f2, f3 = _etdrk4_coefficients(lin, tau)
    backgrounds = np.stack([bg.u, bg.v])
    slopes = np.stack([bg.u_x, bg.v_x])
    third = np.stack([bg.u_xxx, bg.v_xxx])

    def nonlinear(w_hat: np.ndarray, t: float) -> np.ndarray:
        fields = backgrounds + np.fft.ifft(w_hat, axis=-1)
        w_x = np.fft.ifft(ik * w_hat, axis=-1)
        _check_bounded(fields[0], fields[1], t)
        product = 6 * sigma * fields[0] * fields[1]
        return np.fft.fft(product * (slopes + w_x) - c * w_x - third, axis=-1)

    w_hat = np.fft.fft(np.stack([state.u, state.v]) - backgrounds, axis=-1)
    for step in range(steps):
        t = state.t + step * tau
        n0 = nonlinear(w_hat, t)
        a = e_half * w_hat + half * n0
        na = nonlinear(a, t + tau / 2)
        b = e_half * w_hat + half * na
        nb = nonlinear(b, t + tau / 2)
        c_hat = e_half * a + half * (2 * nb - n0)
        nc = nonlinear(c_hat, t + tau)
        w_hat = e_full * w_hat + f1 * n0 + 2 * f2 * (na + nb) + f3 * nc
    logger.debug(f"Exponential integrator took {steps} steps of {tau:.3e}")
    return np.fft.ifft(w_hat, axis=-1)


def evolve(state: CoupledState, t_end: float, dt: Optional[float] = None,
           config: RunConfig = settings) -> CoupledState:
    """Integrate the coupled system from state.t to state.t + t_end; t_end may be negative"""
    dt = config.pde_dt if dt is None else dt
    if dt <= 0:
        raise DomainError("the time step must be positive")
    if t_end == 0:
        return CoupledState(x=state.x, u=state.u.copy(), v=state.v.copy(), sigma=state.sigma,
                            q_minus=state.q_minus, t=state.t)
    if config.pde_scheme == "spectral":
        w = _evolve_spectral(state, t_end, dt)
    else:
        w = _evolve_lines(state, t_end, dt, config)
    bg = _Background(state)
    out = CoupledState(x=state.x, u=bg.u + w[0], v=bg.v + w[1], sigma=state.sigma,
                       q_minus=state.q_minus, t=state.t + t_end)
    _check_bounded(out.u, out.v, out.t)
    edge = float(max(np.max(np.abs(w[:, :5])), np.max(np.abs(w[:, -5:]))))
    if edge > 1e-6:
        logger.warning(f"Edge amplitude {edge:.2e} after evolution; the window may be too narrow")
    logger.info(f"Evolved coupled system to t={out.t} with the {config.pde_scheme} scheme")
    return out


def conserved_mass(state: CoupledState) -> float:
    """integral of (u v - delta) dx with delta = q+/q-"""
    delta = state.q_plus / state.q_minus
    return complex(trapezoid(state.u * state.v - delta, state.x)).real


class FieldHistory:
    """Snapshots q(x, t_k) on a common grid, interpolated by bicubic splines in (t, x)"""

    def __init__(self, times: Sequence[float], fields: Sequence[GridField]):
        order = np.argsort(times)
        self.times = np.asarray(times, dtype=float)[order]
        if self.times.size < 2 or np.any(np.diff(self.times) <= 0):
            raise DomainError("a field history needs at least two distinct times")
        x = fields[0].x
        if any(f.x.shape != x.shape or not np.allclose(f.x, x) for f in fields):
            raise DomainError("all snapshots must share one grid")
        self.x = x
        values = np.array([fields[k].values for k in order])
        kt = min(3, self.times.size - 1)
        self._re = RectBivariateSpline(self.times, x, values.real, kx=kt, ky=3)
        self._im = RectBivariateSpline(self.times, x, values.imag, kx=kt, ky=3)

    def __call__(self, x, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        tt = np.full(x.shape, t)
        return self._re.ev(tt, x) + 1j * self._im.ev(tt, x)

    def residual_rows(self, h: float, sigma: int) -> List[Tuple[float, float, float]]:
        """(t, x, residual) wherever the whole stencil and its mirror lie inside the table"""
        lo, hi = self.times[0], self.times[-1]
        reach = np.min(np.abs([self.x[0], self.x[-1]])) - 2 * h
        core = self.x[np.abs(self.x) <= reach]
        rows = []
        for t in self.times:
            if -abs(t) - h < lo or abs(t) + h > hi:
                continue
            values = residual(self, core, float(t), h, sigma)
            rows.extend((float(t), float(xi), float(r)) for xi, r in zip(core, values))
        if not rows:
            raise DomainError("no snapshot time t has both t +- h and -t inside the history")
        return rows
