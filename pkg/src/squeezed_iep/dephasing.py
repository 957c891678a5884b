"""Pure dephasing of a qubit by a squeezed thermal bath with an Ohmic spectrum.

Populations never move; the coherence is multiplied by a real decoherence
factor ``Gamma(t)``. Two routes are provided: the high-temperature Markovian
closed form, and direct quadrature of the continuum-mode exponent for the
spectral density ``J(w) = eta w exp(-w / cutoff)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .ode_oracle import quad_adaptive
from .qmat2 import DensityMatrix
from .trajectory import Trajectory, check_time_grid

MODES = ("closed", "integral")
EXPONENT_TOL = 1e-9
TAIL_TOL = 1e-12
FD_STEP = 1e-4


@dataclass(frozen=True)
class DephasingParams:
    temp: float = 0.34
    s: float = 0.0
    dphi: float = math.pi / 4
    eta: float = 1.0
    cutoff: float = 100.0
    omega0: float = 1.0

    def __post_init__(self):
        for name in ("temp", "eta", "cutoff", "omega0"):
            if not getattr(self, name) > 0:
                raise ContractViolation(f"{name} must be positive, got {getattr(self, name)}")
        if not self.s >= 0:
            raise ContractViolation(f"s must be non-negative, got {self.s}")


def decay_rate(p: DephasingParams) -> float:
    """Markovian dephasing rate ``(2 eta T / pi)[pi cosh 2s - ln 4 sinh 2s sin dphi]``.

    Always positive because ``ln 4 < pi``.
    """
    return (2.0 * p.eta * p.temp / math.pi) * (
        math.pi * math.cosh(2.0 * p.s) - math.log(4.0) * math.sinh(2.0 * p.s) * math.sin(p.dphi)
    )


def gamma_closed(p: DephasingParams, t):
    return np.exp(-decay_rate(p) * np.asarray(t, dtype=float))


def exponent_integrand(p: DephasingParams, t: float):
    """Vectorised integrand of ``-ln Gamma(t)`` over bath frequency.

    The removable point ``w = 0`` takes its limit ``(2 eta T t^2 / pi)(cosh 2s - sinh 2s cos dphi)``.
    """
    ch, sh = math.cosh(2.0 * p.s), math.sinh(2.0 * p.s)
    pref = 2.0 * p.eta / math.pi
    at_zero = pref * p.temp * t * t * (ch - sh * math.cos(p.dphi))

    def f(w):
        w = np.asarray(w, dtype=float)
        safe = np.where(w > 0.0, w, 1.0)
        one_minus_cos = 2.0 * np.sin(0.5 * safe * t) ** 2
        thermal = one_minus_cos / (safe * np.tanh(safe / (2.0 * p.temp)))
        val = pref * np.exp(-safe / p.cutoff) * thermal * (ch - sh * np.cos(safe * t - p.dphi))
        return np.where(w > 0.0, val, at_zero)

    return f


def _frequency_span(p: DephasingParams, t: float) -> float:
    w_max = max(40.0 * p.temp, 20.0 / t, 10.0 * p.cutoff)
    # |integrand| <= (4 eta e^{2s} / pi) coth(w/2T) e^{-w/cutoff} / w beyond w_max
    while True:
        tail = (
            4.0 * p.eta * math.exp(2.0 * p.s) / math.pi
            / math.tanh(w_max / (2.0 * p.temp)) * p.cutoff * math.exp(-w_max / p.cutoff) / w_max
        )
        if tail < TAIL_TOL:
            return w_max
        w_max *= 2.0


def exponent_integral(p: DephasingParams, t: float, tol: float = EXPONENT_TOL) -> tuple[float, float]:
    """``-ln Gamma(t)`` by adaptive quadrature; returns ``(value, achieved_tol)``."""
    if t < 0:
        raise ContractViolation("t must be non-negative")
    if t == 0:
        return 0.0, 0.0
    w_max = _frequency_span(p, t)
    return quad_adaptive(exponent_integrand(p, t), 0.0, w_max, tol, max_panel=math.pi / (4.0 * t))


def gamma_integral(p: DephasingParams, t: float, tol: float = EXPONENT_TOL) -> float:
    return math.exp(-exponent_integral(p, t, tol)[0])


def gamma_series(p: DephasingParams, t_grid, mode: str = "closed") -> np.ndarray:
    if mode == "closed":
        return gamma_closed(p, t_grid)
    if mode == "integral":
        return np.array([gamma_integral(p, float(t)) for t in t_grid])
    raise ContractViolation(f"mode must be one of {MODES}, got {mode!r}")


def evolve(p: DephasingParams, rho0: DensityMatrix, t_grid, mode: str = "closed") -> Trajectory:
    t = check_time_grid(t_grid)
    g = gamma_series(p, t, mode)
    states = tuple(DensityMatrix(rho0.ee, rho0.eg * float(gi)) for gi in g)
    return Trajectory(t, states, g)


def timelocal_rates(p: DephasingParams, t: float, mode: str = "closed", h: float = FD_STEP) -> tuple[float, float]:
    """Dephasing rate ``-d ln|Gamma|/dt`` and frequency shift ``-Im(Gamma'/Gamma)``.

    Gamma is real in both modes, so the shift is identically zero. The
    integral mode differentiates ``ln Gamma`` numerically with step ``h``
    (one-sided second order near ``t = 0``).
    """
    if mode == "closed":
        return decay_rate(p), 0.0
    if mode != "integral":
        raise ContractViolation(f"mode must be one of {MODES}, got {mode!r}")

    def log_gamma(x):
        return -exponent_integral(p, x, tol=1e-12)[0]

    if t >= h:
        d = -(log_gamma(t + h) - log_gamma(t - h)) / (2.0 * h)
    else:
        d = -(-3.0 * log_gamma(t) + 4.0 * log_gamma(t + h) - log_gamma(t + 2.0 * h)) / (2.0 * h)
    return d, 0.0


def relaxation_rate(p: DephasingParams) -> float:
    return decay_rate(p)
