"""Amplitude damping of a qubit by a squeezed thermal bath.

Everything is in the interaction picture, so the transition frequency only
enters through the Planck occupation and the Gibbs reference. The Bloch
vector obeys the affine equation ``dr/dt = xi r + m`` whose propagator is
evaluated in closed form.

Phase convention: at ``phi = 0`` the anomalous correlation ``M`` is real and
negative, and the anomalous terms of the master equation enter as
``+gamma M sigma_+ rho sigma_+ + h.c.``. This places the anti-squeezed
(fast) quadrature on the Bloch ``x`` axis, so a ``(|e> + |g>)/sqrt 2``
coherence relaxes at ``gamma (2 N_th + 1) e^{2s} / 2``, and the squeezed
(slow) quadrature ``y`` at ``gamma (2 N_th + 1) e^{-2s} / 2``. Shifting
``phi`` by ``pi`` swaps the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .qmat2 import SIGMA_MINUS, SIGMA_PLUS, DensityMatrix, from_bloch, to_bloch
from .trajectory import Trajectory, check_time_grid


@dataclass(frozen=True)
class DissipationParams:
    temp: float = 0.34
    s: float = 0.0
    phi: float = 0.0
    gamma: float = 1.0
    omega0: float = 1.0

    def __post_init__(self):
        if not self.temp > 0:
            raise ContractViolation(f"temp must be positive, got {self.temp}")
        if not self.gamma > 0:
            raise ContractViolation(f"gamma must be positive, got {self.gamma}")
        if not self.s >= 0:
            raise ContractViolation(f"s must be non-negative, got {self.s}")
        if not self.omega0 > 0:
            raise ContractViolation(f"omega0 must be positive, got {self.omega0}")


@dataclass(frozen=True)
class BlochGenerator:
    xi: np.ndarray
    m: np.ndarray


def thermal_occupation(omega0: float, temp: float) -> float:
    """Planck occupation ``1 / (exp(omega0 / T) - 1)``."""
    # e^{-x} / (1 - e^{-x}) stays finite for very small T
    x = omega0 / temp
    return math.exp(-x) / -math.expm1(-x)


def occupation_n(p: DissipationParams) -> float:
    n_th = thermal_occupation(p.omega0, p.temp)
    ch, sh = math.cosh(p.s), math.sinh(p.s)
    return n_th * (ch * ch + sh * sh) + sh * sh


def squeeze_m(p: DissipationParams) -> complex:
    n_th = thermal_occupation(p.omega0, p.temp)
    return -math.sinh(2.0 * p.s) * complex(math.cos(p.phi), math.sin(p.phi)) * (2.0 * n_th + 1.0) / 2.0


def total_rate(p: DissipationParams) -> float:
    """``gamma (2N + 1)``, the population relaxation rate."""
    return p.gamma * (2.0 * occupation_n(p) + 1.0)


def quadrature_rates(p: DissipationParams) -> tuple[float, float]:
    """Fast and slow coherence decay rates ``gamma (2N_th+1) e^{+-2s} / 2``.

    Same values as ``gamma_tilde/2 +- gamma |M|`` without the cancellation
    that subtraction suffers at large squeezing.
    """
    base = 0.5 * p.gamma * (2.0 * thermal_occupation(p.omega0, p.temp) + 1.0)
    return base * math.exp(2.0 * p.s), base * math.exp(-2.0 * p.s)


def generator(p: DissipationParams) -> BlochGenerator:
    g_tilde = total_rate(p)
    m_c = squeeze_m(p)
    g = p.gamma
    xi = np.zeros((3, 3))
    xi[0, 0] = -(g_tilde - 2.0 * g * m_c.real) / 2.0
    xi[1, 1] = -(g_tilde + 2.0 * g * m_c.real) / 2.0
    xi[0, 1] = xi[1, 0] = -g * m_c.imag
    xi[2, 2] = -g_tilde
    return BlochGenerator(xi, np.array([0.0, 0.0, -g]))


def steady_state(p: DissipationParams) -> DensityMatrix:
    n = occupation_n(p)
    return DensityMatrix(n / (2.0 * n + 1.0))


def steady_bloch(p: DissipationParams) -> np.ndarray:
    return np.array([0.0, 0.0, -1.0 / (2.0 * occupation_n(p) + 1.0)])


def propagate_bloch(p: DissipationParams, r0, t_grid) -> np.ndarray:
    """Exact ``r(t) = e^{xi t}(r0 - r_ss) + r_ss`` for every grid time, shape ``(n, 3)``."""
    t = np.asarray(t_grid, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    r_ss = steady_bloch(p)
    d = r0 - r_ss
    fast, slow = quadrature_rates(p)
    e_fast = np.exp(-fast * t)
    e_slow = np.exp(-slow * t)
    m_c = squeeze_m(p)
    abs_m = abs(m_c)
    # xy block = -(fast+slow)/2 I + gamma K with K^2 = |M|^2 I
    if abs_m > 0.0:
        k = np.array([[m_c.real, -m_c.imag], [-m_c.imag, -m_c.real]]) / abs_m
    else:
        k = np.zeros((2, 2))
    even = 0.5 * (e_slow + e_fast)
    odd = 0.5 * (e_slow - e_fast)
    # e^{tB} = even I + odd K/|M|; K/|M| is -1 on the fast axis
    kd = k @ d[:2]
    out = np.empty((len(t), 3))
    out[:, 0] = even * d[0] + odd * kd[0]
    out[:, 1] = even * d[1] + odd * kd[1]
    out[:, 2] = np.exp(-total_rate(p) * t) * d[2]
    return out + r_ss


def evolve(p: DissipationParams, rho0: DensityMatrix, t_grid) -> Trajectory:
    t = check_time_grid(t_grid)
    r = propagate_bloch(p, tuple(to_bloch(rho0)), t)
    return Trajectory(t, tuple(from_bloch(_clip_unit(v)) for v in r))


def _clip_unit(v: np.ndarray) -> np.ndarray:
    # contraction keeps |r| <= 1; only round-off can push it over
    n = math.sqrt(float(v @ v))
    return v / n if n > 1.0 else v


def relaxation_rate(p: DissipationParams, rho0: DensityMatrix, rel_tol: float = 1e-12) -> float:
    """Slowest decay rate among the Bloch modes ``rho0`` actually excites."""
    d = np.array(tuple(to_bloch(rho0))) - steady_bloch(p)
    m_c = squeeze_m(p)
    fast, slow = quadrature_rates(p)
    rates = [total_rate(p)] if abs(d[2]) > rel_tol else []
    if abs(m_c) > 0.0:
        # project the xy displacement on the eigen-axes of K
        k = np.array([[m_c.real, -m_c.imag], [-m_c.imag, -m_c.real]]) / abs(m_c)
        w, v = np.linalg.eigh(k)
        comps = v.T @ d[:2]
        for eig, c in zip(w, comps):
            if abs(c) > rel_tol:
                rates.append(fast if eig < 0 else slow)
    elif np.hypot(d[0], d[1]) > rel_tol:
        rates.append(fast)
    return min(rates) if rates else total_rate(p)


def lindblad_rhs(p: DissipationParams, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the squeezed-bath master equation acting on a 2x2 matrix.

    Written directly from the dissipators; independent of :func:`generator`.
    """
    n = occupation_n(p)
    m_c = squeeze_m(p)
    g = p.gamma

    def dissipator(a):
        ad = a.conj().T
        return 2.0 * a @ rho @ ad - ad @ a @ rho - rho @ ad @ a

    return (
        0.5 * g * n * dissipator(SIGMA_PLUS)
        + 0.5 * g * (1.0 + n) * dissipator(SIGMA_MINUS)
        + g * m_c * SIGMA_PLUS @ rho @ SIGMA_PLUS
        + g * m_c.conjugate() * SIGMA_MINUS @ rho @ SIGMA_MINUS
    )


def analytic_ground_solution(p: DissipationParams, t: float) -> np.ndarray:
    """The closed-form ground-state solution exactly as published, as a raw 2x2 array.

    Uses ``mu``, ``nu`` and ``gamma_s = gamma_tilde + 2 gamma M`` together with the
    stationary expectation values of the Bloch fixed point. Kept for comparison
    only: the expression is not a valid density matrix at early times for s > 0.
    """
    g_tilde = total_rate(p)
    m_c = squeeze_m(p)
    g_s = g_tilde + 2.0 * p.gamma * m_c
    sz = -1.0 / (2.0 * occupation_n(p) + 1.0)
    s_minus = s_plus = 0.0
    env = np.exp((-4.0 * g_tilde + g_s) * t / 4.0)
    c, s = np.cos(g_s * t / 4.0), np.sin(g_s * t / 4.0)
    mu = (g_s - env * (g_s * c + (g_s + p.gamma * m_c) * s)) / g_s
    nu = g_tilde * env * (c - s) / g_s
    return np.array(
        [
            [(1 - nu + (1 - nu) * sz) / 2, mu * s_minus],
            [(1 - np.exp(-g_s * t / 2.0)) * s_plus, (1 + nu - (1 - nu) * sz) / 2],
        ],
        dtype=complex,
    )


def compare_analytic_solution(p: DissipationParams, t_grid) -> float:
    """Max entrywise deviation of the published ground-state formula from :func:`evolve`."""
    from .qmat2 import GROUND

    traj = evolve(p, GROUND, t_grid)
    return max(
        float(np.max(np.abs(analytic_ground_solution(p, t) - s.matrix)))
        for t, s in zip(traj.times, traj.states)
    )
