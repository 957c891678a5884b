"""Independent numerical machinery used to validate the closed-form paths.

Nothing here is on the primary computation path. The integrator is an
explicit Dormand-Prince 5(4) pair with step-size control; the quadrature is
an adaptive Gauss-Kronrod 7/15 panel scheme evaluated in vectorised form.
Neither shares code with the closed-form propagators beyond :mod:`qmat2`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation, NumericalFailure
from .qmat2 import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, DensityMatrix
from .trajectory import Trajectory, check_time_grid


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise ContractViolation("tolerances and max_step must be positive")
        if self.max_steps < 1:
            raise ContractViolation("max_steps must be at least 1")


# Dormand & Prince (1980), RK5(4)7M
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _initial_step(f, t0, y0, f0, cfg: IntegratorConfig, span: float) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span, cfg.max_step)
    y1 = y0 + h0 * f0
    d2 = np.sqrt(np.mean(np.abs((f(t0 + h0, y1) - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span, cfg.max_step)


def integrate(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_grid,
    config: IntegratorConfig | None = None,
) -> np.ndarray:
    """Integrate ``dy/dt = f(t, y)`` and return ``y`` at every grid time.

    Steps are shortened to land exactly on each requested time, so no
    interpolation error enters the sampled values.

    Raises:
        ContractViolation: for an empty or non-increasing grid.
        NumericalFailure: when ``max_steps`` is exhausted; ``achieved`` is the
            last time reached.
    """
    cfg = config or IntegratorConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(np.diff(t_grid) <= 0):
        raise ContractViolation("time grid must be a non-empty, strictly increasing 1-D sequence")
    y = np.array(y0, dtype=np.result_type(np.asarray(y0).dtype, float))
    out = np.empty((len(t_grid),) + y.shape, dtype=y.dtype)
    t = float(t_grid[0])
    out[0] = y
    if len(t_grid) == 1:
        return out
    k = np.empty((7,) + y.shape, dtype=y.dtype)
    k[0] = f(t, y)
    h = _initial_step(f, t, y, k[0], cfg, float(t_grid[-1] - t))
    steps = 0
    for i in range(1, len(t_grid)):
        target = float(t_grid[i])
        while t < target:
            if steps >= cfg.max_steps:
                raise NumericalFailure(f"step budget exhausted at t = {t!r}", achieved=t)
            h = min(h, cfg.max_step)
            last = t + h >= target
            h_try = target - t if last else h
            for s in range(1, 7):
                dy = sum(_A[s][j] * k[j] for j in range(s) if _A[s][j] != 0.0)
                k[s] = f(t + _C[s] * h_try, y + h_try * dy)
            y_new = y + h_try * np.tensordot(_B5, k, axes=1)
            err_vec = h_try * np.tensordot(_E, k, axes=1)
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.sqrt(np.mean(np.abs(err_vec / scale) ** 2)))
            steps += 1
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
            if err <= 1.0:
                t = target if last else t + h_try
                y = y_new
                k[0] = k[6]  # first-same-as-last
                if not last or h_try >= h:
                    h = h_try * factor
            else:
                h = h_try * max(factor, 0.2)
            if h < 1e-15 * max(1.0, abs(t)):
                raise NumericalFailure(f"step size underflow at t = {t!r}", achieved=t)
        out[i] = y
    return out


def integrate_affine(xi, m, r0, t_grid, config: IntegratorConfig | None = None) -> np.ndarray:
    """Numerically integrate ``dr/dt = xi r + m``; returns one row per grid time."""
    xi = np.asarray(xi, dtype=float)
    m = np.asarray(m, dtype=float)
    if np.max(np.linalg.eigvals(xi).real) > 1e-12:
        warnings.warn("generator has an eigenvalue with positive real part", RuntimeWarning, stacklevel=2)
    return integrate(lambda _t, r: xi @ r + m, np.asarray(r0, dtype=float), t_grid, config)


def integrate_masterlike(
    rate_fn: Callable[[float], tuple[float, float]],
    rho0: DensityMatrix,
    t_grid,
    config: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate ``d rho_eg/dt = -(i eps(t) + D(t)) rho_eg`` with populations frozen.

    ``rate_fn(t)`` returns ``(D, eps)``.
    """
    t_grid = check_time_grid(t_grid)

    def rhs(t, y):
        d, eps = rate_fn(t)
        # y = (Re, Im) of rho_eg
        return np.array([-d * y[0] + eps * y[1], -eps * y[0] - d * y[1]])

    y = integrate(rhs, np.array([rho0.eg.real, rho0.eg.imag]), t_grid, config)
    states = tuple(DensityMatrix(rho0.ee, complex(a, b)) for a, b in y)
    return Trajectory(t_grid, states)


def bloch_affine_from_rhs(rhs: Callable[[np.ndarray], np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Read ``(xi, m)`` of ``dr/dt = xi r + m`` off a linear map on 2x2 matrices.

    Probes the map on ``I/2`` and ``(I + sigma_k)/2``; ``dr_k/dt = tr(sigma_k drho/dt)``.
    """
    paulis = (SIGMA_X, SIGMA_Y, SIGMA_Z)

    def bloch_rate(d):
        return np.array([np.trace(sk @ d).real for sk in paulis])

    m = bloch_rate(rhs(0.5 * IDENTITY))
    xi = np.column_stack([bloch_rate(rhs(0.5 * (IDENTITY + sk))) - m for sk in paulis])
    return xi, m


# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[[1, 3, 5]] = _WG[:3]
_G_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
_G_WEIGHTS[7] = _WG[3]


def _gk15(f, left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    kron = half * (fx @ _K_WEIGHTS)
    gauss = half * (fx @ _G_WEIGHTS)
    return kron, np.abs(kron - gauss)


def quad_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    max_panel: float | None = None,
    max_rounds: int = 60,
    max_panels: int = 4_000_000,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod quadrature of a vectorised integrand.

    ``b`` may be ``math.inf``; the half line is then mapped onto ``[0, 1)``
    by ``w = a + x / (1 - x)``. On a finite interval ``max_panel`` caps the
    initial panel width (useful for oscillatory integrands). Panels whose
    Kronrod-Gauss difference exceeds their width-proportional share of
    ``tol`` are bisected until the summed estimate meets ``tol``.

    Returns ``(value, achieved_tol)``.

    Raises:
        NumericalFailure: if ``tol`` is not met within ``max_rounds``
            refinements or ``max_panels`` panels; ``achieved`` holds the best
            error estimate.
    """
    if not tol > 0:
        raise ContractViolation("tol must be positive")
    if math.isinf(b):
        g = f

        def f(x):  # noqa: F811
            one_minus = 1.0 - x
            return g(a + x / one_minus) / (one_minus * one_minus)

        lo, hi = 0.0, 1.0
    else:
        lo, hi = float(a), float(b)
    if hi <= lo:
        if hi == lo:
            return 0.0, 0.0
        raise ContractViolation("integration bounds must satisfy a <= b")
    length = hi - lo
    n0 = 1 if max_panel is None or math.isinf(b) else max(1, math.ceil(length / max_panel))
    edges = np.linspace(lo, hi, n0 + 1)
    left, right = edges[:-1], edges[1:]
    done_value = 0.0
    done_err = 0.0
    for _ in range(max_rounds):
        kron, err = _gk15(f, left, right)
        if not (np.all(np.isfinite(kron)) and np.all(np.isfinite(err))):
            raise NumericalFailure("integrand produced non-finite values", achieved=math.inf)
        total_err = done_err + float(err.sum())
        if total_err <= tol:
            return done_value + float(kron.sum()), total_err
        share = tol * (right - left) / length
        refine = err > share
        done_value += float(kron[~refine].sum())
        done_err += float(err[~refine].sum())
        left, right = left[refine], right[refine]
        if 2 * len(left) > max_panels:
            raise NumericalFailure(
                f"panel budget exhausted; error estimate {total_err:.3e} > {tol:.3e}",
                achieved=total_err,
            )
        mid = 0.5 * (left + right)
        left, right = np.concatenate([left, mid]), np.concatenate([mid, right])
    kron, err = _gk15(f, left, right)
    achieved = done_err + float(err.sum())
    if achieved <= tol:
        return done_value + float(kron.sum()), achieved
    raise NumericalFailure(
        f"no convergence after {max_rounds} refinements; error estimate {achieved:.3e} > {tol:.3e}",
        achieved=achieved,
    )
