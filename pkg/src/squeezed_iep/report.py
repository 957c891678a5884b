"""Thermodynamic bookkeeping along a trajectory.

The reference state in the IEP and the upper bound is the Gibbs state of
``H_S = omega0 |e><e|`` at the bath temperature, for both channels and all
squeezing strengths. With that reference the decomposition
``s_tot = s_ir + heat / T`` is an identity, which the report exposes as a
residual rather than assuming.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entropy_geometry import BoundSample, bound_sample, gibbs_state, relative_entropy, von_neumann
from .qmat2 import DensityMatrix
from .trajectory import Trajectory

DEFAULT_EPSILON = 0.01


def equilibrium_time(series, times, epsilon: float = DEFAULT_EPSILON) -> float | None:
    """First grid time after which ``series`` stays within ``epsilon |f(inf)|`` of its final value.

    The final sample stands in for ``f(inf)``. Returns ``None`` when the last
    10% of samples stray outside twice that band, i.e. the series has not
    settled on the grid.
    """
    f = np.asarray(series, dtype=float)
    t = np.asarray(times, dtype=float)
    f_inf = f[-1]
    band = epsilon * abs(f_inf)
    dist = np.abs(f - f_inf)
    tail = dist[int(0.9 * len(f)):]
    if np.any(tail > 2.0 * band):
        return None
    outside = np.nonzero(dist > band)[0]
    if len(outside) == 0:
        return float(t[0])
    return float(t[outside[-1] + 1])


@dataclass(frozen=True)
class IrrevReport:
    times: np.ndarray
    samples: tuple[BoundSample, ...]
    heat: np.ndarray
    s_re: np.ndarray
    s_tot: np.ndarray
    epsilon: float = DEFAULT_EPSILON
    t_eq_iep: float | None = None
    t_eq_lb: float | None = None
    t_eq_ub: float | None = None
    gamma: np.ndarray | None = field(default=None, repr=False)
    bloch: np.ndarray | None = field(default=None, repr=False)

    def _col(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    @property
    def s_ir(self) -> np.ndarray:
        return self._col("s_ir")

    @property
    def lb(self) -> np.ndarray:
        return self._col("lb")

    @property
    def ub(self) -> np.ndarray:
        return self._col("ub")

    @property
    def gap(self) -> np.ndarray:
        return self._col("gap")

    @property
    def dev_l(self) -> np.ndarray:
        return self._col("dev_l")

    @property
    def dev_u(self) -> np.ndarray:
        return self._col("dev_u")

    @property
    def decomposition_residual(self) -> float:
        """``max |s_tot - s_ir - s_re|`` over the samples."""
        return float(np.max(np.abs(self.s_tot - self.s_ir - self.s_re)))

    def sandwich_violation(self) -> float:
        """Largest amount by which ``lb <= s_ir <= ub`` fails (<= 0 when it holds)."""
        s_ir = self.s_ir
        return float(max(np.max(self.lb - s_ir), np.max(s_ir - self.ub)))

    def asymptotics(self) -> dict[str, float]:
        last = self.samples[-1]
        return {"s_ir": last.s_ir, "lb": last.lb, "ub": last.ub, "dev_l": last.dev_l, "dev_u": last.dev_u}


def build_report(
    traj: Trajectory,
    rho0: DensityMatrix,
    omega0: float,
    temp: float,
    epsilon: float = DEFAULT_EPSILON,
) -> IrrevReport:
    """Bounds, heat and entropy flow at every sample of ``traj``.

    Heat is ``tr(H_S rho(t)) - tr(H_S rho0)`` and the entropy flow is heat over
    ``temp``; ``s_tot`` is computed independently from von Neumann entropies.
    """
    ref = gibbs_state(omega0, temp)
    s0_ref = relative_entropy(rho0, ref)
    s0 = von_neumann(rho0)
    samples = tuple(bound_sample(rho0, st, ref, s0_ref) for st in traj.states)
    heat = np.array([omega0 * (st.ee - rho0.ee) for st in traj.states])
    s_tot = np.array([von_neumann(st) - s0 for st in traj.states])
    s_ir = np.array([b.s_ir for b in samples])
    lb = np.array([b.lb for b in samples])
    ub = np.array([b.ub for b in samples])
    return IrrevReport(
        times=traj.times,
        samples=samples,
        heat=heat,
        s_re=heat / temp,
        s_tot=s_tot,
        epsilon=epsilon,
        t_eq_iep=equilibrium_time(s_ir, traj.times, epsilon),
        t_eq_lb=equilibrium_time(lb, traj.times, epsilon),
        t_eq_ub=equilibrium_time(ub, traj.times, epsilon),
        gamma=traj.gamma,
        bloch=traj.bloch,
    )
