"""Entropy functionals, contractive-metric distances and the geometric IEP bounds.

All entropies are in nats. Distances are geodesic angles in ``[0, pi/2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentRelativeEntropyError
from .qmat2 import LOG_FLOOR, DensityMatrix, sqrt_psd

GEOMETRIC_PREFACTOR = 8.0 / math.pi**2

_SUPPORT_EIG = 1e-14
_SUPPORT_WEIGHT = 1e-12


def _xlogx(p) -> float:
    return sum(x * math.log(max(x, LOG_FLOOR)) for x in (max(float(v), 0.0) for v in p))


def von_neumann(rho: DensityMatrix) -> float:
    """``-tr(rho ln rho)`` with ``0 ln 0 = 0``."""
    return -_xlogx(rho.eig.values)


def binary_entropy(p: float) -> float:
    return -_xlogx(np.array([p, 1.0 - p]))


def relative_entropy(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """``S(rho1 || rho2) = tr(rho1 ln rho1) - tr(rho1 ln rho2)``.

    Evaluated in the two eigenbases: the cross term is
    ``sum_ij p_i |<a_i|b_j>|^2 ln q_j``.

    Raises:
        DivergentRelativeEntropyError: if ``rho1`` puts weight above 1e-12 on an
            eigenvector of ``rho2`` whose eigenvalue is below 1e-14.
    """
    p, a = rho1.eig
    q, b = rho2.eig
    p = (max(float(p[0]), 0.0), max(float(p[1]), 0.0))
    q = (float(q[0]), float(q[1]))
    # unitary overlaps: |<a_0|b_0>|^2 = |<a_1|b_1>|^2 = c, the off pairs 1 - c
    c = min(abs(complex(np.vdot(a[:, 0], b[:, 0]))) ** 2, 1.0)
    weight = (p[0] * c + p[1] * (1.0 - c), p[0] * (1.0 - c) + p[1] * c)
    for j in range(2):
        if q[j] < _SUPPORT_EIG and weight[j] > _SUPPORT_WEIGHT:
            raise DivergentRelativeEntropyError(
                f"reference eigenvalue {q[j]:.3e} carries weight {weight[j]:.3e}"
            )
    cross = sum(w * math.log(max(qj, LOG_FLOOR)) for w, qj in zip(weight, q))
    return _xlogx(p) - cross


def _arccos(c: float) -> float:
    return math.acos(min(1.0, max(-1.0, c)))


def _trace_product(a: np.ndarray, b: np.ndarray) -> float:
    return float((a * b.T).sum().real)


def wy_affinity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    return _trace_product(rho1.sqrt, rho2.sqrt)


def d_wy(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Wigner-Yanase geodesic distance ``arccos tr(sqrt(rho1) sqrt(rho2))``."""
    return _arccos(wy_affinity(rho1, rho2))


def root_fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Uhlmann root fidelity ``tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`` via two matrix roots."""
    s1 = rho1.sqrt
    inner = s1 @ rho2.matrix @ s1
    inner = 0.5 * (inner + inner.conj().T)
    root = sqrt_psd(inner)
    return float(root[0, 0].real + root[1, 1].real)


def qubit_root_fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Closed form ``sqrt(tr(rho1 rho2) + 2 sqrt(det rho1 det rho2))``, valid for qubits only."""
    overlap = _trace_product(rho1.matrix, rho2.matrix)
    dets = max(rho1.det, 0.0) * max(rho2.det, 0.0)
    return math.sqrt(max(overlap + 2.0 * math.sqrt(dets), 0.0))


def d_qf(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Quantum Fisher (Bures angle) geodesic distance."""
    return _arccos(root_fidelity(rho1, rho2))


def max_sq_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """``max(D_QF, D_WY)**2``, the distance term shared by both bounds."""
    return max(d_qf(rho1, rho2), d_wy(rho1, rho2)) ** 2


def gibbs_state(omega0: float, temp: float) -> DensityMatrix:
    """Canonical state of ``H = omega0 |e><e|`` at temperature ``temp`` (k_B = 1)."""
    # 1 / (exp(b) + 1) written to stay finite for large b
    b = omega0 / temp
    p_e = math.exp(-b) / (1.0 + math.exp(-b)) if b > 0 else 1.0 / (1.0 + math.exp(b))
    return DensityMatrix(p_e)


def iep(rho0: DensityMatrix, rho_t: DensityMatrix, rho_ref: DensityMatrix) -> float:
    """Irreversible entropy production ``S(rho0||ref) - S(rho_t||ref)``."""
    return relative_entropy(rho0, rho_ref) - relative_entropy(rho_t, rho_ref)


def lower_bound(rho0: DensityMatrix, rho_t: DensityMatrix) -> float:
    return GEOMETRIC_PREFACTOR * max_sq_distance(rho0, rho_t)


def upper_bound(rho0: DensityMatrix, rho_t: DensityMatrix, rho_ref: DensityMatrix) -> float:
    return relative_entropy(rho0, rho_ref) - GEOMETRIC_PREFACTOR * max_sq_distance(rho_t, rho_ref)


@dataclass(frozen=True)
class BoundSample:
    s_ir: float
    lb: float
    ub: float

    @property
    def gap(self) -> float:
        return self.ub - self.lb

    @property
    def dev_l(self) -> float:
        return self.s_ir - self.lb

    @property
    def dev_u(self) -> float:
        return self.ub - self.s_ir


def bound_sample(
    rho0: DensityMatrix,
    rho_t: DensityMatrix,
    rho_ref: DensityMatrix,
    s0_ref: float | None = None,
) -> BoundSample:
    """IEP and both bounds at one instant.

    ``s0_ref`` may carry a precomputed ``S(rho0 || rho_ref)`` when the same
    initial state is evaluated along a whole trajectory.
    """
    if s0_ref is None:
        s0_ref = relative_entropy(rho0, rho_ref)
    s_ir = s0_ref - relative_entropy(rho_t, rho_ref)
    lb = GEOMETRIC_PREFACTOR * max_sq_distance(rho0, rho_t)
    ub = s0_ref - GEOMETRIC_PREFACTOR * max_sq_distance(rho_t, rho_ref)
    return BoundSample(s_ir, lb, ub)
