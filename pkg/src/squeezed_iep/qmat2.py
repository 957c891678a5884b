"""Closed-form 2x2 Hermitian algebra for qubit density matrices.

Basis convention: ``|e> = (1, 0)``, ``|g> = (0, 1)``, ``sigma_z |e> = +|e>``
and ``sigma_+ = |e><g|``. A state is stored through its excited population
``ee`` and the coherence ``eg = rho[0, 1]``, so that

    rho = [[ee, eg], [conj(eg), 1 - ee]],    eg = (x - i y) / 2,  ee = (1 + z) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ContractViolation, InvalidStateError, NotPSDError

PSD_EPS = 1e-12
LOG_FLOOR = 1e-300
HERMITIAN_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


class EigenPair2(NamedTuple):
    """Eigenvalues (descending) and matching orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray


def _check_hermitian(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise ContractViolation(f"expected a 2x2 matrix, got shape {a.shape}")
    if (
        abs(a[0, 1] - a[1, 0].conjugate()) > HERMITIAN_TOL
        or abs(a[0, 0].imag) > HERMITIAN_TOL
        or abs(a[1, 1].imag) > HERMITIAN_TOL
    ):
        raise ContractViolation("matrix is not Hermitian within 1e-12")
    return a


def _eigh_parts(a: float, d: float, b: complex) -> EigenPair2:
    # a, d: real diagonal; b: upper off-diagonal entry
    mean = 0.5 * (a + d)
    delta = 0.5 * (a - d)
    ab = abs(b)
    r = math.hypot(delta, ab)
    values = np.array([mean + r, mean - r])
    if ab == 0.0:
        if a >= d:
            return EigenPair2(values, np.eye(2, dtype=complex))
        return EigenPair2(values, np.array([[0, 1], [1, 0]], dtype=complex))
    if delta >= 0.0:
        v1, v2 = complex(r + delta), b.conjugate()
    else:
        v1, v2 = b, complex(r - delta)
    nrm = math.hypot(abs(v1), abs(v2))
    v1, v2 = v1 / nrm, v2 / nrm
    # second column is orthogonal by construction: (-conj v2, conj v1)
    return EigenPair2(values, np.array([[v1, -v2.conjugate()], [v2, v1.conjugate()]]))


def eigh2(a: np.ndarray) -> EigenPair2:
    """Exact eigendecomposition of a Hermitian 2x2 matrix.

    Uses the trace/half-difference form of the quadratic formula, so the result
    carries no iteration error. Eigenvalues come back sorted descending.
    """
    a = _check_hermitian(a)
    return _eigh_parts(a[0, 0].real, a[1, 1].real, complex(a[0, 1]))


def _reassemble(pair: EigenPair2, fvals) -> np.ndarray:
    # f(A) = f2 I + (f1 - f2) v v^H with v the leading eigenvector
    f1, f2 = float(fvals[0]), float(fvals[1])
    v1, v2 = complex(pair.vectors[0, 0]), complex(pair.vectors[1, 0])
    df = f1 - f2
    off = df * v1 * v2.conjugate()
    return np.array(
        [[f2 + df * abs(v1) ** 2, off], [off.conjugate(), f2 + df * abs(v2) ** 2]], dtype=complex
    )


def _clamped(pair: EigenPair2) -> tuple[float, float]:
    hi, lo = float(pair.values[0]), float(pair.values[1])
    if lo < -PSD_EPS:
        raise NotPSDError(f"eigenvalue {lo:.3e} below -{PSD_EPS:g}")
    return max(hi, 0.0), max(lo, 0.0)


def sqrt_psd(a: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD matrix; round-off negatives clamp to 0."""
    pair = eigh2(a)
    return _reassemble(pair, [math.sqrt(x) for x in _clamped(pair)])


def log_psd(a: np.ndarray) -> np.ndarray:
    """Matrix logarithm with eigenvalues floored at ``LOG_FLOOR``.

    Only meaningful inside traces weighted by the same eigenvalues, where the
    floor reproduces the ``0 log 0 = 0`` convention.
    """
    pair = eigh2(a)
    return _reassemble(pair, [math.log(max(x, LOG_FLOOR)) for x in _clamped(pair)])


@dataclass(frozen=True)
class DensityMatrix:
    """Qubit state ``[[ee, eg], [conj(eg), 1 - ee]]``.

    Construction validates positivity to ``PSD_EPS``; instances are immutable
    and cache their eigendecomposition and square root.
    """

    ee: float
    eg: complex = 0j

    def __post_init__(self):
        ee = self.ee
        if isinstance(ee, complex):
            if abs(ee.imag) > PSD_EPS:
                raise InvalidStateError(f"population has imaginary part {ee.imag:.3e}")
            ee = ee.real
        ee = float(ee)
        eg = complex(self.eg)
        if not (math.isfinite(ee) and math.isfinite(eg.real) and math.isfinite(eg.imag)):
            raise InvalidStateError("non-finite matrix entry")
        object.__setattr__(self, "ee", ee)
        object.__setattr__(self, "eg", eg)
        lam_min = 0.5 - math.hypot(ee - 0.5, abs(eg))
        if lam_min < -PSD_EPS:
            raise InvalidStateError(f"not positive semidefinite (min eigenvalue {lam_min:.3e})")

    @property
    def gg(self) -> float:
        return 1.0 - self.ee

    @classmethod
    def from_matrix(cls, a: np.ndarray, trace_tol: float = 1e-10) -> DensityMatrix:
        a = _check_hermitian(a)
        tr = (a[0, 0] + a[1, 1]).real
        if abs(tr - 1.0) > trace_tol:
            raise InvalidStateError(f"trace {tr!r} differs from 1")
        return cls(a[0, 0].real, complex(a[0, 1]))

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array([[self.ee, self.eg], [self.eg.conjugate(), self.gg]], dtype=complex)

    @cached_property
    def eig(self) -> EigenPair2:
        return _eigh_parts(self.ee, self.gg, self.eg)

    @cached_property
    def sqrt(self) -> np.ndarray:
        return _reassemble(self.eig, [math.sqrt(x) for x in _clamped(self.eig)])

    @property
    def det(self) -> float:
        return self.ee * self.gg - abs(self.eg) ** 2

    @property
    def bloch(self) -> BlochVector:
        return to_bloch(self)


def from_bloch(r) -> DensityMatrix:
    """``(I + r . sigma) / 2`` for a Bloch vector with ``|r| <= 1``."""
    x, y, z = (float(c) for c in r)
    if math.sqrt(x * x + y * y + z * z) > 1.0 + PSD_EPS:
        raise InvalidStateError(f"Bloch vector norm exceeds 1: {(x, y, z)}")
    return DensityMatrix(0.5 * (1.0 + z), complex(0.5 * x, -0.5 * y))


def to_bloch(rho: DensityMatrix) -> BlochVector:
    return BlochVector(2.0 * rho.eg.real, -2.0 * rho.eg.imag, 2.0 * rho.ee - 1.0)


GROUND = DensityMatrix(0.0)
EXCITED = DensityMatrix(1.0)
PLUS = DensityMatrix(0.5, 0.5)
MAXIMALLY_MIXED = DensityMatrix(0.5)

NAMED_STATES = {"ground": GROUND, "excited": EXCITED, "plus": PLUS}


def named_state(name: str) -> DensityMatrix:
    try:
        return NAMED_STATES[name]
    except KeyError:
        raise InvalidStateError(f"unknown state {name!r}; expected one of {sorted(NAMED_STATES)}") from None
