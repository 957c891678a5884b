import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import logm, sqrtm

from squeezed_iep.entropy_geometry import (
    GEOMETRIC_PREFACTOR,
    BoundSample,
    binary_entropy,
    bound_sample,
    d_qf,
    d_wy,
    gibbs_state,
    iep,
    lower_bound,
    max_sq_distance,
    qubit_root_fidelity,
    relative_entropy,
    root_fidelity,
    upper_bound,
    von_neumann,
    wy_affinity,
)
from squeezed_iep.errors import DivergentRelativeEntropyError
from squeezed_iep.qmat2 import EXCITED, GROUND, MAXIMALLY_MIXED, PLUS, DensityMatrix, from_bloch

from .conftest import states

GIBBS_034 = DensityMatrix(0.05016)
SS_S2 = DensityMatrix(0.4835)


def test_von_neumann_examples():
    assert von_neumann(PLUS) == 0.0
    assert von_neumann(MAXIMALLY_MIXED) == pytest.approx(math.log(2), abs=1e-15)
    p = 0.0501
    assert von_neumann(DensityMatrix(p)) == pytest.approx(-p * math.log(p) - (1 - p) * math.log(1 - p), abs=1e-14)
    assert von_neumann(DensityMatrix(p)) == pytest.approx(0.198, abs=1e-3)
    assert binary_entropy(0.5) == pytest.approx(math.log(2))


def test_relative_entropy_examples():
    # the floored log of the zero eigenvalue meets ~1e-16 of round-off weight
    assert relative_entropy(PLUS, PLUS) == pytest.approx(0.0, abs=1e-12)
    assert relative_entropy(PLUS, MAXIMALLY_MIXED) == pytest.approx(math.log(2), abs=1e-14)
    assert relative_entropy(PLUS, GIBBS_034) == pytest.approx(1.5220, abs=1e-3)
    assert relative_entropy(PLUS, GIBBS_034) == pytest.approx(-0.5 * (math.log(0.05016) + math.log(0.94984)), abs=1e-12)


def test_relative_entropy_support_violation():
    with pytest.raises(DivergentRelativeEntropyError):
        relative_entropy(PLUS, GROUND)
    # weight only where the reference has support: finite
    assert relative_entropy(GROUND, GROUND) == 0.0


def test_distance_examples():
    assert d_wy(PLUS, PLUS) == pytest.approx(0.0, abs=1e-7)
    assert d_wy(EXCITED, GROUND) == pytest.approx(math.pi / 2)
    assert d_wy(PLUS, MAXIMALLY_MIXED) == pytest.approx(math.pi / 4, abs=1e-14)
    assert d_qf(MAXIMALLY_MIXED, MAXIMALLY_MIXED) == pytest.approx(0.0, abs=1e-7)
    assert d_qf(PLUS, MAXIMALLY_MIXED) == pytest.approx(math.pi / 4, abs=1e-14)
    assert d_qf(SS_S2, GIBBS_034) == pytest.approx(0.5427, abs=1e-3)


def test_iep_examples():
    assert iep(PLUS, PLUS, GIBBS_034) == 0.0
    assert iep(PLUS, GIBBS_034, GIBBS_034) == pytest.approx(relative_entropy(PLUS, GIBBS_034))
    assert iep(PLUS, SS_S2, GIBBS_034) == pytest.approx(0.7411, abs=2e-3)


def test_lower_bound_examples():
    assert lower_bound(PLUS, PLUS) == pytest.approx(0.0, abs=1e-12)
    assert lower_bound(PLUS, MAXIMALLY_MIXED) == pytest.approx(0.5, abs=1e-14)
    assert lower_bound(EXCITED, GROUND) == pytest.approx(2.0, abs=1e-14)


def test_upper_bound_examples():
    s0 = relative_entropy(PLUS, GIBBS_034)
    assert upper_bound(PLUS, GIBBS_034, GIBBS_034) == pytest.approx(s0, abs=1e-12)
    assert upper_bound(GIBBS_034, GIBBS_034, GIBBS_034) == pytest.approx(0.0, abs=1e-12)
    assert upper_bound(PLUS, SS_S2, GIBBS_034) == pytest.approx(1.2833, abs=2e-3)


def test_bound_sample_examples():
    b0 = bound_sample(PLUS, PLUS, GIBBS_034)
    assert b0.s_ir == 0.0
    assert b0.lb == pytest.approx(0.0, abs=1e-12)
    assert b0.dev_l == pytest.approx(0.0, abs=1e-12)
    expected = relative_entropy(PLUS, GIBBS_034) - GEOMETRIC_PREFACTOR * max_sq_distance(PLUS, GIBBS_034)
    assert b0.ub == pytest.approx(expected) and b0.gap == pytest.approx(expected)
    assert bound_sample(PLUS, GIBBS_034, GIBBS_034).dev_u == pytest.approx(0.0, abs=1e-12)
    b = bound_sample(PLUS, SS_S2, GIBBS_034)
    assert (b.s_ir, b.ub) == pytest.approx((0.7411, 1.2833), abs=2e-3)
    assert b.dev_u == pytest.approx(0.542, abs=2e-3)
    # computed under the Gibbs-reference reading; the published 0.51 is not reproduced
    assert b.dev_l == pytest.approx(0.241, abs=2e-3)


def test_bound_sample_definitions():
    b = BoundSample(0.3, 0.1, 0.7)
    assert (b.gap, b.dev_l, b.dev_u) == (0.7 - 0.1, 0.3 - 0.1, 0.7 - 0.3)


def test_gibbs_state():
    g = gibbs_state(1.0, 0.34)
    n_th = 1 / math.expm1(1 / 0.34)
    assert g.ee == pytest.approx(n_th / (2 * n_th + 1), rel=1e-14)
    assert g.ee == pytest.approx(0.05016, abs=1e-5)
    assert gibbs_state(1.0, 1e-3).ee == 0.0
    assert gibbs_state(1.0, 1e9).ee == pytest.approx(0.5)


def _scipy_rel_entropy(a, b):
    return float(np.trace(a @ (logm(a) - logm(b))).real)


@given(states(0.999), states(0.999))
def test_relative_entropy_matches_scipy(r1, r2):
    assert relative_entropy(r1, r2) == pytest.approx(_scipy_rel_entropy(r1.matrix, r2.matrix), abs=1e-8)


@given(states(), states(0.999))
def test_relative_entropy_non_negative(r1, r2):
    assert relative_entropy(r1, r2) >= -1e-12


# sqrt is not Lipschitz at 0: on exactly pure states a 1e-17 round-off
# eigenvalue moves fidelities by ~3e-9, so these properties sample the interior
INTERIOR = 1.0 - 1e-6


@given(states(INTERIOR), states(INTERIOR))
def test_fidelity_matches_scipy(r1, r2):
    s1 = sqrtm(r1.matrix)
    expected = np.trace(sqrtm(s1 @ r2.matrix @ s1)).real
    assert root_fidelity(r1, r2) == pytest.approx(expected, abs=1e-7)
    assert qubit_root_fidelity(r1, r2) == pytest.approx(root_fidelity(r1, r2), abs=1e-10)


@given(states(INTERIOR), states(INTERIOR))
def test_distance_axioms(r1, r2):
    for cos in (wy_affinity, root_fidelity):
        assert cos(r1, r2) == pytest.approx(cos(r2, r1), abs=1e-10)
    for d in (d_wy, d_qf):
        # arccos resolves angles near 0 only to ~sqrt(eps)
        assert d(r1, r2) == pytest.approx(d(r2, r1), abs=3e-8)
        assert 0.0 <= d(r1, r2) <= math.pi / 2
    assert d_qf(r1, r1) <= 1e-6 and d_wy(r1, r1) <= 1e-6


@given(states(INTERIOR), states(INTERIOR))
def test_bures_never_exceeds_wigner_yanase(r1, r2):
    # tr|sqrt(r1) sqrt(r2)| >= tr(sqrt(r1) sqrt(r2)), so max(D_QF, D_WY) is always D_WY
    assert root_fidelity(r1, r2) >= wy_affinity(r1, r2) - 1e-12
    assert max_sq_distance(r1, r2) == max(d_qf(r1, r2), d_wy(r1, r2)) ** 2


@given(st.floats(1e-6, 1.0 - 1e-6), st.floats(1e-6, 1.0 - 1e-6))
def test_commuting_case(p, q):
    r1, r2 = DensityMatrix(p), DensityMatrix(q)
    affinity = math.sqrt(p * q) + math.sqrt((1 - p) * (1 - q))
    assert root_fidelity(r1, r2) == pytest.approx(affinity, abs=1e-10)
    assert wy_affinity(r1, r2) == pytest.approx(affinity, abs=1e-10)
    # arccos is ill-conditioned at 1, so the angles are compared away from coincidence
    if affinity < 1.0 - 1e-8:
        expected = math.acos(affinity)
        assert d_qf(r1, r2) == pytest.approx(expected, abs=1e-10)
        assert d_wy(r1, r2) == pytest.approx(expected, abs=1e-10)


def test_pure_state_distances():
    for r in ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.6, 0.0, 0.8)):
        pure = from_bloch(r)
        assert d_wy(pure, MAXIMALLY_MIXED) == pytest.approx(math.pi / 4, abs=1e-7)
        assert d_qf(pure, MAXIMALLY_MIXED) == pytest.approx(math.pi / 4, abs=1e-7)
    assert d_qf(EXCITED, GROUND) == pytest.approx(math.pi / 2)


def test_distances_separate_states(rng):
    from squeezed_iep.validation import random_bloch

    a, b = random_bloch(rng, 200), random_bloch(rng, 200)
    for x, y in zip(a, b):
        if np.linalg.norm(x - y) > 1e-3:
            assert d_qf(from_bloch(x), from_bloch(y)) > 1e-10
            assert d_wy(from_bloch(x), from_bloch(y)) > 1e-10
