import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from squeezed_iep import dephasing as dep
from squeezed_iep.entropy_geometry import gibbs_state, relative_entropy, von_neumann
from squeezed_iep.errors import ContractViolation
from squeezed_iep.ode_oracle import IntegratorConfig, integrate_masterlike
from squeezed_iep.qmat2 import GROUND, PLUS, DensityMatrix, from_bloch

from .conftest import bloch_vectors

P = dep.DephasingParams()
HIGH_T = dep.DephasingParams(temp=20.0, s=1.0, eta=0.1, cutoff=200.0)


def test_gamma_closed_examples():
    t = np.linspace(0.0, 3.0, 7)
    assert dep.gamma_closed(dep.DephasingParams(s=0.0), t) == pytest.approx(np.exp(-2 * 0.34 * t), rel=1e-14)
    p = dep.DephasingParams(s=1.5, dphi=0.0)
    assert dep.gamma_closed(p, t) == pytest.approx(np.exp(-2 * 0.34 * t * math.cosh(3.0)), rel=1e-14)
    p = dep.DephasingParams(s=1.0)
    # (0.68/pi)[pi 3.7622 - 1.3863 * 3.6269 * 0.7071] evaluates to 1.7888, not 1.7997
    exponent = (0.68 / math.pi) * (math.pi * 3.7622 - 1.3863 * 3.6269 * 0.7071)
    assert dep.decay_rate(p) == pytest.approx(exponent, abs=1e-3)
    assert float(dep.gamma_closed(p, 1.0)) == pytest.approx(math.exp(-exponent), abs=1e-3)
    assert float(dep.gamma_closed(p, 1.0)) == pytest.approx(0.1672, abs=1e-3)


@given(st.floats(0.0, 4.0), st.floats(0.0, 2 * math.pi))
def test_decay_rate_positive(s, dphi):
    assert dep.decay_rate(dep.DephasingParams(s=s, dphi=dphi)) > 0


def test_gamma_integral_examples():
    assert dep.gamma_integral(P, 0.0) == 1.0
    rel = abs(math.log(dep.gamma_integral(HIGH_T, 0.5)) / (-dep.decay_rate(HIGH_T) * 0.5) - 1)
    assert rel <= 0.01


def test_gamma_integral_monotone_at_s0():
    p = dep.DephasingParams(s=0.0)
    g = [dep.gamma_integral(p, t) for t in (0.1, 0.5, 1.0, 2.0, 4.0)]
    assert all(b < a for a, b in zip(g, g[1:]))


def test_integrand_limit_at_zero():
    f = dep.exponent_integrand(dep.DephasingParams(s=1.0), 0.7)
    assert float(f(np.array([0.0]))[0]) == pytest.approx(float(f(np.array([1e-7]))[0]), rel=1e-6)


def test_exponent_matches_mpmath():
    p = dep.DephasingParams(s=1.0)
    t = 1.0
    ch, sh = math.cosh(2.0), math.sinh(2.0)

    def f(w):
        return (
            (2 * p.eta / mpmath.pi)
            * mpmath.exp(-w / p.cutoff)
            * 2 * mpmath.sin(w * t / 2) ** 2
            / (w * mpmath.tanh(w / (2 * p.temp)))
            * (ch - sh * mpmath.cos(w * t - p.dphi))
        )

    mpmath.mp.dps = 20
    edges = [mpmath.mpf(k) for k in np.linspace(0.0, 4000.0, 801)]
    ref = sum(mpmath.quad(f, [a, b]) for a, b in zip(edges, edges[1:]))
    value, achieved = dep.exponent_integral(p, t)
    # the integrand beyond 4000 is below e^{-40}
    assert value == pytest.approx(float(ref), rel=1e-8)
    assert achieved <= dep.EXPONENT_TOL


def test_evolve_examples():
    t = np.linspace(0.0, 30.0, 61)
    traj = dep.evolve(P, DensityMatrix(0.3), t)
    assert all(s == DensityMatrix(0.3) for s in traj.states)
    traj = dep.evolve(P, PLUS, t)
    for s, g in zip(traj.states, traj.gamma):
        assert s.eig.values == pytest.approx([(1 + g) / 2, (1 - g) / 2], abs=1e-15)
    assert von_neumann(traj.states[-1]) == pytest.approx(math.log(2), abs=1e-12)
    assert abs(traj.states[-1].eg) <= 1e-8


@given(bloch_vectors(), st.floats(0.0, 2.5), st.sampled_from(["closed", "integral"]))
def test_populations_and_heat(r0, s, mode):
    rho0 = from_bloch(r0)
    traj = dep.evolve(dep.DephasingParams(s=s), rho0, np.linspace(0.0, 2.0, 5), mode=mode)
    assert all(st_.ee == rho0.ee for st_ in traj.states)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.0, 2.5), st.floats(0.1, 2.0))
def test_iep_identity_for_pure_states(angle, s, temp):
    rho0 = from_bloch((math.cos(angle) * 0.6, math.sin(angle) * 0.6, 0.8))
    p = dep.DephasingParams(s=s, temp=temp)
    ref = gibbs_state(p.omega0, p.temp)
    for rho in dep.evolve(p, rho0, np.linspace(0.0, 5.0, 11)).states:
        s_ir = relative_entropy(rho0, ref) - relative_entropy(rho, ref)
        assert s_ir == pytest.approx(von_neumann(rho) - von_neumann(rho0), abs=1e-10)


def test_ln2_asymptote_for_all_squeezing():
    for s in (0.0, 1.0, 2.0):
        p = dep.DephasingParams(s=s)
        t_end = 40.0 / dep.decay_rate(p)
        rho = dep.evolve(p, PLUS, [0.0, t_end]).states[-1]
        ref = gibbs_state(1.0, 0.34)
        assert relative_entropy(PLUS, ref) - relative_entropy(rho, ref) == pytest.approx(math.log(2), abs=1e-10)


def test_timelocal_rates_closed():
    assert dep.timelocal_rates(dep.DephasingParams(s=0.0), 1.0) == (pytest.approx(2 * 0.34), 0.0)
    d, eps = dep.timelocal_rates(dep.DephasingParams(s=1.0), 3.0)
    assert d == pytest.approx(1.7888, abs=1e-3) and eps == 0.0


def test_timelocal_rates_integral_approach_closed_form():
    d, eps = dep.timelocal_rates(HIGH_T, 1.5, mode="integral")
    assert eps == 0.0
    assert d == pytest.approx(dep.decay_rate(HIGH_T), rel=0.02)


def test_master_equation_consistency_closed():
    p = dep.DephasingParams(s=1.0)
    t = np.linspace(0.0, 5.0, 51)
    rate = dep.decay_rate(p)
    oracle = integrate_masterlike(lambda _t: (rate, 0.0), PLUS, t)
    direct = dep.evolve(p, PLUS, t)
    assert max(abs(a.eg - b.eg) for a, b in zip(oracle.states, direct.states)) <= 1e-6


def test_master_equation_consistency_integral():
    t = np.linspace(0.0, 5.0, 11)
    oracle = integrate_masterlike(
        lambda s: dep.timelocal_rates(P, s, "integral"), PLUS, t, IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    )
    direct = dep.evolve(P, PLUS, t, mode="integral")
    assert max(abs(a.eg - b.eg) for a, b in zip(oracle.states, direct.states)) <= 1e-6


def test_frequency_span_tail():
    w_max = dep._frequency_span(P, 1e-3)
    assert w_max >= 20.0 / 1e-3
    assert w_max >= 10 * P.cutoff


def test_invalid():
    with pytest.raises(ContractViolation):
        dep.DephasingParams(eta=0.0)
    with pytest.raises(ContractViolation):
        dep.gamma_series(P, [0.0, 1.0], mode="exact")
    with pytest.raises(ContractViolation):
        dep.exponent_integral(P, -1.0)
    with pytest.raises(ContractViolation):
        dep.timelocal_rates(P, 1.0, mode="bogus")
    assert dep.evolve(P, GROUND, [0.0, 1.0]).gamma.shape == (2,)
