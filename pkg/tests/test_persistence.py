import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from aggfield import persistence as ps
from aggfield.angular import BetaDensity, DiscreteMixture, PointMass
from aggfield.errors import ConfigError, QuadratureError

hurst = st.floats(min_value=0.51, max_value=0.99)
alphas = st.floats(min_value=0.3, max_value=1.9)
uniforms = st.floats(min_value=0.0, max_value=1.0 - 1e-12)


def test_law_validation():
    for H in (0.5, 1.0, 0.2):
        with pytest.raises(ConfigError):
            ps.Independent(H, 0.7)
    with pytest.raises(ConfigError):
        ps.Dependent(2.0, 1.0, PointMass(0.5))
    with pytest.raises(ConfigError):
        ps.Dependent(1.0, 1.0, 0.5)
    with pytest.raises(ConfigError):
        ps.law_from_dict({"variant": "Gumbel"})
    with pytest.raises(ConfigError):
        ps.atom_mass(ps.Independent(0.7, 0.7))


def test_law_round_trip():
    for law in (ps.Independent(0.6, 0.9), ps.Dependent(1.2, 0.7, BetaDensity(2, 3))):
        assert ps.law_from_dict(law.to_dict()) == law


@given(hurst, uniforms)
def test_independent_sampler_in_range(H, u):
    q = ps.sample_q_independent(H, u)
    # U = 2 (1 - q) can be below the float spacing at 1, so q may round to 1
    assert 0.5 <= q <= 1.0
    u1, _ = ps.u_from_uniforms(ps.Independent(H, 0.7), u, 0.5)
    assert 0.0 < u1 <= 1.0


def test_independent_sampler_is_beta():
    H = 0.7
    rng = np.random.default_rng(1)
    q = ps.sample_q_independent(H, rng.random(20_000))
    U = 2 * (1 - q)
    assert stats.kstest(U, stats.beta(2 - 2 * H, 1).cdf).pvalue > 1e-3


def test_radial_tail():
    rng = np.random.default_rng(2)
    R = ps.sample_R(rng.random(20_000))
    assert stats.kstest(1 / R, "uniform").pvalue > 1e-3


def test_forced_rw_and_clamp():
    law = ps.Dependent(1.0, 1.0, PointMass(0.5))
    s = ps.persistence_from_rw(law, 4.0, 0.5)
    assert (s.u1, s.u2) == (0.5, 0.5) and s.q1 == 0.75
    # R w2 < 1: outside the unit square, clamped to the atom
    s = ps.persistence_from_rw(law, 1.5, 0.5)
    assert (s.u1, s.u2, s.q1, s.q2) == (1.0, 1.0, 0.5, 0.5)


@settings(max_examples=50)
@given(alphas, alphas, st.floats(0.01, 0.99), uniforms, uniforms)
def test_u_inside_unit_square(a1, a2, w, ua, ub):
    law = ps.Dependent(a1, a2, PointMass(w))
    s = ps.persistence_from_uniforms(law, ua, ub)
    assert 0 < s.u1 <= 1 and 0 < s.u2 <= 1
    assert (s.u1 == 1.0) == (s.u2 == 1.0)
    assert 0.5 <= s.q1 < 1 and 0.5 <= s.q2 < 1


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_atom_mass_formula(w, p):
    law = ps.Dependent(1.0, 1.5, DiscreteMixture(((p, w), (1 - p, 0.5))))
    assert ps.atom_mass(law) == pytest.approx(1 - p * min(w, 1 - w) - (1 - p) * 0.5, abs=1e-14)


def test_atom_mass_beta_and_monte_carlo():
    law = ps.Dependent(1.0, 1.0, BetaDensity(2.0, 2.0))
    assert ps.atom_mass(law) == pytest.approx(0.6875, rel=1e-12)
    rng = np.random.default_rng(4)
    N = 100_000
    u1, _ = ps.u_from_uniforms(law, rng.random(N), rng.random(N))
    p = np.mean(u1 == 1.0)
    assert abs(p - 0.6875) < 4 * math.sqrt(0.6875 * 0.3125 / N)


@pytest.mark.parametrize("H1,H2,l1,l2", [(0.7, 0.6, 1, 0), (0.8, 0.9, 5, 7), (0.55, 0.95, 40, 3)])
def test_rho_independent_closed_form(H1, H2, l1, l2):
    # E[(1-U)^l] with U ~ Beta(k, 1) is k B(k, l + 1)
    k1, k2 = 2 - 2 * H1, 2 - 2 * H2
    closed = k1 * special.beta(k1, l1 + 1) * k2 * special.beta(k2, l2 + 1)
    assert ps.correlation_rho(ps.Independent(H1, H2), l1, l2) == pytest.approx(closed, rel=1e-9)


def test_rho_symmetric_in_lag_sign():
    law = ps.Dependent(1.3, 0.8, BetaDensity(2, 3))
    assert ps.correlation_rho(law, -3, 4) == ps.correlation_rho(law, 3, -4)
    assert ps.correlation_rho(law, 0, 0) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("angular", [PointMass(0.5), BetaDensity(2.0, 2.0), PointMass(0.2)])
def test_rho_dependent_monte_carlo(angular):
    law = ps.Dependent(1.0, 1.3, angular)
    rng = np.random.default_rng(8)
    N = 400_000
    u1, u2 = ps.u_from_uniforms(law, rng.random(N), rng.random(N))
    for l1, l2 in [(1, 1), (3, 2), (0, 5)]:
        x = (1 - u1) ** l1 * (1 - u2) ** l2
        est, se = x.mean(), x.std() / math.sqrt(N)
        assert abs(ps.correlation_rho(law, l1, l2) - est) < 4 * se


def test_expect_product_vector_valued_and_errors():
    law = ps.Independent(0.75, 0.6)
    ls = np.arange(4)
    val, err = ps.expect_product(law, lambda u: (1 - u)[:, None] ** ls, lambda u: np.ones_like(u))
    assert val.shape == (4,) and np.all(err <= 1e-8 * np.abs(val))
    # a wildly oscillating integrand cannot be resolved at order 2
    with pytest.raises(QuadratureError):
        ps.expect_product(law, lambda u: np.cos(1e4 * u), lambda u: np.ones_like(u),
                          order=2, rtol=1e-12)


def test_sample_q_uses_generator():
    law = ps.Dependent(1.0, 1.0, PointMass(0.5))
    a = ps.sample_q(law, np.random.default_rng(7))
    b = ps.sample_q(law, np.random.default_rng(7))
    assert a == b
