import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from aggfield import angular as am
from aggfield.errors import ConfigError, EvaluationError

open_unit = st.floats(min_value=1e-6, max_value=1 - 1e-6)
shape = st.floats(min_value=0.3, max_value=6.0)


@pytest.mark.parametrize("w1", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_point_mass_rejects_closed_simplex(w1):
    with pytest.raises(ConfigError):
        am.PointMass(w1)


def test_mixture_validation():
    with pytest.raises(ConfigError):
        am.DiscreteMixture(((0.5, 0.2), (0.4, 0.7)))
    with pytest.raises(ConfigError):
        am.DiscreteMixture(())
    with pytest.raises(ConfigError):
        am.DiscreteMixture(((1.0, 1.0),))


def test_beta_rejects_bad_shapes():
    for a, b in [(0.0, 1.0), (1.0, -2.0), (math.inf, 1.0)]:
        with pytest.raises(ConfigError):
            am.BetaDensity(a, b)


def test_from_dict_unknown_variant():
    with pytest.raises(ConfigError):
        am.from_dict({"variant": "Cauchy"})
    with pytest.raises(ConfigError):
        am.from_dict({"variant": "PointMass"})


@given(open_unit, shape, shape)
def test_records_round_trip(w1, a, b):
    for m in (am.PointMass(w1), am.BetaDensity(a, b),
              am.DiscreteMixture(((0.25, w1), (0.75, 0.5)))):
        assert am.from_dict(m.to_dict()) == m


def test_beta_moment_matches_beta_ratio():
    m = am.BetaDensity(2.0, 2.0)
    assert am.moment(m, 1, 1) == pytest.approx(special.beta(3, 3) / special.beta(2, 2), rel=1e-14)
    assert am.moment(m, 1, 1) == pytest.approx(0.2, rel=1e-14)
    assert am.moment(m, 2, 0) == pytest.approx(0.3, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(shape, shape, st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_beta_moment_vs_numeric_integral(a, b, p1, p2):
    m = am.BetaDensity(a, b)
    f = lambda w: w ** (a - 1 + p1) * (1 - w) ** (b - 1 + p2) / special.beta(a, b)
    ref = integrate.quad(f, 0, 0.5, limit=200)[0] + integrate.quad(f, 0.5, 1, limit=200)[0]
    assert m.moment(p1, p2) == pytest.approx(ref, rel=1e-7)


@settings(max_examples=30, deadline=None)
@given(shape, shape, st.integers(0, 6), st.integers(0, 6))
def test_generic_rule_exact_on_polynomials(a, b, p1, p2):
    m = am.BetaDensity(a, b)
    assert am.AngularMeasure.moment(m, p1, p2) == pytest.approx(m.moment(p1, p2), rel=1e-11)


def test_divergent_moment_raises():
    with pytest.raises(EvaluationError):
        am.BetaDensity(0.5, 0.5).moment(-1.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(shape, shape)
def test_log_moment_digamma(a, b):
    m = am.BetaDensity(a, b)
    f = lambda w: -math.log1p(-w) * w ** (a - 1) * (1 - w) ** (b - 1) / special.beta(a, b)
    ref = integrate.quad(f, 0, 0.5, limit=200)[0] + integrate.quad(f, 0.5, 1, limit=200)[0]
    assert m.log_moment() == pytest.approx(ref, rel=1e-7)
    assert am.log_moment_finite(m) == m.log_moment()


def test_atomic_integrals_are_exact():
    m = am.DiscreteMixture(((0.2, 0.1), (0.8, 0.6)))
    assert am.integrate(m, lambda w1, w2: w1 * w2) == pytest.approx(0.2 * 0.09 + 0.8 * 0.24)
    assert am.PointMass(0.3).moment(1, 2) == pytest.approx(0.3 * 0.49)
    assert am.PointMass(0.5).log_moment() == pytest.approx(math.log(2))


def test_non_finite_integrand_names_the_atom():
    with pytest.raises(EvaluationError, match="atom"):
        with np.errstate(divide="ignore"):
            am.PointMass(0.5).integrate(lambda w1, w2: np.log(w1 - 0.5))


@pytest.mark.parametrize("order", [8, 16])
def test_split_and_graded_rules_integrate_kinks(order):
    m = am.BetaDensity(1.5, 2.5)
    f = lambda w: min(w, 1 - w) * stats.beta(1.5, 2.5).pdf(w)
    ref = integrate.quad(f, 0, 0.5)[0] + integrate.quad(f, 0.5, 1)[0]
    w, wt = m.split_nodes(2 * order)
    assert np.dot(wt, np.minimum(w, 1 - w)) == pytest.approx(ref, rel=1e-9)
    w, wt = m.graded_nodes(order, 1e-6, 1e-6)
    assert wt.sum() == pytest.approx(1.0, rel=1e-10)
    assert np.dot(wt, np.minimum(w, 1 - w)) == pytest.approx(ref, rel=1e-8)


def test_beta_sampler_goodness_of_fit():
    m = am.BetaDensity(2.0, 5.0)
    rng = np.random.default_rng(3)
    w = m.w1_from_uniform(rng.random(20_000))
    assert stats.kstest(w, stats.beta(2.0, 5.0).cdf).pvalue > 1e-3
    assert np.all((w > 0) & (w < 1))


def test_mixture_sampler_chi_square():
    atoms = ((0.1, 0.2), (0.3, 0.5), (0.6, 0.9))
    m = am.DiscreteMixture(atoms)
    rng = np.random.default_rng(5)
    w = m.w1_from_uniform(rng.random(30_000))
    observed = [np.sum(w == a[1]) for a in atoms]
    expected = [30_000 * a[0] for a in atoms]
    assert stats.chisquare(observed, expected).pvalue > 1e-3


def test_sample_w_on_simplex():
    rng = np.random.default_rng(0)
    w1, w2 = am.sample_w(am.BetaDensity(3.0, 1.0), rng)
    assert w1 + w2 == pytest.approx(1.0)
    assert am.sample_w(am.PointMass(0.25), rng) == (0.25, 0.75)
