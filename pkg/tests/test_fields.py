import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aggfield import fields, theory as th
from aggfield.angular import BetaDensity, PointMass
from aggfield.errors import ConfigError
from aggfield.persistence import Dependent, Independent

IND = Independent(0.7, 0.6)
DEP = Dependent(1.0, 1.0, PointMass(0.5))


def test_forced_walks():
    # start below 1/2 gives +1; flip when the uniform is at least q
    w = fields.simulate_walk(5, 0.75, uniforms=[0.1, 0.2, 0.9, 0.5, 0.99])
    assert w.cumulative.tolist() == [0, 1, 2, 1, 0, 1]
    w = fields.simulate_walk(3, 0.5, uniforms=[0.7, 0.0, 0.0])
    assert w.cumulative.tolist() == [0, -1, -2, -3]


def test_walk_validation():
    with pytest.raises(ConfigError):
        fields.simulate_walk(0, 0.7, uniforms=[])
    with pytest.raises(ConfigError):
        fields.simulate_walk(3, 1.0, uniforms=[0.1, 0.1, 0.1])
    with pytest.raises(ConfigError):
        fields.simulate_walk(3, 0.7, uniforms=[0.1, 0.1])
    with pytest.raises(ConfigError):
        fields.simulate_walk(3, 0.7)


@settings(max_examples=50)
@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_product_form_matches_lattice_sum(n1, n2, data):
    e1 = np.array(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n1, max_size=n1)))
    e2 = np.array(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n2, max_size=n2)))
    grid = [(1.0, 1.0), (0.5, 0.3), (0.0, 1.0), (0.99, 0.01)]
    lattice = np.outer(e1, e2)
    a, b = fields.grid_indices((n1, n2), grid)
    expected = [lattice[:i, :j].sum() for i, j in zip(a, b)]
    assert fields.field_from_steps(e1, e2, grid).tolist() == expected


def test_grid_indices_floor_and_range():
    a, b = fields.grid_indices((100, 10), [(0.29, 0.3), (1.0, 0.0)])
    assert a.tolist() == [29, 100] and b.tolist() == [3, 0]
    with pytest.raises(ConfigError):
        fields.grid_indices((4, 4), [(1.01, 0.5)])


def test_single_field_uses_block_layout():
    n = (4, 3)
    width = fields.block_width(n)
    assert width == 12
    # ua, ub pick U = (1/2, 1/2) under the point mass (R = 4): q = 3/4
    u = np.zeros(width)
    u[0] = 0.75
    u[2], u[3] = 0.2, 0.8           # starts: +1, -1
    u[4:7] = [0.1, 0.9, 0.1]        # axis 1: +1 +1 -1 -1
    u[7:9] = [0.95, 0.2]            # axis 2: -1 +1 +1
    vals = fields.single_field_values(n, [(1.0, 1.0), (0.5, 1 / 3)], DEP, uniforms=u)
    assert vals.tolist() == [0 * 1, 2 * -1]
    with pytest.raises(ConfigError):
        fields.single_field_values(n, [(1.0, 1.0)], DEP, uniforms=np.zeros(5))


def test_copies_sum_to_aggregate_and_worker_invariance():
    grid = [(1.0, 1.0), (0.5, 0.5)]
    copies = fields.simulate_copies((9, 7), grid, DEP, 1000, master_seed=3)
    agg = [fields.aggregate_field((9, 7), grid, DEP, 1000, 3, workers=w).values for w in (1, 3)]
    assert agg[0].tolist() == copies.sum(axis=0).tolist() == agg[1].tolist()
    # copies are addressable: a later slice reproduces the tail
    tail = fields.simulate_copies((9, 7), grid, DEP, 10, master_seed=3, first_copy=990)
    assert np.array_equal(tail, copies[990:])


def test_uniform_source_override_cancels():
    # copies 2i and 2i+1 share uniforms except for the axis-1 start sign
    def source(first, count, width):
        rng = np.random.default_rng(0)
        base = rng.random((count // 2 + 1, width))
        out = np.repeat(base, 2, axis=0)[:count]
        out[1::2, 2] = np.where(out[1::2, 2] < 0.5, 0.75, 0.25)
        return out

    run = fields.aggregate_field((6, 6), [(1.0, 1.0)], IND, 100, 0, uniform_source=source)
    assert run.values.tolist() == [0]


def test_field_run_round_trip():
    run = fields.aggregate_field((5, 5), [(1.0, 1.0)], DEP, 10, 42)
    back = fields.FieldRun.from_dict(run.to_dict())
    assert back.to_dict() == run.to_dict()
    with pytest.raises(ConfigError):
        fields.aggregate_field((5, 5), [(1.0, 1.0)], DEP, 0, 1)


def test_mean_zero_and_variance():
    v = fields.simulate_copies((16, 16), [(1.0, 1.0), (0.5, 0.75)], Dependent(1.2, 0.8, BetaDensity(2, 2)),
                               100_000, master_seed=12).astype(float)
    law = Dependent(1.2, 0.8, BetaDensity(2, 2))
    for k, p in enumerate([(1.0, 1.0), (0.5, 0.75)]):
        x = v[:, k]
        assert abs(x.mean()) < 4 * x.std() / math.sqrt(x.size)
        exact = th.exact_cov_Sn((16, 16), p, p, law)
        se = np.std(x**2) / math.sqrt(x.size)
        assert abs(np.mean(x**2) - exact) < 4 * se


def test_iid_signs_at_half_persistence():
    # q = 1/2 gives i.i.d. signs: Var of one walk sum is n
    rng = np.random.default_rng(1)
    u = rng.random((50_000, 20))
    eps = fields.signs_from_uniforms(u[:, 0], u[:, 1:], np.full(50_000, 0.5))
    s = eps.sum(axis=1).astype(float)
    assert abs(s.var() - 20) < 4 * 20 * math.sqrt(2 / 50_000)


def test_pinned_persistence_factorises():
    q = (0.8, 0.65)
    rng = np.random.default_rng(2)
    N = 100_000
    u1, u2 = rng.random((N, 12)), rng.random((N, 9))
    e1 = fields.signs_from_uniforms(u1[:, 0], u1[:, 1:], np.full(N, q[0])).astype(float)
    e2 = fields.signs_from_uniforms(u2[:, 0], u2[:, 1:], np.full(N, q[1])).astype(float)
    x = e1.sum(axis=1) * e2.sum(axis=1)
    exact = th.exact_cov_Sn_given_q((12, 9), (1, 1), (1, 1), q)
    assert abs(np.mean(x**2) - exact) < 4 * np.std(x**2) / math.sqrt(N)


def test_empirical_cov():
    y = np.array([[1.0, 2.0], [3.0, -1.0], [0.0, 1.0]])
    est, err = fields.empirical_cov(y, [(0, 1), (0, 0)])
    assert est.tolist() == pytest.approx([(2 - 3 + 0) / 3, 10 / 3])
    assert err[0] == pytest.approx(np.std([2, -3, 0], ddof=1) / math.sqrt(3))
    with pytest.raises(ConfigError):
        fields.empirical_cov(y[:1], [(0, 0)])
