import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxlinear_ttt.errors import (
    CriticalityTie,
    CriticalityViolated,
    LeavesParameterSpace,
    NegativeInput,
    NonPositiveDiagonal,
    NonPositiveThreshold,
    NotSingleChild,
    NotUniqueSource,
    WeightOutOfRange,
    WeightsMismatch,
)
from maxlinear_ttt.generators import random_theta, random_ttt
from maxlinear_ttt.graph import build_ttt
from maxlinear_ttt.model import (
    MaxLinearModel,
    bvv_path_sum,
    bvv_via_tournament,
    joint_cdf,
    scale_witness,
    stdf,
    validate_theta,
)

T3 = build_ttt([1, 2, 3], [(1, 2), (2, 3), (1, 3)])


def test_valid_tournament_weights():
    th = validate_theta(T3, {(1, 2): 0.5, (2, 3): 0.4, (1, 3): 0.3})
    assert th.path_weight[(1, 3)] == 0.3


def test_criticality_violated():
    with pytest.raises(CriticalityViolated):
        validate_theta(T3, {(1, 2): 0.5, (2, 3): 0.4, (1, 3): 0.1})


def test_criticality_tie():
    with pytest.raises(CriticalityTie):
        validate_theta(T3, {(1, 2): 0.5, (2, 3): 0.4, (1, 3): 0.2})


def test_weight_bounds(chain):
    g = chain.graph
    with pytest.raises(WeightOutOfRange):
        validate_theta(g, {(1, 2): 1.0, (2, 3): 0.4})
    with pytest.raises(WeightOutOfRange):
        validate_theta(g, {(1, 2): 0.0, (2, 3): 0.4})
    with pytest.raises(WeightsMismatch):
        validate_theta(g, {(1, 2): 0.5})


def test_non_positive_diagonal():
    # node 3 has two parents whose contributions exceed one
    g = build_ttt([1, 2, 3], [(1, 3), (2, 3)])
    with pytest.raises(NonPositiveDiagonal):
        validate_theta(g, {(1, 3): 0.6, (2, 3): 0.5})


def test_tournament_coefficients(tour3):
    np.testing.assert_allclose(tour3.B, [[1, 0, 0], [0.5, 0.5, 0], [0.3, 0.2, 0.5]], atol=1e-15)


def test_unique_parent_diagonal(chain):
    assert chain.diag[2] == pytest.approx(1 - 0.5, abs=1e-15)
    assert chain.diag[3] == pytest.approx(1 - 0.4, abs=1e-15)
    assert chain.diag[1] == 1.0


def test_bvv_examples(tour3, chain):
    assert bvv_via_tournament(tour3.graph, tour3.theta, 3) == pytest.approx(0.5, abs=1e-15)
    assert bvv_path_sum(tour3.graph, tour3.theta, 3) == pytest.approx(1 - 0.3 - 0.4 + 0.5 * 0.4, abs=1e-15)
    assert bvv_via_tournament(tour3.graph, tour3.theta, 1) == 1.0
    assert bvv_via_tournament(chain.graph, chain.theta, 3) == pytest.approx(0.6, abs=1e-15)


def test_bvv_needs_unique_source(vstruct):
    with pytest.raises(NotUniqueSource):
        bvv_via_tournament(vstruct.graph, vstruct.theta, 3)


def test_stdf_examples(tour3):
    assert stdf(tour3, [1, 1, 1]) == pytest.approx(2.0, abs=1e-15)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1
        assert stdf(tour3, e) == pytest.approx(1.0, abs=1e-15)
    assert stdf(tour3, [0, 0, 0]) == 0
    with pytest.raises(NegativeInput):
        stdf(tour3, [1, -1, 0])


def test_joint_cdf(tour3):
    assert joint_cdf(tour3, {2: 1.0}) == pytest.approx(math.exp(-1), abs=1e-15)
    assert joint_cdf(tour3, [1, 1, 1]) == pytest.approx(math.exp(-2), abs=1e-15)
    assert joint_cdf(tour3, [math.inf] * 3) == 1.0
    with pytest.raises(NonPositiveThreshold):
        joint_cdf(tour3, [1, 0, 1])


def test_scale_witness(chain):
    th = scale_witness(chain, 2, 1.1)
    assert th[(1, 2)] == pytest.approx(0.55, abs=1e-15)
    assert th[(2, 3)] == pytest.approx(0.4 / 1.1, abs=1e-15)
    assert scale_witness(chain, 2, 1.0) == chain.theta.as_dict()
    with pytest.raises(LeavesParameterSpace):
        scale_witness(chain, 2, 10.0)
    with pytest.raises(NotSingleChild):
        scale_witness(chain, 3, 1.1)


# -- properties ------------------------------------------------------------

models = st.builds(
    lambda seed, n: (lambda r: (lambda g: MaxLinearModel.from_weights(g, random_theta(r, g)))(random_ttt(r, n)))(
        np.random.default_rng(seed)
    ),
    st.integers(0, 2**32 - 1),
    st.integers(1, 8),
)


@settings(max_examples=60, deadline=None)
@given(models)
def test_rows_sum_to_one_and_support(m):
    np.testing.assert_allclose(m.B.sum(axis=1), 1.0, atol=1e-12)
    g = m.graph
    for v in g.nodes:
        for i in g.nodes:
            assert (m.b(v, i) > 0) == (i in g.ancestors(v, include_self=True))


@settings(max_examples=60, deadline=None)
@given(models)
def test_bvv_cross_checks(m):
    for v in m.nodes:
        assert bvv_via_tournament(m.graph, m.theta, v) == pytest.approx(m.diag[v], abs=1e-12)
        assert bvv_path_sum(m.graph, m.theta, v) == pytest.approx(m.diag[v], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(models, st.integers(0, 2**32 - 1))
def test_stdf_homogeneous_and_convex(m, seed):
    r = np.random.default_rng(seed)
    x, y = r.uniform(0, 3, (2, len(m.nodes)))
    c = r.uniform(0.1, 10)
    assert abs(stdf(m, c * x) - c * stdf(m, x)) <= 1e-12 * max(1, c * stdf(m, x))
    assert stdf(m, 0.5 * (x + y)) <= 0.5 * (stdf(m, x) + stdf(m, y)) + 1e-12
    # bounds between max-norm and sum
    assert x.max() - 1e-12 <= stdf(m, x) <= x.sum() + 1e-12
