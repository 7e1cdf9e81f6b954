import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from evlab.families import TTestPrior, ttest_eprocess
from evlab.families.ttest import ttest_log_bf_fast, ttest_log_bf_quad


POINT = TTestPrior((0.5,), (1.0,))
TWO = TTestPrior((-0.5, 0.5), (0.5, 0.5))


def test_null_point_prior_is_one():
    x = np.random.default_rng(0).normal(size=20)
    tr = ttest_eprocess(TTestPrior((0.0,), (1.0,)), x)
    np.testing.assert_allclose(tr.capital, 1.0, rtol=1e-9)


def test_leading_zeros_give_one():
    tr = ttest_eprocess(POINT, [0.0, 0.0, 1.2, -0.3])
    assert tr.capital[0] == tr.capital[1] == 1.0


def test_empty_rejected():
    with pytest.raises(ValueError):
        ttest_eprocess(POINT, [])


def test_unknown_method():
    with pytest.raises(ValueError):
        ttest_eprocess(POINT, [1.0], method="bogus")


@pytest.mark.parametrize("c", [1e-3, 0.37, 8.0, 1e3])
def test_scale_invariance(c):
    x = np.random.default_rng(1).normal(0.3, 1.0, size=15)
    a = ttest_log_bf_quad(TWO, x)
    b = ttest_log_bf_quad(TWO, c * x)
    np.testing.assert_allclose(b, a, atol=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_quad_matches_riemann_oracle(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(rng.uniform(-1, 1), rng.uniform(0.2, 4), size=int(rng.integers(2, 30)))
    prior = TTestPrior((-0.7, 0.2, 1.0), (0.2, 0.5, 0.3))
    got = ttest_eprocess(prior, x).final
    assert got == pytest.approx(oracles.ttest_bf_riemann(prior.support, prior.weights, x), rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_fast_matches_quad(seed):
    rng = np.random.default_rng(100 + seed)
    x = rng.normal(rng.uniform(-1, 1), rng.uniform(0.2, 4), size=60)
    np.testing.assert_allclose(ttest_log_bf_fast(TWO, x), ttest_log_bf_quad(TWO, x), atol=1e-8)


@given(st.lists(st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3), min_size=2, max_size=12),
       st.floats(-1.5, 1.5))
def test_fast_matches_quad_property(xs, delta):
    prior = TTestPrior((delta,), (1.0,))
    fast = ttest_log_bf_fast(prior, xs)
    quad = ttest_log_bf_quad(prior, xs)
    np.testing.assert_allclose(fast, quad, atol=1e-7, rtol=1e-9)


def test_sign_symmetry():
    x = np.random.default_rng(3).normal(size=10)
    a = ttest_eprocess(TTestPrior((0.5,), (1.0,)), x).capital
    b = ttest_eprocess(TTestPrior((-0.5,), (1.0,)), -x).capital
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_grows_under_alternative():
    x = np.random.default_rng(4).normal(1.0, 2.0, size=200)
    assert ttest_eprocess(POINT, x, method="fast").final > 1e3
