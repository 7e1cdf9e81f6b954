import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from evlab.calibrate import (
    MIXTURE_CALIBRATOR,
    calibrated_eprocess,
    fisher_combine,
    mixture_calibrator,
    power_calibrator,
    verify_calibrator,
)
from evlab.core import e_to_p


class TestPower:
    def test_examples(self):
        assert power_calibrator(0.5)(0.25).value == pytest.approx(1.0, rel=1e-14)
        assert power_calibrator(0.5)(1.0).value == pytest.approx(0.5, rel=1e-14)

    def test_rejects_kappa(self):
        for k in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                power_calibrator(k)

    def test_rejects_p(self):
        for p in (0.0, -0.1, 1.1, math.nan):
            with pytest.raises(ValueError):
                power_calibrator(0.5)(p)

    @pytest.mark.parametrize("kappa", [0.05, 0.3, 0.5, 0.9])
    def test_admissible(self, kappa):
        rep = verify_calibrator(power_calibrator(kappa))
        assert rep.monotone and rep.passed
        assert rep.integral == pytest.approx(1.0, abs=1e-9)


class TestMixture:
    def test_examples(self):
        assert mixture_calibrator(1.0).value == pytest.approx(0.5, rel=1e-14)
        want = (math.e ** 2 - 3) / 4
        assert mixture_calibrator(math.exp(-2)).value == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("p", [1e-300, 1e-12, 1e-4, 0.01, 0.2, 0.9, 0.96, 0.999, 1.0])
    def test_against_quadrature(self, p):
        assert MIXTURE_CALIBRATOR.evaluate([p])[0] == pytest.approx(oracles.mixture_calibrator_quad(p), rel=1e-10)

    def test_branch_continuity(self):
        lp = np.array([-0.05 - 1e-12, -0.05 + 1e-12])
        v = MIXTURE_CALIBRATOR.evaluate(np.exp(lp))
        assert v[0] == pytest.approx(v[1], rel=1e-10)

    def test_admissible(self):
        rep = verify_calibrator(MIXTURE_CALIBRATOR)
        assert rep.monotone and rep.passed
        assert rep.integral == pytest.approx(1.0, abs=1e-9)

    def test_tiny_p_finite(self):
        assert math.isfinite(mixture_calibrator(1e-300).value)


class TestVerify:
    def test_constant_two_fails(self):
        rep = verify_calibrator(lambda p: 2.0)
        assert rep.monotone and not rep.passed
        assert rep.integral == pytest.approx(2.0, rel=1e-9)

    def test_constant_one_passes(self):
        assert verify_calibrator(lambda p: 1.0).passed

    def test_increasing_fails(self):
        rep = verify_calibrator(lambda p: p)
        assert not rep.monotone and not rep.passed

    def test_plain_callable_matches(self):
        c = power_calibrator(0.4)
        rep = verify_calibrator(lambda p: c(p).value)
        assert rep.integral == pytest.approx(1.0, abs=1e-7)


@given(st.floats(1e-12, 1.0), st.floats(0.01, 0.99))
def test_calibrated_value_dominates_p(p, kappa):
    # f(p) <= 1/p for an admissible decreasing calibrator, so e_to_p(f(p)) >= p
    assert e_to_p(power_calibrator(kappa)(p).value) >= p * (1 - 1e-12)
    assert e_to_p(mixture_calibrator(p).value) >= p * (1 - 1e-12)


class TestFisher:
    def test_example(self):
        got = fisher_combine([0.05, 0.05])
        assert got == pytest.approx(oracles.chi2_sf_quad(-4 * math.log(0.05), 4), rel=1e-10)
        assert got == pytest.approx(0.01747, abs=1e-5)

    def test_single_is_identity(self):
        assert fisher_combine([0.3]) == pytest.approx(0.3, rel=1e-12)

    @pytest.mark.parametrize("p", [0.001, 0.05, 0.4])
    def test_extra_one_adds_degrees_of_freedom(self, p):
        assert fisher_combine([p, 1.0]) == pytest.approx(oracles.chi2_sf_quad(-2 * math.log(p), 4), rel=1e-9)

    def test_all_ones(self):
        assert fisher_combine([1.0, 1.0, 1.0]) == 1.0

    @given(st.lists(st.floats(1e-8, 1.0), min_size=2, max_size=6))
    def test_symmetric(self, ps):
        assert fisher_combine(ps) == fisher_combine(ps[::-1])

    def test_rejects(self):
        for bad in ([], [0.0, 0.5], [1.2]):
            with pytest.raises(ValueError):
                fisher_combine(bad)

    def test_uniform_under_null(self):
        rng = np.random.default_rng(11)
        p = rng.uniform(size=(20000, 3))
        hits = np.mean([fisher_combine(row) <= 0.05 for row in p])
        se = math.sqrt(0.05 * 0.95 / 20000)
        assert abs(hits - 0.05) <= 4 * se


def test_calibrated_eprocess_product():
    p = [0.5, 0.1, 0.02]
    c = power_calibrator(0.5)
    tr = calibrated_eprocess(p, c)
    want = np.cumprod([c(v).value for v in p])
    np.testing.assert_allclose(tr.capital, want, rtol=1e-12)
