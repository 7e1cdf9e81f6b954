import math
import warnings

import numpy as np
import pytest
from scipy import stats

import oracles
from evlab.core import PrefixView
from evlab.exceptions import LookaheadError, NullSupportWarning
from evlab.families import (
    AGRAPALambda,
    BernoulliFamily,
    BernoulliModel,
    BetaModel,
    BoundedMeanEProcess,
    BoundedMeanNull,
    CompositeNull,
    FixedLambda,
    FixedPlugin,
    GaussianMeanFamily,
    GaussianMeanPlugin,
    GaussianModel,
    GridMixtureLambda,
    Interval,
    KTPlugin,
    LikelihoodRatioEProcess,
    TTestPrior,
    bounded_mean_eprocess,
    gaussian_eprocess,
    gaussian_evar,
    gaussian_mixture_eprocess,
    glr,
    lr_eprocess,
    mixture_universal,
    mixture_universal_trace,
    universal_inference,
    universal_inference_trace,
)
from evlab.families.likelihood import PredictivePlugin, golden_section_max
from evlab.families.betting import LambdaStrategy


class TestModels:
    def test_bernoulli_logpdf(self):
        m = BernoulliModel(0.3)
        np.testing.assert_allclose(np.exp(m.logpdf([0, 1])), [0.7, 0.3])
        assert m.logpdf(0.5) == -np.inf

    def test_gaussian_logpdf_matches_scipy(self):
        m = GaussianModel(1.0, 2.0)
        x = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(m.logpdf(x), stats.norm(1, 2).logpdf(x), rtol=1e-13)

    def test_beta_logpdf_matches_scipy(self):
        m = BetaModel(2.0, 3.0)
        x = np.linspace(0.05, 0.95, 7)
        np.testing.assert_allclose(m.logpdf(x), stats.beta(2, 3).logpdf(x), rtol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            GaussianModel(0, 0)
        with pytest.raises(ValueError):
            BernoulliModel(1.2)
        with pytest.raises(ValueError):
            BoundedMeanNull(0.0)
        with pytest.raises(ValueError):
            TTestPrior((0.1, 0.2), (0.5, 0.6))

    def test_bounded_mean_bounds(self):
        assert BoundedMeanNull(0.25).lambda_bounds == (-1 / 0.75, 4.0)


class TestLikelihoodRatio:
    def test_identity(self):
        tr = lr_eprocess(BernoulliModel(0.5), BernoulliModel(0.5), [0, 1, 1, 0])
        np.testing.assert_allclose(tr.capital, 1.0)

    def test_examples(self):
        tr = lr_eprocess(BernoulliModel(0.5), BernoulliModel(0.7), [1, 1])
        np.testing.assert_allclose(tr.capital, [1.4, 1.96], rtol=1e-12)
        tr = lr_eprocess(GaussianModel(0, 1), GaussianModel(1, 1), [0.5])
        assert tr.final == pytest.approx(1.0, abs=1e-15)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=50)
        null, alt = GaussianModel(0, 1), GaussianModel(0.3, 1.2)
        want = oracles.lr_capital_loop(lambda v: stats.norm(0, 1).pdf(v), lambda v: stats.norm(0.3, 1.2).pdf(v), x)
        np.testing.assert_allclose(lr_eprocess(null, alt, x).capital, want, rtol=1e-10)

    def test_null_support_violation(self):
        with pytest.warns(NullSupportWarning):
            tr = lr_eprocess(BernoulliModel(0.0), BernoulliModel(0.5), [0, 1, 0])
        assert tr.capital[1] == math.inf and tr.capital[2] == math.inf

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            lr_eprocess(BernoulliModel(0.5), BernoulliModel(0.7), [0, math.nan])


class TestGaussianEvar:
    def test_examples(self):
        assert gaussian_evar(0, 1, 3.2).value == 1.0
        assert gaussian_evar(1, 1, 1).value == pytest.approx(math.exp(0.5), rel=1e-15)
        assert gaussian_evar(2, 1, 1).value == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("lam,sigma,x", [(0.3, 1.0, 0.7), (-1.2, 2.5, 1.1), (2.0, 0.4, -0.3)])
    def test_equals_lr_factor(self, lam, sigma, x):
        lr = lr_eprocess(GaussianModel(0, sigma), GaussianModel(sigma ** 2 * lam, sigma), [x]).final
        assert gaussian_evar(lam, sigma, x).value == pytest.approx(lr, rel=1e-12)

    def test_process_is_product(self):
        x = [0.2, -1.0, 0.5]
        prod = np.prod([gaussian_evar(0.4, 1.3, v).value for v in x])
        assert gaussian_eprocess(0.4, 1.3, x).final == pytest.approx(prod, rel=1e-12)

    def test_mixture_is_average(self):
        x = np.array([0.2, -1.0, 0.5])
        lams = (0.5, 1.0)
        want = np.mean([gaussian_eprocess(l, 1.0, x).capital for l in lams], axis=0)
        np.testing.assert_allclose(gaussian_mixture_eprocess(x, 1.0, lams).capital, want, rtol=1e-12)

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            gaussian_evar(1, 0, 1)


class TestBoundedMean:
    def test_examples(self):
        null = BoundedMeanNull(0.5)
        np.testing.assert_allclose(bounded_mean_eprocess(null, FixedLambda(0), [0.1, 0.9]).capital, 1.0)
        assert bounded_mean_eprocess(null, FixedLambda(2), [1]).final == 2.0
        assert bounded_mean_eprocess(null, FixedLambda(2), [0]).final == 0.0

    def test_rejects_data_outside_unit_interval(self):
        with pytest.raises(ValueError):
            bounded_mean_eprocess(0.5, FixedLambda(0.1), [0.5, 1.2])

    def test_rejects_illegal_lambda(self):
        with pytest.raises(ValueError, match="outside"):
            bounded_mean_eprocess(0.5, FixedLambda(2.5), [0.5])

    def test_matches_loop(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(size=40)
        strat = AGRAPALambda()
        null = BoundedMeanNull(0.4)
        lams = [strat.next_lambda(x[:t], null) for t in range(x.size)]
        want = oracles.bounded_mean_capital_loop(0.4, lams, x)
        np.testing.assert_allclose(bounded_mean_eprocess(null, strat, x).capital, want, rtol=1e-12)

    @pytest.mark.parametrize("mu", [0.2, 0.5, 0.8])
    def test_agrapa_vectorised_matches_sequential(self, mu):
        rng = np.random.default_rng(4)
        x = rng.beta(2, 3, size=60)
        strat = AGRAPALambda()
        null = BoundedMeanNull(mu)
        seq = [strat.next_lambda(PrefixView(x, t), null) for t in range(x.size)]
        np.testing.assert_allclose(strat.lambdas(x, null), seq, rtol=1e-12, atol=1e-15)
        oracle = [oracles.agrapa_lambda_loop(list(x[:t]), mu) for t in range(x.size)]
        np.testing.assert_allclose(seq, oracle, rtol=1e-10, atol=1e-14)

    def test_agrapa_half_interval(self):
        strat = AGRAPALambda()
        null = BoundedMeanNull(0.3)
        lam = strat.lambdas(np.ones(50), null)
        assert lam.max() <= 0.5 / 0.3 + 1e-15
        lam = strat.lambdas(np.zeros(50), null)
        assert lam.min() >= -0.5 / 0.7 - 1e-15

    def test_grid_mixture_equals_average_of_fixed(self):
        rng = np.random.default_rng(5)
        x = rng.uniform(size=30)
        grid = (-1.0, -0.3, 0.4, 1.5)
        null = BoundedMeanNull(0.5)
        mix = bounded_mean_eprocess(null, GridMixtureLambda(grid), x).capital
        arms = [bounded_mean_eprocess(null, FixedLambda(g), x).capital for g in grid]
        np.testing.assert_allclose(mix, np.mean(arms, axis=0), rtol=1e-10)

    def test_grid_mixture_vectorised_matches_sequential(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(size=25)
        strat = GridMixtureLambda((-1.0, 0.5, 1.9), (0.2, 0.3, 0.5))
        null = BoundedMeanNull(0.5)
        seq = [strat.next_lambda(PrefixView(x, t), null) for t in range(x.size)]
        np.testing.assert_allclose(strat.lambdas(x, null), seq, rtol=1e-12)

    def test_strategy_cannot_peek(self):
        class Peeking(LambdaStrategy):
            def next_lambda(self, past, null):
                return 0.1 * past[len(past)]

        with pytest.raises(LookaheadError):
            bounded_mean_eprocess(0.5, Peeking(), [0.2, 0.4])

    def test_estimator_strategies(self):
        x = np.array([0.9, 0.8, 0.95, 0.7])
        for strategy in ("agrapa", "fixed", "grid"):
            est = BoundedMeanEProcess(0.5, strategy, lam=1.0)
            assert est(x).final > 1.0
        with pytest.raises(ValueError):
            BoundedMeanEProcess(0.5, "bogus")(x)


class TestUniversalInference:
    def test_plugin_equal_to_null(self):
        x = [0, 1, 1, 0, 1]
        tr = universal_inference_trace(BernoulliModel(0.5), FixedPlugin(BernoulliModel(0.5)), x)
        np.testing.assert_allclose(tr.capital, 1.0)

    def test_composite_boundary_mle(self):
        null = CompositeNull(BernoulliFamily(), Interval(0.0, 1.0))
        assert universal_inference(null, FixedPlugin(BernoulliModel(0.5)), [1]).value == pytest.approx(0.5)
        grid = np.linspace(0, 1, 10 ** 4)
        fam = BernoulliFamily()
        assert grid[np.argmax(fam.loglik(grid, [1.0]))] == 1.0

    def test_batch_equals_trace_end(self):
        rng = np.random.default_rng(7)
        x = (rng.random(30) < 0.6).astype(float)
        null = CompositeNull(BernoulliFamily(), Interval(0.0, 0.5))
        batch = universal_inference(null, KTPlugin(), x).value
        assert universal_inference_trace(null, KTPlugin(), x).final == pytest.approx(batch, rel=1e-12)

    def test_prefix_mle_is_refit(self):
        x = np.array([1.0, 1.0, 0.0, 1.0])
        null = CompositeNull(BernoulliFamily(), Interval(0.0, 0.5))
        tr = universal_inference_trace(null, KTPlugin(), x)
        for t in range(1, 5):
            grid = np.linspace(0, 0.5, 200001)
            den = np.max(BernoulliFamily().loglik(grid, x[:t]))
            num = np.sum(KTPlugin().log_predictive(x[:t]))
            assert tr.log_capital[t - 1] == pytest.approx(num - den, abs=1e-8)

    def test_kt_plugin_vectorised_matches_predict(self):
        x = np.array([1, 0, 0, 1, 1, 1, 0], dtype=float)
        plug = KTPlugin()
        seq = PredictivePlugin.log_predictive(plug, x)
        np.testing.assert_allclose(plug.log_predictive(x), seq, rtol=1e-14)

    def test_gaussian_plugin_vectorised_matches_predict(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=20)
        plug = GaussianMeanPlugin(1.0, 0.0, 1.0, Interval(0.0, 5.0))
        seq = PredictivePlugin.log_predictive(plug, x)
        np.testing.assert_allclose(plug.log_predictive(x), seq, rtol=1e-12)

    def test_plugin_cannot_peek(self):
        class Peeking(PredictivePlugin):
            def predict(self, past):
                return BernoulliModel(0.5 if past[len(past)] else 0.4)

        with pytest.raises(LookaheadError):
            universal_inference_trace(BernoulliModel(0.5), Peeking(), [1.0, 0.0])

    def test_zero_numerator_stays_zero(self):
        tr = universal_inference_trace(BernoulliModel(0.5), FixedPlugin(BernoulliModel(1.0)), [1, 0, 1])
        np.testing.assert_array_equal(tr.capital[1:], 0.0)

    def test_gaussian_composite_null(self):
        null = CompositeNull(GaussianMeanFamily(1.0), Interval(-np.inf, 0.0))
        x = np.array([0.5, 1.0, 2.0])
        tr = universal_inference_trace(null, GaussianMeanPlugin(1.0), x)
        fam = GaussianMeanFamily(1.0)
        for t in range(1, 4):
            mu_hat = min(0.0, x[:t].mean())
            num = np.sum(GaussianMeanPlugin(1.0).log_predictive(x[:t]))
            assert tr.log_capital[t - 1] == pytest.approx(num - fam.loglik(mu_hat, x[:t]), abs=1e-12)


class TestMixtureUniversal:
    def test_examples(self):
        x = np.array([1.0, 0.0, 1.0, 1.0])
        null = BernoulliModel(0.5)
        q = BernoulliModel(0.7)
        single = mixture_universal(null, [q], [1.0], x).value
        assert single == pytest.approx(universal_inference(null, FixedPlugin(q), x).value, rel=1e-12)
        double = mixture_universal(null, [q, q], [0.5, 0.5], x).value
        assert double == pytest.approx(single, rel=1e-12)
        sym = mixture_universal(null, [BernoulliModel(0.3), BernoulliModel(0.7)], [0.5, 0.5], [1]).value
        assert sym == pytest.approx(1.0, rel=1e-12)

    def test_trace_matches_direct_sum(self):
        x = np.array([1.0, 1.0, 0.0, 1.0])
        null = CompositeNull(BernoulliFamily(), Interval(0.0, 0.5))
        grid = [BernoulliModel(0.6), BernoulliModel(0.9)]
        tr = mixture_universal_trace(null, grid, [0.3, 0.7], x)
        for t in range(1, 5):
            mle = min(0.5, x[:t].mean())
            den = oracles.bernoulli_prob(tuple(x[:t].astype(int)), mle)
            num = 0.3 * oracles.bernoulli_prob(tuple(x[:t].astype(int)), 0.6) + \
                0.7 * oracles.bernoulli_prob(tuple(x[:t].astype(int)), 0.9)
            assert tr.capital[t - 1] == pytest.approx(num / den, rel=1e-12)

    def test_rejects_bad_prior(self):
        with pytest.raises(ValueError):
            mixture_universal(BernoulliModel(0.5), [BernoulliModel(0.7)], [0.5], [1])


class TestGLR:
    def test_identical_sets(self):
        x = np.array([0.3, -0.2, 1.1])
        fam = GaussianMeanFamily(1.0)
        assert glr(Interval(-1, 1), Interval(-1, 1), fam, x) == pytest.approx(1.0, rel=1e-12)

    def test_gaussian_analytic(self):
        x = np.array([0.2, 1.8, 0.5, 1.5])  # mean 1
        g = glr(Interval.point(0.0), Interval(-10, 10), GaussianMeanFamily(1.0), x)
        assert g == pytest.approx(math.exp(2.0), rel=1e-10)

    def test_empty_data(self):
        assert glr(Interval.point(0.0), Interval(-1, 1), GaussianMeanFamily(1.0), []) == 1.0

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            glr([], Interval(-1, 1), GaussianMeanFamily(1.0), [0.1])

    def test_grid_sets(self):
        x = np.array([1.0, 1.0, 0.0])
        fam = BernoulliFamily()
        g = glr([0.5], [0.6, 2 / 3, 0.9], fam, x)
        want = (2 / 3) ** 2 * (1 / 3) / 0.125
        assert g == pytest.approx(want, rel=1e-12)

    def test_dominates_universal_inference(self):
        rng = np.random.default_rng(9)
        fam = BernoulliFamily()
        for _ in range(20):
            x = (rng.random(15) < 0.7).astype(float)
            g = glr(Interval.point(0.5), Interval(0.0, 1.0), fam, x)
            for q in (0.6, 0.8):
                u = universal_inference(BernoulliModel(0.5), FixedPlugin(BernoulliModel(q)), x).value
                assert g >= u * (1 - 1e-12)

    def test_golden_section(self):
        arg, val = golden_section_max(lambda v: -(v - 0.3) ** 2, 0, 1, tol=1e-10)
        assert arg == pytest.approx(0.3, abs=1e-8)


class TestEstimators:
    def test_sklearn_protocol(self):
        from sklearn.base import clone

        est = LikelihoodRatioEProcess(BernoulliModel(0.5), BernoulliModel(0.7))
        params = est.get_params()
        assert params["alt"] == BernoulliModel(0.7)
        est2 = clone(est).set_params(alt=BernoulliModel(0.9))
        x = np.array([1.0, 1.0, 0.0])
        est2.fit(x)
        assert est2.capital_ == pytest.approx(1.8 * 1.8 * 0.2, rel=1e-12)
        assert est2.n_steps_ == 3
        np.testing.assert_allclose(est2.transform(x), est2(x).capital)
        assert est2.score(x) == pytest.approx(math.log(1.8 * 1.8 * 0.2))

    def test_unfitted(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            LikelihoodRatioEProcess().capital_

    def test_column_input(self):
        x = np.array([[1.0], [0.0]])
        est = LikelihoodRatioEProcess().fit(x)
        assert est.n_steps_ == 2
