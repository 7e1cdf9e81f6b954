"""Estimator-style wrappers around the e-process constructors.

Each class follows the scikit-learn conventions: hyper-parameters are set in
``__init__`` and exposed through ``get_params``/``set_params``; ``fit(X)``
consumes one data stream and stores the capital trace in ``trace_``;
``transform(X)`` returns the capital path of ``X``. Instances are also plain
callables ``data -> EProcessTrace`` so the Monte Carlo harness can use them
directly, and ``get_params`` is what ends up in report metadata.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_sequence
from ..core import EProcessTrace
from .betting import AGRAPALambda, FixedLambda, GridMixtureLambda, bounded_mean_eprocess
from .likelihood import (
    DEFAULT_LAMBDA_GRID,
    gaussian_eprocess,
    gaussian_mixture_eprocess,
    lr_eprocess,
    mixture_universal_trace,
    universal_inference_trace,
)
from .models import BernoulliModel, BoundedMeanNull, TTestPrior
from .ttest import ttest_eprocess

__all__ = [
    "EProcessEstimator",
    "ConstantEProcess",
    "LikelihoodRatioEProcess",
    "GaussianEProcess",
    "GaussianMixtureEProcess",
    "BoundedMeanEProcess",
    "UniversalInferenceEProcess",
    "MixtureUniversalEProcess",
    "TTestEProcess",
]


class EProcessEstimator(TransformerMixin, BaseEstimator):
    """Base class; subclasses implement ``_trace(x)``."""

    def _trace(self, x) -> EProcessTrace:
        raise NotImplementedError

    def __call__(self, data) -> EProcessTrace:
        return self._trace(check_sequence(data))

    def fit(self, X, y=None):
        x = check_sequence(np.ravel(X))
        self.trace_ = self._trace(x)
        self.n_steps_ = len(x)
        return self

    def transform(self, X):
        return self(np.ravel(X)).capital

    def score(self, X, y=None):
        """Final log-capital on ``X`` (the growth criterion's summand)."""
        return self(np.ravel(X)).log_final

    @property
    def capital_(self):
        check_is_fitted(self, "trace_")
        return self.trace_.final


class ConstantEProcess(EProcessEstimator):
    """Never bets: capital is identically 1. The powerless baseline."""

    def _trace(self, x):
        return EProcessTrace.constant(len(x))


class LikelihoodRatioEProcess(EProcessEstimator):
    def __init__(self, null=BernoulliModel(0.5), alt=BernoulliModel(0.7)):
        self.null = null
        self.alt = alt

    def _trace(self, x):
        return lr_eprocess(self.null, self.alt, x)


class GaussianEProcess(EProcessEstimator):
    """``exp(lam * S_t - t lam^2 sigma^2 / 2)``; ``center`` is subtracted from the data first."""

    def __init__(self, lam=0.5, sigma=1.0, center=0.0):
        self.lam = lam
        self.sigma = sigma
        self.center = center

    def _trace(self, x):
        return gaussian_eprocess(self.lam, self.sigma, x - self.center)


class GaussianMixtureEProcess(EProcessEstimator):
    def __init__(self, sigma=1.0, lambdas=DEFAULT_LAMBDA_GRID, weights=None, center=0.0):
        self.sigma = sigma
        self.lambdas = lambdas
        self.weights = weights
        self.center = center

    def _trace(self, x):
        return gaussian_mixture_eprocess(x - self.center, self.sigma, self.lambdas, self.weights)


class BoundedMeanEProcess(EProcessEstimator):
    """Betting e-process for the mean of [0, 1] data.

    ``strategy`` is ``"agrapa"``, ``"fixed"`` (uses ``lam``), ``"grid"``
    (uses ``grid``) or any :class:`LambdaStrategy` instance.
    """

    def __init__(self, mu=0.5, strategy="agrapa", lam=0.0, grid=None):
        self.mu = mu
        self.strategy = strategy
        self.lam = lam
        self.grid = grid

    def _strategy(self):
        if not isinstance(self.strategy, str):
            return self.strategy
        if self.strategy == "agrapa":
            return AGRAPALambda()
        if self.strategy == "fixed":
            return FixedLambda(self.lam)
        if self.strategy == "grid":
            lo, hi = BoundedMeanNull(self.mu).lambda_bounds
            grid = self.grid if self.grid is not None else np.linspace(0.5 * lo, 0.5 * hi, 11)
            return GridMixtureLambda(grid)
        raise ValueError(f"unknown strategy {self.strategy!r}")

    def _trace(self, x):
        return bounded_mean_eprocess(BoundedMeanNull(self.mu), self._strategy(), x)


class UniversalInferenceEProcess(EProcessEstimator):
    def __init__(self, null=None, plugin=None):
        self.null = null
        self.plugin = plugin

    def _trace(self, x):
        return universal_inference_trace(self.null, self.plugin, x)


class MixtureUniversalEProcess(EProcessEstimator):
    def __init__(self, null=None, alt_grid=(), prior=None):
        self.null = null
        self.alt_grid = alt_grid
        self.prior = prior

    def _trace(self, x):
        prior = self.prior if self.prior is not None else np.full(len(self.alt_grid), 1.0 / len(self.alt_grid))
        return mixture_universal_trace(self.null, list(self.alt_grid), prior, x)


class TTestEProcess(EProcessEstimator):
    def __init__(self, support=(-0.5, 0.5), weights=(0.5, 0.5), method="quad"):
        self.support = support
        self.weights = weights
        self.method = method

    def _trace(self, x):
        return ttest_eprocess(TTestPrior(tuple(self.support), tuple(self.weights)), x, self.method)
