"""Betting e-processes for the mean of bounded observations.

Capital is ``prod_i (1 + lam_i (x_i - mu))``. Every strategy chooses
``lam_i`` from ``x_1..x_{i-1}``; the vectorised ``lambdas`` methods are
cumulative-sum forms of the sequential ``next_lambda`` rule and are tested
against it.
"""
from __future__ import annotations

import numpy as np
from scipy.special import softmax

from .._validation import check_scalar, check_sequence, check_unit_interval, check_weights
from ..core import EProcessTrace, PrefixView
from .models import BoundedMeanNull

__all__ = [
    "LambdaStrategy",
    "FixedLambda",
    "GridMixtureLambda",
    "AGRAPALambda",
    "bounded_mean_eprocess",
]

_SLACK = 1e-12


class LambdaStrategy:
    kind = "custom"

    def next_lambda(self, past, null):
        """Bet for the next observation given the revealed ``past``."""
        raise NotImplementedError

    def lambdas(self, x, null):
        x = np.asarray(x, dtype=float)
        return np.array([float(self.next_lambda(PrefixView(x, t), null)) for t in range(x.size)])

    def __repr__(self):
        fields = ", ".join(f"{k}={v!r}" for k, v in vars(self).items())
        return f"{type(self).__name__}({fields})"


class FixedLambda(LambdaStrategy):
    kind = "fixed"

    def __init__(self, lam):
        self.lam = check_scalar(lam, "lambda")

    def next_lambda(self, past, null):
        return self.lam

    def lambdas(self, x, null):
        return np.full(len(x), self.lam)


class GridMixtureLambda(LambdaStrategy):
    """Mixture of constant bets; capital equals ``sum_k w_k K_t(lam_k)``.

    The equivalent single bet at step t is the capital-weighted average of the
    grid, which stays inside the legal interval because the grid does.
    """

    kind = "grid-mixture"

    def __init__(self, grid, weights=None):
        self.grid = tuple(float(v) for v in check_sequence(grid, "grid", allow_empty=False))
        n = len(self.grid)
        w = np.full(n, 1.0 / n) if weights is None else check_weights(weights, n)
        self.weights = tuple(float(v) for v in w)

    def _arm_log_capital(self, x, null):
        lam = np.asarray(self.grid)[:, None]
        with np.errstate(divide="ignore"):
            steps = np.log(np.maximum(1.0 + lam * (np.asarray(x)[None, :] - null.mu), 0.0))
        return np.cumsum(steps, axis=1)

    def next_lambda(self, past, null):
        past = np.asarray(past)
        with np.errstate(divide="ignore"):
            logw = np.log(self.weights)
        if past.size:
            logw = logw + self._arm_log_capital(past, null)[:, -1]
        if np.all(logw == -np.inf):
            return 0.0
        return float(np.dot(softmax(logw), self.grid))

    def lambdas(self, x, null):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            logw = np.log(np.asarray(self.weights))[:, None]
        arms = np.concatenate((np.zeros((len(self.grid), 1)), self._arm_log_capital(x, null)[:, :-1]), axis=1)
        logits = logw + arms
        dead = np.all(logits == -np.inf, axis=0)
        logits[:, dead] = 0.0
        lam = softmax(logits, axis=0).T @ np.asarray(self.grid)
        lam[dead] = 0.0
        return lam


class AGRAPALambda(LambdaStrategy):
    """Plug-in bet ``(m - mu) / (v + (m - mu)^2)`` from a regularised running mean/variance.

    ``m`` and ``v`` start from ``prior_mean`` and ``prior_var`` with weight one
    pseudo-observation. The bet is clipped to half the legal interval.
    """

    kind = "agrapa"

    def __init__(self, prior_mean=0.5, prior_var=0.25):
        self.prior_mean = check_scalar(prior_mean, "prior_mean", 0.0, 1.0)
        self.prior_var = check_scalar(prior_var, "prior_var", 0.0, 0.25, low_open=True)

    def _bet(self, m, v, mu):
        lo, hi = -0.5 / (1.0 - mu), 0.5 / mu
        gap = m - mu
        return np.clip(gap / (v + gap * gap), lo, hi)

    def next_lambda(self, past, null):
        past = np.asarray(past, dtype=float)
        n = past.size
        means = (self.prior_mean + np.cumsum(past)) / np.arange(2, n + 2)
        m = means[-1] if n else self.prior_mean
        v = (self.prior_var + np.sum((past - means) ** 2)) / (n + 1)
        return float(self._bet(m, v, null.mu))

    def lambdas(self, x, null):
        x = np.asarray(x, dtype=float)
        n = x.size
        means = (self.prior_mean + np.cumsum(x)) / np.arange(2, n + 2)
        sq = np.cumsum((x - means) ** 2)
        m = np.concatenate(([self.prior_mean], means[:-1]))
        v = (self.prior_var + np.concatenate(([0.0], sq[:-1]))) / np.arange(1, n + 1)
        return self._bet(m, v, null.mu)


def bounded_mean_eprocess(null, strategy, data) -> EProcessTrace:
    """Capital of predictable bets against "the mean of [0, 1] data is ``mu``"."""
    if not isinstance(null, BoundedMeanNull):
        null = BoundedMeanNull(float(null))
    x = check_unit_interval(data)
    lam = np.asarray(strategy.lambdas(x, null), dtype=float)
    lo, hi = null.lambda_bounds
    if lam.shape != x.shape or np.isnan(lam).any():
        raise ValueError(f"{strategy!r} returned malformed bets")
    if (lam < lo - _SLACK).any() or (lam > hi + _SLACK).any():
        bad = int(np.flatnonzero((lam < lo - _SLACK) | (lam > hi + _SLACK))[0])
        raise ValueError(f"{strategy!r} emitted bet {lam[bad]!r} at t={bad + 1}, outside [{lo}, {hi}]")
    factors = np.maximum(1.0 + lam * (x - null.mu), 0.0)
    return EProcessTrace.from_factors(factors, f"bounded-mean/{strategy.kind}")
