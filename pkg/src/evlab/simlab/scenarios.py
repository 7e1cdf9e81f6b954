"""Replays of optional-stopping and optional-continuation protocols under the null.

All data-dependent decisions below are functions of running sums (or of a
completed first batch), so each decision at time t uses only ``x_1..x_t``.
Batch-two data is drawn only once the continuation decision has been made.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats
from scipy.special import erfc

from .._validation import check_alpha
from ..calibrate import MIXTURE_CALIBRATOR, fisher_combine
from ..compress import KT, compression_eprocess
from ..families.likelihood import gaussian_mixture_eprocess
from .config import ScenarioSpec, SimConfig, SimReport
from .harness import _metadata, run_replications

__all__ = ["p_hacking_replay", "two_batch_replay", "two_ones_replay", "glr_inflation", "z_test_pvalue"]

_SQRT2 = math.sqrt(2.0)


def z_test_pvalue(total, n, sigma=1.0):
    """Two-sided p-value of the known-variance z-test of mean 0 from ``sum x`` over ``n`` points."""
    z = np.asarray(total, dtype=float) / (sigma * np.sqrt(n))
    return erfc(np.abs(z) / _SQRT2)


def _require(spec, kind):
    if not isinstance(spec, ScenarioSpec) or spec.kind != kind:
        raise ValueError(f"expected a ScenarioSpec of kind {kind!r}")


def p_hacking_replay(spec: ScenarioSpec, cfg: SimConfig) -> dict:
    """Stop at the first look with z-test ``p < alpha`` (or at ``max_n``) under N(0, sigma^2).

    Returns ``{"naive": ..., "eprocess": ...}``: the rate at which the p-value
    at the stopped sample is below alpha, and the rate at which the Gaussian
    mixture e-process reaches ``1/alpha`` at any t up to ``max_n``.
    """
    _require(spec, "stop-when-significant")
    alpha, n, sigma = spec.alpha, spec.max_n, spec.sigma
    looks = spec.look_indices()
    t = np.arange(1, n + 1)
    threshold = 1.0 / alpha

    def one(rng, i):
        if n == 0 or looks.size == 0:
            return 0.0, 0.0, float(n)
        x = sigma * rng.standard_normal(n)
        p = z_test_pvalue(np.cumsum(x)[looks], t[looks], sigma)
        hits = np.flatnonzero(p < alpha)
        stop = hits[0] if hits.size else looks.size - 1
        crossed = gaussian_mixture_eprocess(x, sigma, spec.lambdas).capital.max() >= threshold
        return float(p[stop] < alpha), float(crossed), float(looks[stop] + 1)

    out = run_replications(one, cfg, width=3)
    meta = _metadata("p_hacking_replay", cfg, scenario=spec)
    stop_n = {"mean_stopped_n": math.fsum(out[:, 2]) / cfg.reps}
    return {
        "naive": SimReport.from_samples(out[:, 0], cfg.seed, dict(meta, statistic="naive-p-rejection"), stop_n),
        "eprocess": SimReport.from_samples(out[:, 1], cfg.seed, dict(meta, statistic="eprocess-crossing")),
    }


def two_batch_replay(spec: ScenarioSpec, cfg: SimConfig) -> dict:
    """Continue-if-promising protocol under N(0, sigma^2).

    Batch one gives a z-test p-value ``p1`` and a mixture e-value ``E1``. A
    second batch is collected only when ``low < p1 <= high``. Reported
    rejection rates at level alpha:

    ``fisher``      Fisher's combination of ``p1, p2`` treated as independent
    ``pooled``      one z-test on all collected data, as if n were fixed
    ``product``     ``E1 * E2 >= 1/alpha``
    ``calibrated``  ``f(p1) * f(p2) >= 1/alpha`` with ``f`` the mixture calibrator

    Without continuation every route falls back to batch one alone.
    """
    _require(spec, "two-batch-continuation")
    alpha, sigma = spec.alpha, spec.sigma
    n1, n2 = spec.batch_sizes
    low, high = spec.band
    threshold = 1.0 / alpha

    def batch(rng, n):
        x = sigma * rng.standard_normal(n)
        total = math.fsum(x)
        p = float(z_test_pvalue(total, n, sigma))
        e = gaussian_mixture_eprocess(x, sigma, spec.lambdas).final
        return total, p, e

    def one(rng, i):
        s1, p1, e1 = batch(rng, n1)
        f1 = MIXTURE_CALIBRATOR.evaluate([p1])[0]
        if not low < p1 <= high:
            reject = float(p1 < alpha)
            return reject, reject, float(e1 >= threshold), float(f1 >= threshold), 0.0
        s2, p2, e2 = batch(rng, n2)
        f2 = MIXTURE_CALIBRATOR.evaluate([p2])[0]
        p_pooled = float(z_test_pvalue(s1 + s2, n1 + n2, sigma))
        return (float(fisher_combine([p1, p2]) < alpha), float(p_pooled < alpha),
                float(e1 * e2 >= threshold), float(f1 * f2 >= threshold), 1.0)

    out = run_replications(one, cfg, width=5)
    meta = _metadata("two_batch_replay", cfg, scenario=spec)
    extras = {"continuation_frequency": math.fsum(out[:, 4]) / cfg.reps}
    names = ("fisher", "pooled", "product", "calibrated")
    return {name: SimReport.from_samples(out[:, k], cfg.seed, dict(meta, statistic=name), extras)
            for k, name in enumerate(names)}


def two_ones_replay(spec: ScenarioSpec, cfg: SimConfig) -> dict:
    """Fair-coin data, stop at the first look completing two 1s in a row (or at ``max_n``).

    ``naive`` is the rate at which the one-sided binomial p-value computed as
    if the stopped n were fixed falls below alpha; ``eprocess`` is the rate at
    which the KT compression e-process reaches ``1/alpha`` by the stopping
    time; ``stopped_capital`` estimates its mean capital there.
    """
    _require(spec, "two-ones-in-a-row")
    alpha, n, theta = spec.alpha, spec.max_n, spec.theta
    looks = spec.look_indices()
    threshold = 1.0 / alpha

    def one(rng, i):
        if n == 0 or looks.size == 0:
            return 0.0, 0.0, 1.0, 0.0
        x = (rng.random(n) < theta).astype(np.int8)
        pair = np.zeros(n, dtype=bool)
        pair[1:] = (x[1:] == 1) & (x[:-1] == 1)
        hits = np.flatnonzero(pair[looks])
        tau = int(looks[hits[0]] if hits.size else looks[-1]) + 1
        ones = int(x[:tau].sum())
        p_naive = float(stats.binom.sf(ones - 1, tau, 0.5))
        capital = compression_eprocess(x[:tau], KT).capital
        return float(p_naive < alpha), float(capital.max() >= threshold), capital[-1], float(tau)

    out = run_replications(one, cfg, width=4)
    meta = _metadata("two_ones_replay", cfg, scenario=spec)
    extras = {"mean_stopped_n": math.fsum(out[:, 3]) / cfg.reps}
    return {
        "naive": SimReport.from_samples(out[:, 0], cfg.seed, dict(meta, statistic="naive-p-rejection"), extras),
        "eprocess": SimReport.from_samples(out[:, 1], cfg.seed, dict(meta, statistic="eprocess-crossing"), extras),
        "stopped_capital": SimReport.from_samples(out[:, 2], cfg.seed, dict(meta, statistic="stopped-capital"), extras),
    }


def glr_inflation(cfg: SimConfig, max_n=None, alpha=None, sigma=1.0) -> SimReport:
    """Rate at which ``sup_mu L(mu) / L(0) >= 1/alpha`` for some t <= max_n under N(0, sigma^2).

    With known variance the GLR is ``exp(S_t^2 / (2 t sigma^2))``.
    """
    alpha = check_alpha(cfg.alpha if alpha is None else alpha)
    n = cfg.horizon if max_n is None else int(max_n)
    if n < 0:
        raise ValueError("max_n must be nonnegative")
    log_threshold = -math.log(alpha)
    t = np.arange(1, n + 1)

    def one(rng, i):
        if n == 0:
            return 0.0
        s = np.cumsum(sigma * rng.standard_normal(n))
        return float(np.any(s * s / (2.0 * t * sigma * sigma) >= log_threshold))

    values = run_replications(one, cfg)
    meta = _metadata("glr_inflation", cfg, max_n=n, alpha=alpha, sigma=sigma)
    return SimReport.from_samples(values, cfg.seed, meta)
