"""Likelihood-ratio style e-statistics and the GLR comparator."""
from __future__ import annotations

import math
import warnings

import numpy as np

from .._validation import check_scalar, check_sequence, check_weights
from ..core import EProcessTrace, EValueSample, PrefixView
from ..exceptions import NullSupportWarning
from .models import BernoulliModel, CompositeNull, GaussianModel, Interval, as_null, as_param_set

__all__ = [
    "lr_eprocess",
    "gaussian_evar",
    "gaussian_eprocess",
    "gaussian_mixture_eprocess",
    "PredictivePlugin",
    "FixedPlugin",
    "KTPlugin",
    "GaussianMeanPlugin",
    "universal_inference",
    "universal_inference_trace",
    "mixture_universal",
    "mixture_universal_trace",
    "glr",
    "golden_section_max",
    "DEFAULT_LAMBDA_GRID",
]

DEFAULT_LAMBDA_GRID = (-1.6, -0.8, -0.4, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6)


def _ratio_logs(log_num, log_den):
    """``log_num - log_den`` with 0/0 and x/0 mapped to +inf (null refuted)."""
    with np.errstate(invalid="ignore"):
        out = log_num - log_den
    null_zero = log_den == -np.inf
    if null_zero.any():
        warnings.warn("observation has zero density under the null; capital is +inf",
                      NullSupportWarning, stacklevel=3)
        out = np.where(null_zero, np.inf, out)
    return out


def lr_eprocess(null, alt, data) -> EProcessTrace:
    """Running likelihood ratio ``prod_i q(x_i) / p(x_i)`` for iid models."""
    x = check_sequence(data)
    log_factors = _ratio_logs(alt.logpdf(x), null.logpdf(x))
    return EProcessTrace.from_log_factors(log_factors, "likelihood-ratio")


def gaussian_evar(lam, sigma, x) -> EValueSample:
    """``exp(lam * x - lam^2 sigma^2 / 2)``, an e-variable for N(0, sigma^2)."""
    lam = check_scalar(lam, "lambda")
    sigma = check_scalar(sigma, "sigma", 0.0, math.inf, low_open=True)
    x = check_scalar(x, "x")
    return EValueSample(math.exp(lam * x - 0.5 * lam * lam * sigma * sigma), "gaussian")


def gaussian_eprocess(lam, sigma, data) -> EProcessTrace:
    lam = check_scalar(lam, "lambda")
    sigma = check_scalar(sigma, "sigma", 0.0, math.inf, low_open=True)
    x = check_sequence(data)
    return EProcessTrace.from_log_factors(lam * x - 0.5 * lam * lam * sigma * sigma, "gaussian")


def gaussian_mixture_eprocess(data, sigma=1.0, lambdas=DEFAULT_LAMBDA_GRID, weights=None) -> EProcessTrace:
    """Average of Gaussian e-processes over a finite grid of bets."""
    sigma = check_scalar(sigma, "sigma", 0.0, math.inf, low_open=True)
    x = check_sequence(data)
    lam = check_sequence(lambdas, "lambdas", allow_empty=False)
    w = np.full(lam.size, 1.0 / lam.size) if weights is None else check_weights(weights, lam.size)
    t = np.arange(1, x.size + 1)
    s = np.cumsum(x)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    log_k = np.logaddexp.reduce(logw[:, None] + lam[:, None] * s - 0.5 * (lam[:, None] * sigma) ** 2 * t, axis=0)
    return EProcessTrace.from_log_capital(log_k, "gaussian-mixture")


# predictable plug-in alternatives -------------------------------------------------

class PredictivePlugin:
    """A density for ``x_i`` chosen from ``x_1..x_{i-1}`` only.

    Subclasses implement :meth:`predict` (the model to use after seeing
    ``past``); :meth:`log_predictive` evaluates ``log q_i(x_i)`` along a whole
    sequence. The default loop hands ``predict`` a :class:`PrefixView`, so a
    plug-in that peeks ahead fails with ``LookaheadError``.
    """

    def predict(self, past):
        raise NotImplementedError

    def log_predictive(self, x):
        x = np.asarray(x, dtype=float)
        return np.array([float(self.predict(PrefixView(x, i)).logpdf(x[i])) for i in range(x.size)])

    def __repr__(self):
        fields = ", ".join(f"{k}={v!r}" for k, v in vars(self).items())
        return f"{type(self).__name__}({fields})"


class FixedPlugin(PredictivePlugin):
    """The same alternative density at every step."""

    def __init__(self, model):
        self.model = model

    def predict(self, past):
        return self.model

    def log_predictive(self, x):
        return np.asarray(self.model.logpdf(np.asarray(x, dtype=float)), dtype=float)


class KTPlugin(PredictivePlugin):
    """Krichevsky-Trofimov add-1/2 Bernoulli predictor."""

    def predict(self, past):
        n = len(past)
        return BernoulliModel((float(np.sum(np.asarray(past))) + 0.5) / (n + 1.0))

    def log_predictive(self, x):
        x = np.asarray(x, dtype=float)
        ones_before = np.concatenate(([0.0], np.cumsum(x)[:-1]))
        n_before = np.arange(x.size)
        p_one = (ones_before + 0.5) / (n_before + 1.0)
        return np.where(x == 1.0, np.log(p_one), np.log1p(-p_one))


class GaussianMeanPlugin(PredictivePlugin):
    """N(m_i, sd^2) with m_i a shrunk running mean, optionally clipped to ``alt_set``."""

    def __init__(self, sd=1.0, prior_mean=0.0, prior_count=1.0, alt_set=None):
        self.sd = sd
        self.prior_mean = prior_mean
        self.prior_count = prior_count
        self.alt_set = alt_set

    def _mean(self, total, n):
        m = (self.prior_count * self.prior_mean + total) / (self.prior_count + n)
        return self.alt_set.clip(m) if self.alt_set is not None else m

    def predict(self, past):
        return GaussianModel(float(self._mean(float(np.sum(np.asarray(past))), len(past))), self.sd)

    def log_predictive(self, x):
        x = np.asarray(x, dtype=float)
        before = np.concatenate(([0.0], np.cumsum(x)[:-1]))
        m = self._mean(before, np.arange(x.size))
        return GaussianModel(0.0, self.sd).logpdf(x - m)


def _as_plugin(alt):
    if isinstance(alt, PredictivePlugin):
        return alt
    if hasattr(alt, "logpdf"):
        return FixedPlugin(alt)
    raise TypeError("alternative must be a PredictivePlugin or a model with logpdf")


# universal inference ---------------------------------------------------------------

def universal_inference_trace(null, alt_plugin, data) -> EProcessTrace:
    """``U_t`` for every t, refitting the null MLE on each prefix."""
    x = check_sequence(data)
    null = as_null(null)
    log_num = np.cumsum(_as_plugin(alt_plugin).log_predictive(x))
    log_den = null.prefix_max_loglik(x)
    lu = _ratio_logs(log_num, log_den)
    # a zero numerator stays zero whatever the denominator does
    lu = np.where(np.maximum.accumulate(log_num == -np.inf), -np.inf, lu)
    return EProcessTrace.from_log_capital(lu, "universal-inference")


def universal_inference(null, alt_plugin, data) -> EValueSample:
    """Batch ``U_T``: plug-in likelihood over the null maximum likelihood on all T points."""
    x = check_sequence(data)
    if x.size == 0:
        return EValueSample(1.0, "universal-inference")
    null = as_null(null)
    log_num = float(np.sum(_as_plugin(alt_plugin).log_predictive(x)))
    log_den = null.max_loglik(x)
    lu = float(_ratio_logs(np.array(log_num), np.array(log_den)))
    if log_num == -math.inf:
        lu = -math.inf
    return EValueSample(math.exp(lu), "universal-inference")


def _mixture_log_num(alt_grid, prior, x):
    if len(alt_grid) == 0:
        raise ValueError("alt_grid is empty")
    w = check_weights(prior, n=len(alt_grid), name="prior")
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    per_alt = np.array([np.cumsum(np.asarray(q.logpdf(x), dtype=float)) for q in alt_grid])
    return np.logaddexp.reduce(logw[:, None] + per_alt, axis=0)


def mixture_universal_trace(null, alt_grid, prior, data) -> EProcessTrace:
    """``V_t`` for every t (method of mixtures over a finite alternative grid)."""
    x = check_sequence(data)
    null = as_null(null)
    if x.size == 0:
        return EProcessTrace.from_log_capital([], "mixture-universal")
    log_num = _mixture_log_num(alt_grid, prior, x)
    lv = _ratio_logs(log_num, null.prefix_max_loglik(x))
    lv = np.where(np.maximum.accumulate(log_num == -np.inf), -np.inf, lv)
    return EProcessTrace.from_log_capital(lv, "mixture-universal")


def mixture_universal(null, alt_grid, prior, data) -> EValueSample:
    x = check_sequence(data)
    if x.size == 0:
        _mixture_log_num(alt_grid, prior, x[:0])
        return EValueSample(1.0, "mixture-universal")
    return EValueSample(mixture_universal_trace(null, alt_grid, prior, x).final, "mixture-universal")


# generalized likelihood ratio ---------------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo, hi, tol=1e-8):
    """Maximise a unimodal scalar function on [lo, hi]; returns (argmax, max)."""
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    best = max(((fa, xa) for xa, fa in ((a, f(a)), (b, f(b)), (c, fc), (d, fd))))
    return best[1], best[0]


def _sup_loglik(param_set, family, x, n_grid):
    if isinstance(param_set, Interval):
        if not (math.isfinite(param_set.low) and math.isfinite(param_set.high)):
            raise ValueError("GLR needs a bounded parameter interval")
        if param_set.low == param_set.high:
            return float(family.loglik(param_set.low, x))
        grid = np.linspace(param_set.low, param_set.high, n_grid)
        values = family.loglik(grid, x)
        k = int(np.argmax(values))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
        _, refined = golden_section_max(lambda th: float(family.loglik(th, x)), lo, hi, tol=1e-8)
        return max(float(values[k]), refined)
    return float(np.max(family.loglik(param_set, x)))


def glr(null_param_set, alt_param_set, family, data, n_grid=1001) -> float:
    """``sup_alt p_theta(x) / sup_null p_theta(x)`` by grid search plus golden section."""
    null_set = as_param_set(null_param_set)
    alt_set = as_param_set(alt_param_set)
    x = check_sequence(data)
    if x.size == 0:
        return 1.0
    num = _sup_loglik(alt_set, family, x, n_grid)
    den = _sup_loglik(null_set, family, x, n_grid)
    if den == -math.inf:
        return math.inf if num > -math.inf else math.nan
    return math.exp(num - den)
