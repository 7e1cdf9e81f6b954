"""Right-Haar t-test Bayes factor as an e-process.

For a discrete prior on the effect size ``delta`` the Bayes factor after t
observations is a weighted sum of one-dimensional scale integrals::

    B_t = sum_j w_j N_j / D,
    N_j = int sigma^(-t-1) prod_i rho((x_i - sigma delta_j) / sigma) dsigma,
    D   = int sigma^(-t-1) prod_i rho(x_i / sigma) dsigma.

The integrals run over ``sigma`` in ``[s/1e4, s*1e4]`` with ``s`` the
root-mean-square of ``x_1..x_t``. Two evaluation routes are provided:

``method="quad"``
    adaptive Gauss-Kronrod (QUADPACK) in ``log sigma``, one call per integral.
``method="fast"``
    after ``v = sqrt(sum x^2) / sigma`` each ratio depends only on ``t`` and
    ``r = sum x / sqrt(sum x^2)``; the numerator is a fixed 32-node
    Gauss-Legendre rule on a window around the (log-concave) peak and the
    denominator is a regularised incomplete gamma difference. Vectorised
    over t, used for Monte Carlo work.
"""
from __future__ import annotations

import functools
import math
import warnings

import numpy as np
from scipy import integrate, special
from scipy.special import logsumexp

from .._validation import check_sequence
from ..core import EProcessTrace
from ..exceptions import QuadratureError
from .models import TTestPrior

__all__ = ["ttest_eprocess", "ttest_log_bf_quad", "ttest_log_bf_fast", "SCALE_SPAN"]

SCALE_SPAN = 1e4
QUAD_RTOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_WINDOW_DROP = 30.0  # log-integrand drop at the window edges (e^-30 ~ 1e-13)


def _log_scale_integral(t, s1, s2, delta):
    """``log int exp(g(w)) dw`` over ``w = log sigma``, constants common to all deltas dropped."""
    rms = math.sqrt(s2 / t)

    def g(w):
        u = math.exp(-w)
        return -t * w - 0.5 * (s2 * u * u - 2.0 * delta * s1 * u + t * delta * delta)

    lo, hi = math.log(rms / SCALE_SPAN), math.log(rms * SCALE_SPAN)
    u_peak = (delta * s1 + math.sqrt(delta * delta * s1 * s1 + 4.0 * s2 * t)) / (2.0 * s2)
    w_peak = -math.log(u_peak)
    g_ref = g(min(max(w_peak, lo), hi))
    points = [w_peak] if lo < w_peak < hi else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(lambda w: math.exp(g(w) - g_ref), lo, hi, points=points,
                             epsabs=0.0, epsrel=QUAD_RTOL, limit=400, full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3 or not value > 0 or not math.isfinite(value):
        msg = res[3] if len(res) > 3 else "non-positive integral"
        raise QuadratureError(f"scale integral did not converge (t={t}, delta={delta}): {msg}")
    return g_ref + math.log(value)


def ttest_log_bf_quad(prior: TTestPrior, data):
    """``log B_t`` for every prefix, by adaptive quadrature."""
    x = check_sequence(data)
    s1 = np.cumsum(x)
    s2 = np.cumsum(x * x)
    logw = np.log(np.asarray(prior.weights))
    out = np.zeros(x.size)
    for k in range(x.size):
        t = k + 1
        if s2[k] == 0.0:
            continue
        den = _log_scale_integral(t, s1[k], s2[k], 0.0)
        num = [lw + _log_scale_integral(t, s1[k], s2[k], d)
               for lw, d in zip(logw, prior.support) if lw > -math.inf]
        out[k] = logsumexp(num) - den
    return out


def _phi(v, t, z):
    return (t - 1.0) * np.log(v) - 0.5 * v * v + z * v


def _log_tilted_moment(t, z):
    """``log int_a^b v^(t-1) exp(-v^2/2 + z v) dv`` with ``[a, b] = sqrt(t) * [1e-4, 1e4]``.

    The log-integrand is concave in v with curvature at most -1, so windows
    where it has dropped by ``_WINDOW_DROP`` are bracketed by the quadratic
    bound and tightened by Newton steps that never cross the true edge.
    """
    a = np.sqrt(t) / SCALE_SPAN
    b = np.sqrt(t) * SCALE_SPAN
    peak = np.maximum(0.5 * (z + np.sqrt(z * z + 4.0 * (t - 1.0))), a)
    top = _phi(peak, t, z)
    curv = (t - 1.0) / (peak * peak) + 1.0
    lo = peak - np.sqrt(2.0 * _WINDOW_DROP / curv)
    hi = peak + math.sqrt(2.0 * _WINDOW_DROP)
    for _ in range(2):
        lo = np.maximum(lo, a)
        gap = top - _phi(lo, t, z) - _WINDOW_DROP
        lo = np.where(gap > 0, lo + gap / ((t - 1.0) / lo - lo + z), lo)
        gap = top - _phi(hi, t, z) - _WINDOW_DROP
        hi = np.where(gap > 0, hi + gap / ((t - 1.0) / hi - hi + z), hi)
    lo = np.maximum(lo, a)
    hi = np.minimum(hi, b)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    v = mid[..., None] + half[..., None] * _GL_NODES
    vals = np.exp(_phi(v, t[..., None], z[..., None]) - top[..., None]) @ _GL_WEIGHTS
    return top + np.log(half * vals)


@functools.lru_cache(maxsize=8)
def _log_chi_moment_upto(n):
    out = _log_chi_moment(np.arange(1, n + 1, dtype=float))
    out.setflags(write=False)
    return out


def _log_chi_moment(t):
    """Same integral at ``z = 0``, in closed form via the regularised incomplete gamma."""
    a2 = 0.5 * t / SCALE_SPAN ** 2
    b2 = 0.5 * t * SCALE_SPAN ** 2
    mass = special.gammainc(0.5 * t, b2) - special.gammainc(0.5 * t, a2)
    return (0.5 * t - 1.0) * math.log(2.0) + special.gammaln(0.5 * t) + np.log(mass)


def ttest_log_bf_fast(prior: TTestPrior, data):
    """``log B_t`` for every prefix, vectorised Gauss-Legendre route."""
    x = check_sequence(data)
    out = np.zeros(x.size)
    s2 = np.cumsum(x * x)
    live = s2 > 0
    if not live.any():
        return out
    t = np.arange(1, x.size + 1, dtype=float)[live]
    r = np.cumsum(x)[live] / np.sqrt(s2[live])
    terms = [math.log(w) - 0.5 * t * d * d + _log_tilted_moment(t, d * r)
             for w, d in zip(prior.weights, prior.support) if w > 0]
    out[live] = np.logaddexp.reduce(terms, axis=0) - _log_chi_moment_upto(x.size)[live]
    return out


def ttest_eprocess(prior: TTestPrior, data, method="quad") -> EProcessTrace:
    """Trace ``B_1..B_T`` of the right-Haar t-test Bayes factor.

    Leading observations that are exactly zero give ``B_t = 1``.
    """
    data = check_sequence(data, allow_empty=False)
    if method == "quad":
        log_bf = ttest_log_bf_quad(prior, data)
    elif method == "fast":
        log_bf = ttest_log_bf_fast(prior, data)
    else:
        raise ValueError(f"unknown method {method!r}; use 'quad' or 'fast'")
    return EProcessTrace.from_log_capital(log_bf, "ttest-right-haar")
