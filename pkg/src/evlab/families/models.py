"""Distributions used as nulls, alternatives and data sources.

Every model exposes ``logpdf(x)`` (vectorised, ``-inf`` off support) and
``sample(rng, n)``. Parametric families additionally expose a vectorised
log-likelihood in the parameter, used by the GLR and by universal inference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .._validation import check_scalar, check_sequence, check_weights

LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class GaussianModel:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        check_scalar(self.mean, "mean")
        check_scalar(self.sd, "sd", 0.0, math.inf, low_open=True, high_open=True)

    def logpdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sd
        return -0.5 * z * z - math.log(self.sd) - 0.5 * LOG_2PI

    def sample(self, rng, n):
        return self.mean + self.sd * rng.standard_normal(n)


@dataclass(frozen=True)
class BernoulliModel:
    theta: float = 0.5

    def __post_init__(self):
        check_scalar(self.theta, "theta", 0.0, 1.0)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x == 1.0, np.log(self.theta), np.log1p(-self.theta))
        return np.where((x == 0.0) | (x == 1.0), out, -np.inf)

    def sample(self, rng, n):
        return (rng.random(n) < self.theta).astype(float)

    @property
    def mean(self):
        return self.theta


@dataclass(frozen=True)
class BetaModel:
    """Continuous data source on [0, 1]; mean ``a / (a + b)``."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        check_scalar(self.a, "a", 0.0, math.inf, low_open=True)
        check_scalar(self.b, "b", 0.0, math.inf, low_open=True)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (special.xlogy(self.a - 1, x) + special.xlog1py(self.b - 1, -x)
                   - special.betaln(self.a, self.b))
        return np.where((x >= 0) & (x <= 1), out, -np.inf)

    def sample(self, rng, n):
        return rng.beta(self.a, self.b, n)

    @property
    def mean(self):
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class BoundedMeanNull:
    """All distributions on [0, 1] with mean ``mu``."""

    mu: float = 0.5

    def __post_init__(self):
        check_scalar(self.mu, "mu", 0.0, 1.0, low_open=True, high_open=True)

    @property
    def lambda_bounds(self):
        """Bets keeping ``1 + lam * (x - mu)`` nonnegative for every ``x`` in [0, 1]."""
        return -1.0 / (1.0 - self.mu), 1.0 / self.mu


@dataclass(frozen=True)
class TTestPrior:
    """Discrete prior on the standardised effect size ``mean / sd``."""

    support: tuple = (0.5,)
    weights: tuple = (1.0,)

    def __post_init__(self):
        s = check_sequence(self.support, "support", allow_empty=False)
        if not np.isfinite(s).all():
            raise ValueError("support must be finite")
        w = check_weights(self.weights, n=len(s))
        object.__setattr__(self, "support", tuple(float(v) for v in s))
        object.__setattr__(self, "weights", tuple(float(v) for v in w))

    @classmethod
    def point(cls, delta):
        return cls((float(delta),), (1.0,))

    @classmethod
    def symmetric(cls, delta):
        return cls((-float(delta), float(delta)), (0.5, 0.5))


# parameter sets --------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    low: float
    high: float

    def __post_init__(self):
        if not self.low <= self.high:
            raise ValueError(f"empty interval [{self.low}, {self.high}]")

    @classmethod
    def point(cls, value):
        return cls(float(value), float(value))

    def clip(self, x):
        return np.clip(x, self.low, self.high)


def as_param_set(obj):
    """An :class:`Interval` or a nonempty 1-D float grid."""
    if isinstance(obj, Interval):
        return obj
    grid = check_sequence(obj, "parameter grid")
    if grid.size == 0:
        raise ValueError("parameter set is empty")
    return grid


# parametric families -------------------------------------------------------------

@dataclass(frozen=True)
class BernoulliFamily:
    """Bernoulli(theta), theta in [0, 1]."""

    domain = (0.0, 1.0)

    def model(self, theta):
        return BernoulliModel(float(theta))

    def loglik(self, theta, x):
        """Log-likelihood of the whole sample ``x`` at each ``theta`` (vectorised)."""
        x = np.asarray(x, dtype=float)
        ones = float(np.sum(x == 1.0))
        if ones + np.sum(x == 0.0) != x.size:
            return np.full(np.shape(theta), -np.inf)
        theta = np.asarray(theta, dtype=float)
        return special.xlogy(ones, theta) + special.xlog1py(x.size - ones, -theta)

    def prefix_mle(self, x):
        """Unconstrained MLE on each prefix ``x[:t]``."""
        t = np.arange(1, len(x) + 1)
        return np.cumsum(x) / t

    def prefix_loglik(self, theta, x):
        """Log-likelihood of ``x[:t]`` at ``theta[t-1]``, for every t."""
        ones = np.cumsum(x)
        zeros = np.arange(1, len(x) + 1) - ones
        return special.xlogy(ones, theta) + special.xlog1py(zeros, -theta)


@dataclass(frozen=True)
class GaussianMeanFamily:
    """N(mu, sd^2) with known ``sd``; parameter is the mean."""

    sd: float = 1.0
    domain = (-math.inf, math.inf)

    def model(self, mu):
        return GaussianModel(float(mu), self.sd)

    def loglik(self, mu, x):
        x = np.asarray(x, dtype=float)
        n = x.size
        mu = np.asarray(mu, dtype=float)
        ss = float(np.sum((x - x.mean()) ** 2)) if n else 0.0
        xbar = x.mean() if n else 0.0
        return (-(ss + n * (xbar - mu) ** 2) / (2 * self.sd ** 2)
                - n * (math.log(self.sd) + 0.5 * LOG_2PI))

    def prefix_mle(self, x):
        t = np.arange(1, len(x) + 1)
        return np.cumsum(x) / t

    def prefix_loglik(self, mu, x):
        t = np.arange(1, len(x) + 1)
        s1 = np.cumsum(x)
        s2 = np.cumsum(x * x)
        return (-(s2 - 2 * mu * s1 + t * mu * mu) / (2 * self.sd ** 2)
                - t * (math.log(self.sd) + 0.5 * LOG_2PI))


@dataclass(frozen=True, eq=False)
class CompositeNull:
    """A family restricted to a parameter set, with its (constrained) MLE.

    Both families have log-likelihoods concave in the parameter, so the MLE
    over an interval is the clipped unconstrained MLE. Over a grid the MLE is
    the best grid point.
    """

    family: object
    params: object

    def __post_init__(self):
        object.__setattr__(self, "params", as_param_set(self.params))

    @classmethod
    def simple(cls, family, value):
        return cls(family, Interval.point(value))

    def prefix_max_loglik(self, x):
        """``max_theta log p_theta(x[:t])`` for every prefix length t."""
        x = np.asarray(x, dtype=float)
        if isinstance(self.params, Interval):
            theta = self.params.clip(self.family.prefix_mle(x))
            return self.family.prefix_loglik(theta, x)
        return np.max([self.family.prefix_loglik(np.full(len(x), g), x) for g in self.params], axis=0)

    def max_loglik(self, x):
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            return 0.0
        return float(self.prefix_max_loglik(x)[-1])

    def mle(self, x):
        x = np.asarray(x, dtype=float)
        if isinstance(self.params, Interval):
            return float(self.params.clip(x.mean()))
        return float(self.params[np.argmax(self.family.loglik(self.params, x))])


def as_null(null):
    """Accept a plain model as a simple null, or a :class:`CompositeNull`."""
    if isinstance(null, CompositeNull):
        return null
    if isinstance(null, BernoulliModel):
        return CompositeNull.simple(BernoulliFamily(), null.theta)
    if isinstance(null, GaussianModel):
        return CompositeNull.simple(GaussianMeanFamily(null.sd), null.mean)
    raise TypeError(f"cannot use {type(null).__name__} as a null hypothesis")
