"""P-to-e calibrators, their admissibility check, and Fisher's combination."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from ._validation import check_scalar, check_sequence
from .core import EProcessTrace, EValueSample
from .special import chi2_sf

__all__ = [
    "Calibrator",
    "CalibratorReport",
    "power_calibrator",
    "mixture_calibrator",
    "MIXTURE_CALIBRATOR",
    "verify_calibrator",
    "fisher_combine",
    "calibrated_eprocess",
]


def _check_pvalues(p, name="p"):
    arr = check_sequence(p, name)
    if arr.size and (arr.min() <= 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} must lie in (0, 1]")
    return arr


@dataclass(frozen=True)
class Calibrator:
    """A nonincreasing ``f`` on (0, 1], stored as ``log_evaluator(log p) = log f(p)``.

    Working in ``log p`` keeps tiny p-values (and the admissibility integral's
    tail) free of underflow.
    """

    kind: str
    log_evaluator: Callable = field(repr=False, compare=False)
    params: dict = field(default_factory=dict)

    def evaluate(self, p):
        """Vectorised ``f(p)``."""
        return np.exp(self.log_evaluator(np.log(_check_pvalues(p))))

    def __call__(self, p) -> EValueSample:
        p = check_scalar(p, "p", 0.0, 1.0, low_open=True)
        return EValueSample(float(self.evaluate([p])[0]), self.kind)


def power_calibrator(kappa) -> Calibrator:
    """``f(p) = kappa * p^(kappa - 1)`` for ``kappa`` in (0, 1)."""
    kappa = check_scalar(kappa, "kappa", 0.0, 1.0, low_open=True, high_open=True)
    log_kappa = math.log(kappa)
    return Calibrator("power", lambda lp: log_kappa + (kappa - 1.0) * lp, {"kappa": kappa})


# f(e^L) = (e^-L - 1 + L) / L^2 = sum_j (-L)^j / (j+2)!, used for |L| < 0.05
_MIX_SERIES = np.array([(-1.0) ** j / math.factorial(j + 2) for j in range(16)])


def _log_mixture(log_p):
    lp = np.atleast_1d(np.asarray(log_p, dtype=float))
    out = np.empty_like(lp)
    near_one = np.abs(lp) < 0.05
    far = lp[~near_one]
    with np.errstate(over="ignore"):
        out[~near_one] = -far + np.log1p(-np.exp(far) * (1.0 - far)) - 2.0 * np.log(-far)
    out[near_one] = np.log(np.polynomial.polynomial.polyval(lp[near_one], _MIX_SERIES))
    return out


MIXTURE_CALIBRATOR = Calibrator("mixture", _log_mixture)


def mixture_calibrator(p) -> EValueSample:
    """``int_0^1 kappa p^(kappa-1) dkappa = (1 - p + p ln p) / (p ln^2 p)``; 1/2 at p = 1."""
    return MIXTURE_CALIBRATOR(p)


@dataclass(frozen=True)
class CalibratorReport:
    monotone: bool
    integral: float
    passed: bool


def verify_calibrator(c, grid_size=10_000) -> CalibratorReport:
    """Check ``c`` is nonincreasing on (0, 1] and ``int_0^1 c(u) du <= 1``.

    ``c`` is a :class:`Calibrator` or any callable of one float. The integral
    is computed after ``u = exp(-s)``, which moves the integrable singularity
    at 0 to an infinite tail that QUADPACK handles. For a plain callable the
    integrand is taken as 0 once ``exp(-s)`` underflows.
    """
    if isinstance(c, Calibrator):
        f = c.evaluate

        def weighted(s):
            return math.exp(float(c.log_evaluator(np.array([-s]))[0]) - s)
    else:
        f = np.vectorize(lambda u: float(c(float(u))), otypes=[float])

        def weighted(s):
            u = math.exp(-s)
            return float(c(u)) * u if u > 0 else 0.0
    grid = np.geomspace(1e-10, 1.0, grid_size)
    values = f(grid)
    steps = np.diff(values)
    monotone = bool(np.all(steps <= 1e-12 * np.abs(values[:-1]) + 1e-15))
    integral, _ = integrate.quad(weighted, 0.0, math.inf, epsabs=1e-14, epsrel=1e-12, limit=500)
    return CalibratorReport(monotone, integral, monotone and integral <= 1.0 + 1e-9)


def fisher_combine(pvals) -> float:
    """Fisher's method for independent p-values: chi-square(2k) tail of ``-2 sum ln p``."""
    p = _check_pvalues(pvals, "pvals")
    if p.size == 0:
        raise ValueError("pvals is empty")
    stat = -2.0 * math.fsum(np.log(p))
    return min(1.0, chi2_sf(stat, 2 * p.size))


def calibrated_eprocess(pvalues, calibrator) -> EProcessTrace:
    """Running product of calibrated per-step p-values (valid when each is
    conditionally super-uniform given the past)."""
    return EProcessTrace.from_factors(calibrator.evaluate(pvalues), f"calibrated/{calibrator.kind}")
