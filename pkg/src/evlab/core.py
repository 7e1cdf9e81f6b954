"""E-values, capital traces and the operations that act on them.

Time indices exposed by this module are 1-based (``t = 1`` is the capital
after the first factor), matching how sequential tests are usually written.
Arrays stored on the objects are ordinary 0-based numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np

from ._validation import check_alpha, check_scalar, check_sequence, check_weights
from .exceptions import LookaheadError

__all__ = [
    "EValueSample",
    "EProcessTrace",
    "StoppingRule",
    "FiniteSpace",
    "PrefixView",
    "Prefix",
    "ev_product",
    "ev_convex_mix",
    "e_to_p",
    "first_crossing",
    "stopping_time",
    "stopped_value",
    "dominating_lr",
]


@dataclass(frozen=True)
class EValueSample:
    """A realised e-value. ``+inf`` is a legal value (null density zero)."""

    value: float
    label: str = ""

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v < 0:
            raise ValueError(f"e-value must be a nonnegative number, got {self.value!r}")
        object.__setattr__(self, "value", v)

    def __float__(self):
        return self.value


def _as_value(e) -> float:
    return e.value if isinstance(e, EValueSample) else EValueSample(e).value


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _log_capital_from_log_factors(log_factors):
    # Zero absorbs everything after it, including later +inf factors.
    with np.errstate(invalid="ignore"):
        log_capital = np.cumsum(log_factors)
    zeros = np.flatnonzero(log_factors == -np.inf)
    if zeros.size:
        log_capital[zeros[0]:] = -np.inf
    return log_capital


@dataclass(frozen=True, eq=False)
class EProcessTrace:
    """Capital path ``K_1..K_T`` of a betting game together with its factors.

    Build instances with :meth:`from_factors`, :meth:`from_log_factors` or
    :meth:`from_log_capital`; the three arrays are read-only.
    """

    factors: np.ndarray
    capital: np.ndarray
    log_capital: np.ndarray
    label: str = ""

    def __post_init__(self):
        if not (len(self.factors) == len(self.capital) == len(self.log_capital)):
            raise ValueError("factors, capital and log_capital must have equal length")

    @classmethod
    def from_factors(cls, factors, label=""):
        f = check_sequence(factors, "factors")
        if (f < 0).any():
            raise ValueError("factors must be nonnegative")
        with np.errstate(divide="ignore"):
            lf = np.log(f)
        lc = _log_capital_from_log_factors(lf)
        # the direct running product is exact at ties such as K_t == 1/alpha;
        # fall back to the log path wherever it overflows, underflows or hits 0 * inf
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            direct = np.cumprod(f)
        ok = np.isfinite(direct) & (direct > 1e-300)
        return cls(_readonly(f), _readonly(np.where(ok, direct, np.exp(lc))), _readonly(lc), label)

    @classmethod
    def from_log_factors(cls, log_factors, label=""):
        lf = check_sequence(log_factors, "log_factors")
        lc = _log_capital_from_log_factors(lf)
        return cls(_readonly(np.exp(lf)), _readonly(np.exp(lc)), _readonly(lc), label)

    @classmethod
    def from_log_capital(cls, log_capital, label=""):
        """Trace from a log-capital path that is not built multiplicatively.

        Factors are recovered as successive ratios. A step out of ``-inf`` or
        ``+inf`` back to a finite value is rejected; steps that stay at an
        infinite value get factor 1.
        """
        lc = check_sequence(log_capital, "log_capital")
        prev = np.concatenate(([0.0], lc[:-1]))
        stuck = np.isinf(prev)
        if np.any(stuck & (lc != prev)):
            raise ValueError("log_capital leaves an absorbing infinite value")
        with np.errstate(invalid="ignore"):
            steps = np.where(stuck, 0.0, lc - prev)
        return cls(_readonly(np.exp(steps)), _readonly(np.exp(lc)), _readonly(lc), label)

    @classmethod
    def constant(cls, horizon, label="constant"):
        return cls.from_factors(np.ones(int(horizon)), label)

    def __len__(self):
        return len(self.capital)

    @property
    def final(self) -> float:
        return float(self.capital[-1]) if len(self) else 1.0

    @property
    def log_final(self) -> float:
        return float(self.log_capital[-1]) if len(self) else 0.0

    def truncate(self, t):
        """The trace restricted to times ``1..t``."""
        return EProcessTrace(
            _readonly(self.factors[:t]), _readonly(self.capital[:t]),
            _readonly(self.log_capital[:t]), self.label,
        )


class PrefixView:
    """Read-only window onto the first ``t`` entries of a longer sequence.

    Indexing past the revealed prefix raises :class:`LookaheadError`, which is
    how predictability of a stopping rule or betting strategy is enforced.
    """

    __slots__ = ("_full", "_t")

    def __init__(self, full, t):
        if t < 0 or t > len(full):
            raise ValueError(f"prefix length {t} outside [0, {len(full)}]")
        self._full = full
        self._t = int(t)

    def __len__(self):
        return self._t

    def _check(self, i):
        if i >= self._t or i < -self._t:
            raise LookaheadError(f"index {i} is beyond the revealed prefix of length {self._t}")
        return i if i >= 0 else self._t + i

    def __getitem__(self, key):
        if isinstance(key, slice):
            if key.stop is not None and key.stop > self._t:
                raise LookaheadError(f"slice stop {key.stop} is beyond the revealed prefix of length {self._t}")
            start, stop, step = key.indices(self._t)
            return np.asarray(self._full[start:stop:step])
        return self._full[self._check(int(key))]

    def __iter__(self):
        for i in range(self._t):
            yield self._full[i]

    def __array__(self, dtype=None, copy=None):
        return np.array(self._full[: self._t], dtype=dtype)

    def __repr__(self):
        return f"PrefixView(t={self._t})"


class Prefix(NamedTuple):
    """What a stopping predicate may look at after ``t`` observations."""

    t: int
    data: Optional[PrefixView]
    factors: PrefixView
    capital: PrefixView


@dataclass(frozen=True)
class StoppingRule:
    """Bounded stopping rule; every rule stops by ``horizon_cap`` at the latest."""

    kind: str
    horizon_cap: int
    n: Optional[int] = None
    threshold: Optional[float] = None
    predicate: Optional[Callable[[Prefix], bool]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("fixed", "first-crossing", "predicate"):
            raise ValueError(f"unknown stopping rule kind {self.kind!r}")
        if int(self.horizon_cap) != self.horizon_cap or self.horizon_cap < 1:
            raise ValueError("horizon_cap must be a positive integer")
        if self.kind == "fixed" and (self.n is None or self.n < 1):
            raise ValueError("fixed-horizon rule needs n >= 1")
        if self.kind == "first-crossing" and (self.threshold is None or not self.threshold > 0):
            raise ValueError("first-crossing rule needs a positive threshold")
        if self.kind == "predicate" and not callable(self.predicate):
            raise ValueError("predicate rule needs a callable predicate")

    @classmethod
    def fixed(cls, n, horizon_cap=None):
        return cls("fixed", int(horizon_cap if horizon_cap is not None else n), n=int(n))

    @classmethod
    def first_crossing(cls, threshold, horizon_cap):
        return cls("first-crossing", int(horizon_cap), threshold=float(threshold))

    @classmethod
    def when(cls, predicate, horizon_cap):
        return cls("predicate", int(horizon_cap), predicate=predicate)

    def describe(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "horizon_cap": self.horizon_cap}
        if self.n is not None:
            out["n"] = self.n
        if self.threshold is not None:
            out["threshold"] = self.threshold
        if self.predicate is not None:
            out["predicate"] = getattr(self.predicate, "__name__", repr(self.predicate))
        return out


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    outcomes: tuple
    mass: np.ndarray

    def __post_init__(self):
        m = check_sequence(self.mass, "mass")
        if len(m) != len(self.outcomes):
            raise ValueError("outcomes and mass differ in length")
        if (m < 0).any() or abs(math.fsum(m) - 1.0) > 1e-12:
            raise ValueError("mass must be nonnegative and sum to 1")
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(self, "mass", _readonly(m))

    def expectation(self, values) -> float:
        v = np.asarray(values, dtype=float)
        pos = self.mass > 0
        return math.fsum(self.mass[pos] * v[pos])


def ev_product(values: Sequence) -> EValueSample:
    """Product of e-values (valid for sequentially conditionally valid factors).

    Zero is absorbing, even against ``+inf``; the empty product is 1.
    """
    vals = np.array([_as_value(v) for v in values], dtype=float)
    if vals.size == 0:
        return EValueSample(1.0, "product")
    if (vals == 0).any():
        return EValueSample(0.0, "product")
    if np.isinf(vals).any():
        return EValueSample(math.inf, "product")
    return EValueSample(math.exp(math.fsum(np.log(vals))), "product")


def ev_convex_mix(values: Sequence, weights: Sequence) -> EValueSample:
    """Weighted average of e-values; valid under arbitrary dependence."""
    vals = np.array([_as_value(v) for v in values], dtype=float)
    w = check_weights(weights, n=len(vals), exact=False)
    pos = w > 0
    return EValueSample(math.fsum(w[pos] * vals[pos]), "convex-mix")


def e_to_p(e) -> float:
    """Markov's inequality: ``min(1, 1/e)`` is a p-value."""
    v = _as_value(e)
    if v <= 1.0:
        return 1.0
    return 1.0 / v


def first_crossing(trace: EProcessTrace, alpha: float) -> Optional[int]:
    """Smallest 1-based ``t`` with ``capital[t] >= 1/alpha``, or ``None``."""
    alpha = check_alpha(alpha)
    if len(trace) == 0:
        raise ValueError("trace is empty")
    hits = np.flatnonzero(trace.capital >= 1.0 / alpha)
    return int(hits[0]) + 1 if hits.size else None


def stopping_time(trace: EProcessTrace, rule: StoppingRule, data=None) -> int:
    """1-based stop index of ``rule`` on this trace (and data, for predicates)."""
    cap = rule.horizon_cap
    if cap > len(trace):
        raise ValueError(f"rule horizon_cap={cap} exceeds trace length {len(trace)}")
    if rule.kind == "fixed":
        return min(rule.n, cap)
    if rule.kind == "first-crossing":
        hits = np.flatnonzero(trace.capital[:cap] >= rule.threshold)
        return int(hits[0]) + 1 if hits.size else cap
    full = None if data is None else np.asarray(data)
    if full is not None and len(full) < cap:
        raise ValueError("data shorter than the rule's horizon_cap")
    for t in range(1, cap + 1):
        prefix = Prefix(
            t,
            None if full is None else PrefixView(full, t),
            PrefixView(trace.factors, t),
            PrefixView(trace.capital, t),
        )
        if rule.predicate(prefix):
            return t
    return cap


def stopped_value(trace: EProcessTrace, rule: StoppingRule, data=None) -> EValueSample:
    """Capital at the stopping time, ``K_tau``."""
    tau = stopping_time(trace, rule, data)
    return EValueSample(float(trace.capital[tau - 1]), f"stopped@{tau}")


def dominating_lr(space: FiniteSpace, e) -> FiniteSpace:
    """Distribution ``q = p * e / E_p[e]`` whose likelihood ratio dominates ``e``.

    Falls back to ``p`` when ``E_p[e] = 0``. Rejects tables with ``E_p[e] > 1``.
    """
    ev = check_sequence(e, "e")
    if len(ev) != len(space.outcomes):
        raise ValueError("e must have one value per atom")
    if (ev < 0).any():
        raise ValueError("e must be nonnegative")
    mean = space.expectation(ev)
    if mean > 1.0 + 1e-9:
        raise ValueError(f"E_p[e] = {mean!r} > 1: not an e-variable for this distribution")
    if mean <= 0:
        return FiniteSpace(space.outcomes, space.mass.copy())
    q = np.where(space.mass > 0, space.mass * ev / mean, 0.0)
    q = q / math.fsum(q)
    return FiniteSpace(space.outcomes, q)
