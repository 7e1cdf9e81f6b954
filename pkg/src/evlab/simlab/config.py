"""Run configuration, scenario descriptions and reports."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .._validation import check_alpha
from ..families.likelihood import DEFAULT_LAMBDA_GRID
from .rng import check_seed

__all__ = ["SimConfig", "ScenarioSpec", "SimReport", "describe", "SCENARIO_KINDS"]

SCENARIO_KINDS = ("two-batch-continuation", "stop-when-significant", "two-ones-in-a-row")


def _positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings. ``threads`` only changes speed, never results."""

    seed: int = 0
    reps: int = 1000
    horizon: int = 1000
    alpha: float = 0.05
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "seed", check_seed(self.seed))
        object.__setattr__(self, "reps", _positive_int(self.reps, "reps"))
        object.__setattr__(self, "horizon", _positive_int(self.horizon, "horizon"))
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "threads", _positive_int(self.threads, "threads"))

    def describe(self) -> dict:
        return {"seed": self.seed, "reps": self.reps, "horizon": self.horizon, "alpha": self.alpha}


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one optional-stopping or optional-continuation protocol.

    ``stop-when-significant`` and ``two-ones-in-a-row`` use ``max_n`` and the
    1-based ``looks`` (default: every observation). ``two-batch-continuation``
    uses ``batch_sizes`` and continues when the first p-value falls in
    ``band = (low, high]`` (default ``(alpha, 0.1]``; an empty band never
    continues). Gaussian scenarios have known ``sigma`` and use a
    mixture of Gaussian e-processes over ``lambdas``.
    """

    kind: str
    alpha: float = 0.05
    max_n: int = 1000
    looks: Optional[tuple] = None
    batch_sizes: tuple = (50, 30)
    band: Optional[tuple] = None
    sigma: float = 1.0
    lambdas: tuple = DEFAULT_LAMBDA_GRID
    theta: float = 0.5

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}; expected one of {SCENARIO_KINDS}")
        check_alpha(self.alpha)
        _positive_int(self.max_n, "max_n", minimum=0)
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive")
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if self.looks is not None:
            looks = tuple(int(v) for v in self.looks)
            if any(b <= a for a, b in zip(looks, looks[1:])):
                raise ValueError("looks must be strictly increasing")
            if looks and (looks[0] < 1 or looks[-1] > self.max_n):
                raise ValueError(f"looks must lie in [1, max_n={self.max_n}]; a later look reads unrevealed data")
            object.__setattr__(self, "looks", looks)
        sizes = tuple(_positive_int(v, "batch size") for v in self.batch_sizes)
        if len(sizes) != 2:
            raise ValueError("batch_sizes must have two entries")
        object.__setattr__(self, "batch_sizes", sizes)
        band = (self.alpha, 0.1) if self.band is None else tuple(float(v) for v in self.band)
        if len(band) != 2:
            raise ValueError("band must be (low, high)")
        object.__setattr__(self, "band", band)

    @classmethod
    def stop_when_significant(cls, alpha=0.05, max_n=1000, looks=None, **kw):
        return cls("stop-when-significant", alpha=alpha, max_n=max_n, looks=looks, **kw)

    @classmethod
    def two_batch(cls, alpha=0.05, batch_sizes=(50, 30), band=None, **kw):
        return cls("two-batch-continuation", alpha=alpha, batch_sizes=batch_sizes, band=band, **kw)

    @classmethod
    def two_ones(cls, alpha=0.05, max_n=1000, theta=0.5):
        return cls("two-ones-in-a-row", alpha=alpha, max_n=max_n, theta=theta)

    def look_indices(self):
        """0-based positions of the looks."""
        if self.looks is None:
            return np.arange(self.max_n)
        return np.asarray(self.looks, dtype=int) - 1

    def describe(self) -> dict:
        out = {"kind": self.kind, "alpha": self.alpha}
        if self.kind == "two-batch-continuation":
            out.update(batch_sizes=list(self.batch_sizes), band=list(self.band),
                       sigma=self.sigma, lambdas=list(self.lambdas))
        else:
            out.update(max_n=self.max_n, looks="all" if self.looks is None else list(self.looks))
            if self.kind == "stop-when-significant":
                out.update(sigma=self.sigma, lambdas=list(self.lambdas))
            else:
                out.update(theta=self.theta)
        return out


@dataclass(frozen=True)
class SimReport:
    """A Monte Carlo estimate with its standard error ``sd / sqrt(reps)``."""

    estimate: float
    std_error: float
    reps: int
    seed: int
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, values, seed, metadata=None, extras=None):
        v = np.asarray(values, dtype=float)
        n = v.size
        mean = math.fsum(v) / n
        if n > 1 and np.isfinite(mean):
            sd = math.sqrt(math.fsum((v - mean) ** 2) / (n - 1))
        else:
            sd = 0.0 if n == 1 or np.all(v == v[0]) else math.nan
        return cls(mean, sd / math.sqrt(n), n, seed, dict(metadata or {}), dict(extras or {}))

    def upper(self, k=3.0):
        """``estimate + k * std_error``."""
        return self.estimate + k * self.std_error

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "reps": self.reps,
            "seed": self.seed,
            "metadata": self.metadata,
            "extras": self.extras,
        }


def describe(obj):
    """JSON-friendly, address-free description of a model, constructor or value."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [describe(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [describe(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): describe(v) for k, v in obj.items()}
    if hasattr(obj, "get_params"):
        return {"class": type(obj).__name__, "params": describe(obj.get_params(deep=False))}
    if hasattr(obj, "describe") and callable(obj.describe):
        return describe(obj.describe())
    if callable(obj) and hasattr(obj, "__qualname__"):
        return f"{getattr(obj, '__module__', '')}.{obj.__qualname__}"
    return repr(obj)
