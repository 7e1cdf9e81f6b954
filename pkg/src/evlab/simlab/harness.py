"""Generic Monte Carlo estimators for e-process validity and growth."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .._validation import check_alpha
from ..core import StoppingRule, stopped_value
from ..exceptions import ReplicationError
from .config import SimConfig, SimReport, describe
from .rng import substream

__all__ = ["run_replications", "mc_stopped_mean", "ville_coverage", "growth_rate", "sampler_of"]


def run_replications(fn, cfg: SimConfig, width=None):
    """Evaluate ``fn(rng, i)`` for ``i < cfg.reps`` into an array indexed by ``i``.

    Up to ``cfg.threads`` workers fill disjoint contiguous blocks. Outputs
    depend only on ``(seed, i)``, so the array (and every ordered reduction of
    it) is identical for any thread count.
    """
    reps = cfg.reps
    out = np.empty(reps if width is None else (reps, width))

    def work(lo, hi):
        for i in range(lo, hi):
            try:
                out[i] = fn(substream(cfg.seed, i), i)
            except Exception as exc:
                raise ReplicationError(i, exc) from exc

    workers = min(cfg.threads, reps)
    if workers == 1:
        work(0, reps)
        return out
    edges = np.linspace(0, reps, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(work, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
        for f in futures:
            f.result()
    return out


def sampler_of(model):
    """``model.sample`` or a plain ``(rng, n) -> array`` callable."""
    if hasattr(model, "sample"):
        return model.sample
    if callable(model):
        return model
    raise TypeError(f"{model!r} is not a sampler")


def _metadata(op, cfg, **items):
    meta = {"op": op}
    meta.update({k: describe(v) for k, v in items.items()})
    meta["config"] = cfg.describe()
    return meta


def mc_stopped_mean(null, constructor, rule: StoppingRule, cfg: SimConfig) -> SimReport:
    """Estimate ``E[K_tau]`` under ``null`` for the stopping rule ``rule``."""
    if rule.horizon_cap > cfg.horizon:
        raise ValueError(f"rule horizon_cap={rule.horizon_cap} exceeds cfg.horizon={cfg.horizon}")
    sample = sampler_of(null)
    n = rule.horizon_cap

    def one(rng, i):
        data = sample(rng, n)
        return stopped_value(constructor(data), rule, data).value

    values = run_replications(one, cfg)
    meta = _metadata("mc_stopped_mean", cfg, model=null, constructor=constructor, rule=rule.describe())
    return SimReport.from_samples(values, cfg.seed, meta)


def ville_coverage(null, constructor, alpha=None, horizon=None, cfg: SimConfig = None) -> SimReport:
    """Estimate ``P(exists t <= horizon: K_t >= 1/alpha)`` under ``null``."""
    cfg = cfg if cfg is not None else SimConfig()
    alpha = check_alpha(cfg.alpha if alpha is None else alpha)
    horizon = cfg.horizon if horizon is None else int(horizon)
    sample = sampler_of(null)
    threshold = 1.0 / alpha

    def one(rng, i):
        trace = constructor(sample(rng, horizon))
        return float(len(trace) > 0 and trace.capital.max() >= threshold)

    values = run_replications(one, cfg)
    meta = _metadata("ville_coverage", cfg, model=null, constructor=constructor, alpha=alpha, horizon=horizon)
    return SimReport.from_samples(values, cfg.seed, meta)


def growth_rate(alt, constructor, T=None, cfg: SimConfig = None, base=math.e) -> SimReport:
    """Estimate ``E[log K_T] / T`` under ``alt``, logarithm in ``base``.

    Replications ending at capital 0 have log-capital ``-inf``; they are
    counted in ``extras["ruin_frequency"]`` and left out of the mean.
    """
    cfg = cfg if cfg is not None else SimConfig()
    T = cfg.horizon if T is None else int(T)
    if T < 1:
        raise ValueError("T must be positive")
    sample = sampler_of(alt)
    scale = 1.0 / (T * math.log(base))

    def one(rng, i):
        return constructor(sample(rng, T)).log_final * scale

    values = run_replications(one, cfg)
    ruined = values == -np.inf
    meta = _metadata("growth_rate", cfg, model=alt, constructor=constructor, T=T, base=base)
    extras = {"ruin_frequency": float(np.count_nonzero(ruined)) / values.size}
    if ruined.all():
        return SimReport(-math.inf, 0.0, cfg.reps, cfg.seed, meta, extras)
    report = SimReport.from_samples(values[~ruined], cfg.seed, meta, extras)
    return SimReport(report.estimate, report.std_error, cfg.reps, cfg.seed, meta, extras)
