"""Small input-validation helpers shared by the public functions.

They follow the spirit of ``sklearn.utils.validation``: coerce to a float
ndarray, reject NaN, and raise ``ValueError`` with the offending argument name.
"""
import math
from numbers import Real

import numpy as np


def check_sequence(x, name="data", allow_empty=True):
    """Return ``x`` as a 1-D float64 array, rejecting NaN."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    return arr


def check_bits(bits, name="bits"):
    arr = np.asarray(bits)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size == 0:
        return np.zeros(0, dtype=np.int8)
    if arr.dtype == bool:
        return arr.astype(np.int8)
    as_float = np.asarray(arr, dtype=float)
    if not np.all((as_float == 0.0) | (as_float == 1.0)):
        raise ValueError(f"{name} must contain only 0 and 1")
    return as_float.astype(np.int8)


def check_unit_interval(x, name="data"):
    arr = check_sequence(x, name)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def check_scalar(x, name, low=-math.inf, high=math.inf, low_open=False, high_open=False):
    if isinstance(x, bool) or not isinstance(x, (Real, np.floating, np.integer)):
        raise TypeError(f"{name} must be a real number, got {type(x).__name__}")
    x = float(x)
    if math.isnan(x):
        raise ValueError(f"{name} is NaN")
    too_low = x <= low if low_open else x < low
    too_high = x >= high if high_open else x > high
    if too_low or too_high:
        lb = "(" if low_open else "["
        rb = ")" if high_open else "]"
        raise ValueError(f"{name}={x} outside {lb}{low}, {high}{rb}")
    return x


def check_alpha(alpha):
    return check_scalar(alpha, "alpha", 0.0, 1.0, low_open=True, high_open=True)


def check_weights(weights, n=None, name="weights", total=1.0, tol=1e-12, exact=True):
    """Nonnegative weights; sum must equal ``total`` (``exact``) or not exceed it."""
    w = check_sequence(weights, name)
    if n is not None and w.size != n:
        raise ValueError(f"{name} has length {w.size}, expected {n}")
    if (w < 0).any():
        raise ValueError(f"{name} must be nonnegative")
    s = math.fsum(w)
    if s > total + tol or (exact and s < total - tol):
        raise ValueError(f"{name} sum to {s!r}, expected {'' if exact else 'at most '}{total}")
    return w
