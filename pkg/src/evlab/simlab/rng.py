"""Per-replication random streams.

Replication ``i`` of a run with seed ``s`` draws from a Philox-4x64 generator
keyed by ``s`` whose 256-bit counter starts at ``i * 2^128``. Philox is
counter based, so every stream is a pure function of ``(s, i)``: streams need
no coordination, and a replication draws the same numbers whichever thread
runs it and in whatever order. Each stream owns ``2^128`` blocks before it
could reach the next one.
"""
import numpy as np

MAX_SEED = 2 ** 64 - 1
_STREAM_SHIFT = 128


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must lie in [0, 2^64 - 1], got {seed}")
    return int(seed)


def substream(seed, index) -> np.random.Generator:
    """Generator for replication ``index`` of a run seeded with ``seed``."""
    seed = check_seed(seed)
    if index < 0:
        raise ValueError("replication index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=seed, counter=int(index) << _STREAM_SHIFT))
