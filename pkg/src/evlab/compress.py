"""Compression-based e-processes for the fair-coin null.

A lossless code with lengths ``CL`` that satisfy Kraft's inequality defines a
sub-probability ``q(x) = 2^-CL(x)``, so ``2^(t - CL(x_1..x_t))`` is a
likelihood ratio against the fair coin. The built-in coder is the
Krichevsky-Trofimov (add-1/2) sequential estimator, whose Kraft sum is exactly
one. Byte-oriented compressors plug in through :class:`CompressorAdapter`,
charged 8 bits per output byte.
"""
from __future__ import annotations

import itertools
import math
import shlex
import subprocess
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._validation import check_bits
from .core import EProcessTrace
from .exceptions import AdapterError
from .families.estimators import EProcessEstimator

__all__ = [
    "KTState",
    "KTCoder",
    "KT",
    "kt_log2prob",
    "kt_log2prob_steps",
    "CompressorAdapter",
    "zlib_adapter",
    "external_adapter",
    "pack_bits",
    "compression_eprocess",
    "kraft_check",
    "CompressionEProcess",
    "KRAFT_MAX_N",
]

KRAFT_MAX_N = 12
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class KTState:
    """Symbol counts of the KT estimator; ``update`` returns a new state."""

    zeros: int = 0
    ones: int = 0

    def __post_init__(self):
        if self.zeros < 0 or self.ones < 0:
            raise ValueError("KT counts must be nonnegative")

    def log2prob_next(self, bit) -> float:
        count = self.ones if bit else self.zeros
        return math.log2((count + 0.5) / (self.zeros + self.ones + 1))

    def update(self, bit) -> "KTState":
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        return KTState(self.zeros + (1 - bit), self.ones + bit)


def kt_log2prob_steps(bits):
    """Per-symbol ``log2 q(x_t | x_1..x_{t-1})`` under KT."""
    b = check_bits(bits)
    ones_before = np.concatenate(([0], np.cumsum(b)[:-1])) if b.size else np.zeros(0)
    n_before = np.arange(b.size)
    same = np.where(b == 1, ones_before, n_before - ones_before)
    return np.log2((same + 0.5) / (n_before + 1.0))


def kt_log2prob(bits) -> float:
    """``log2`` of the KT probability of the whole string."""
    return math.fsum(kt_log2prob_steps(bits))


class KTCoder:
    """The sequential KT code; code length is ``-kt_log2prob``."""

    name = "kt"

    def code_lengths(self, bits):
        """``CL(x_1..x_t)`` in bits for every prefix."""
        return -np.cumsum(kt_log2prob_steps(bits))

    def __repr__(self):
        return "KTCoder()"


KT = KTCoder()


def pack_bits(bits) -> bytes:
    """Big-endian packing, zero-padded final byte, padding length as a leading byte."""
    b = check_bits(bits)
    pad = (-b.size) % 8
    return bytes([pad]) + np.packbits(b.astype(np.uint8), bitorder="big").tobytes()


@dataclass(frozen=True)
class CompressorAdapter:
    """A byte compressor given as ``compress(payload) -> compressed byte count``.

    The code length of a bit string is ``8 * compress(pack_bits(bits))``.
    ``bit_length`` optionally gives a finer accounting in bits for the same
    codec; it exists for comparison and is never used by default.
    """

    name: str
    compress: Callable[[bytes], int]
    bit_length: Callable[[bytes], int] | None = None

    def _count(self, fn, payload, what):
        try:
            n = fn(payload)
        except AdapterError:
            raise
        except Exception as exc:
            raise AdapterError(f"compressor {self.name!r} failed: {exc}") from exc
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
            raise AdapterError(f"compressor {self.name!r} returned invalid {what} {n!r}")
        return int(n)

    def code_length(self, bits, accounting="bytes") -> int:
        payload = pack_bits(bits)
        if accounting == "bytes":
            return 8 * self._count(self.compress, payload, "byte count")
        if accounting == "bits":
            if self.bit_length is None:
                raise AdapterError(f"compressor {self.name!r} has no bit-level accounting")
            return self._count(self.bit_length, payload, "bit count")
        raise ValueError(f"accounting must be 'bytes' or 'bits', got {accounting!r}")

    def code_lengths(self, bits, accounting="bytes"):
        b = check_bits(bits)
        return np.array([self.code_length(b[:t], accounting) for t in range(1, b.size + 1)], dtype=float)


def zlib_adapter(level=9) -> CompressorAdapter:
    return CompressorAdapter(f"zlib-{level}", lambda payload: len(zlib.compress(payload, level)))


def external_adapter(command, mode="bytes", timeout=60.0) -> CompressorAdapter:
    """Run ``command`` once per input with the framed bytes on stdin.

    ``mode="bytes"`` counts the bytes written to stdout; ``mode="count"``
    expects the command to print the compressed byte count.
    """
    if mode not in ("bytes", "count"):
        raise ValueError(f"mode must be 'bytes' or 'count', got {mode!r}")
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if not argv:
        raise ValueError("empty compressor command")

    def compress(payload):
        try:
            proc = subprocess.run(argv, input=payload, capture_output=True, timeout=timeout, check=False)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise AdapterError(f"cannot run {argv[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            err = proc.stderr.decode(errors="replace").strip()
            raise AdapterError(f"{argv[0]!r} exited with status {proc.returncode}: {err}")
        if mode == "bytes":
            return len(proc.stdout)
        text = proc.stdout.decode(errors="replace").strip()
        try:
            return int(text)
        except ValueError:
            raise AdapterError(f"{argv[0]!r} printed {text!r}, expected a byte count") from None

    return CompressorAdapter(" ".join(argv), compress)


def compression_eprocess(bits, coder=KT, accounting="bytes") -> EProcessTrace:
    """Trace with ``log2 capital[t] = t - CL(x_1..x_t)``."""
    b = check_bits(bits)
    if isinstance(coder, KTCoder):
        cl = coder.code_lengths(b)
    elif isinstance(coder, CompressorAdapter):
        cl = coder.code_lengths(b, accounting)
    else:
        raise TypeError(f"coder must be KT or a CompressorAdapter, got {type(coder).__name__}")
    log2_capital = np.arange(1, b.size + 1) - cl
    return EProcessTrace.from_log_capital(_LN2 * log2_capital, f"compression/{coder.name}")


def kraft_check(coder=KT, n=1) -> float:
    """Sum of ``2^-CL(x)`` over all ``2^n`` strings of length ``n``."""
    if not isinstance(coder, KTCoder):
        raise TypeError("kraft_check enumerates the KT coder only")
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if n > KRAFT_MAX_N:
        raise ValueError(f"n={n} exceeds the enumeration limit {KRAFT_MAX_N}")
    strings = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int8).reshape(2 ** n, n)
    ones_before = np.cumsum(strings, axis=1) - strings
    n_before = np.arange(n)
    same = np.where(strings == 1, ones_before, n_before - ones_before)
    log2q = np.sum(np.log2((same + 0.5) / (n_before + 1.0)), axis=1)
    return math.fsum(np.exp2(log2q))


class CompressionEProcess(EProcessEstimator):
    """Estimator wrapper; ``coder`` is ``"kt"``, ``"zlib"`` or a :class:`CompressorAdapter`."""

    def __init__(self, coder="kt", accounting="bytes"):
        self.coder = coder
        self.accounting = accounting

    def _coder(self):
        if self.coder == "kt":
            return KT
        if self.coder == "zlib":
            return zlib_adapter()
        return self.coder

    def _trace(self, x):
        return compression_eprocess(x, self._coder(), self.accounting)
