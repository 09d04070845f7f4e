"""Hot RC5 block kernels with two interchangeable backends.

The default backend compiles the per-block loops with numba's @njit. Setting
the environment variable ``WSNSEC_PURE_NUMPY=1`` (or running without numba
installed) selects a vectorized pure-numpy path instead. Both backends work
on int64 arrays of 32-bit words with explicit masking, so their outputs are
bit-identical; ``benchmarks/bench_rc5.py`` compares their throughput.

Array layout: ``ab`` is an (n, 2) int64 array holding the two little-endian
32-bit words of n blocks. ``s`` is the expanded key schedule (2*rounds + 2
words). All values stay below 2**32; intermediates fit int64 (the widest is
a 32-bit word shifted left by at most 31).
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "WSNSEC_PURE_NUMPY"

_MASK = 0xFFFFFFFF


# ---------------------------------------------------------------------------
# Pure-numpy backend: vectorized across blocks.
# ---------------------------------------------------------------------------

def _encrypt_numpy(s: np.ndarray, rounds: int, ab: np.ndarray) -> np.ndarray:
    a = (ab[:, 0] + s[0]) & _MASK
    b = (ab[:, 1] + s[1]) & _MASK
    for i in range(1, rounds + 1):
        x = a ^ b
        n = b & 31
        a = (((x << n) | (x >> (32 - n))) + s[2 * i]) & _MASK
        x = b ^ a
        n = a & 31
        b = (((x << n) | (x >> (32 - n))) + s[2 * i + 1]) & _MASK
    return np.stack((a, b), axis=1)


def _decrypt_numpy(s: np.ndarray, rounds: int, ab: np.ndarray) -> np.ndarray:
    a = ab[:, 0].copy()
    b = ab[:, 1].copy()
    for i in range(rounds, 0, -1):
        x = (b - s[2 * i + 1]) & _MASK
        n = a & 31
        b = ((x >> n) | (x << (32 - n))) & _MASK ^ a
        x = (a - s[2 * i]) & _MASK
        n = b & 31
        a = ((x >> n) | (x << (32 - n))) & _MASK ^ b
    a = (a - s[0]) & _MASK
    b = (b - s[1]) & _MASK
    return np.stack((a, b), axis=1)


# ---------------------------------------------------------------------------
# Numba backend: scalar loop per block, jit-compiled.
# ---------------------------------------------------------------------------

def _encrypt_loop(s, rounds, ab, out):  # pragma: no cover - compiled
    for k in range(ab.shape[0]):
        a = (ab[k, 0] + s[0]) & _MASK
        b = (ab[k, 1] + s[1]) & _MASK
        for i in range(1, rounds + 1):
            x = a ^ b
            n = b & 31
            a = (((x << n) | (x >> (32 - n))) + s[2 * i]) & _MASK
            x = b ^ a
            n = a & 31
            b = (((x << n) | (x >> (32 - n))) + s[2 * i + 1]) & _MASK
        out[k, 0] = a
        out[k, 1] = b


def _decrypt_loop(s, rounds, ab, out):  # pragma: no cover - compiled
    for k in range(ab.shape[0]):
        a = ab[k, 0]
        b = ab[k, 1]
        for i in range(rounds, 0, -1):
            x = (b - s[2 * i + 1]) & _MASK
            n = a & 31
            b = (((x >> n) | (x << (32 - n))) & _MASK) ^ a
            x = (a - s[2 * i]) & _MASK
            n = b & 31
            a = (((x >> n) | (x << (32 - n))) & _MASK) ^ b
        out[k, 0] = (a - s[0]) & _MASK
        out[k, 1] = (b - s[1]) & _MASK


def _pure_numpy_requested() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


BACKEND = "numpy"
_njit_encrypt = None
_njit_decrypt = None

if not _pure_numpy_requested():
    try:
        from numba import njit

        _njit_encrypt = njit(cache=True)(_encrypt_loop)
        _njit_decrypt = njit(cache=True)(_decrypt_loop)
        BACKEND = "numba"
    except ImportError:
        pass


def encrypt_words(s: np.ndarray, rounds: int, ab: np.ndarray) -> np.ndarray:
    """Encrypt n blocks given as an (n, 2) int64 word array."""
    if BACKEND == "numba":
        out = np.empty_like(ab)
        _njit_encrypt(s, rounds, ab, out)
        return out
    return _encrypt_numpy(s, rounds, ab)


def decrypt_words(s: np.ndarray, rounds: int, ab: np.ndarray) -> np.ndarray:
    """Inverse of :func:`encrypt_words`."""
    if BACKEND == "numba":
        out = np.empty_like(ab)
        _njit_decrypt(s, rounds, ab, out)
        return out
    return _decrypt_numpy(s, rounds, ab)
