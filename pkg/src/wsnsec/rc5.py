"""RC5 block cipher, 32-bit words, 80-bit keys (RC5-32/r/10).

The link layer runs it at 4, 8, or 12 rounds depending on the negotiated
encryption level. Key schedules are expanded once per (key, rounds) pair and
cached; bulk block operations are dispatched to the compiled kernels in
``_kernels``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels

KEY_BYTES = 10
BLOCK_BYTES = 8
ROUNDS_ALLOWED = (4, 8, 12)

# Key-schedule magic constants for 32-bit words.
_P32 = 0xB7E15163
_Q32 = 0x9E3779B9
_M32 = 0xFFFFFFFF


def _rotl(x: int, n: int) -> int:
    n &= 31
    return ((x << n) | (x >> (32 - n))) & _M32 if n else x


@lru_cache(maxsize=256)
def _schedule(key: bytes, rounds: int) -> np.ndarray:
    """Expand `key` into the S table for `rounds` rounds (2r + 2 words)."""
    u = 4
    c = max(1, (len(key) + u - 1) // u)
    length = [0] * c
    for i in reversed(range(len(key))):
        length[i // u] = ((length[i // u] << 8) + key[i]) & _M32
    t = 2 * rounds + 2
    s = [(_P32 + i * _Q32) & _M32 for i in range(t)]
    a = b = i = j = 0
    for _ in range(3 * max(t, c)):
        a = s[i] = _rotl((s[i] + a + b) & _M32, 3)
        b = length[j] = _rotl((length[j] + a + b) & _M32, (a + b) & 31)
        i = (i + 1) % t
        j = (j + 1) % c
    arr = np.array(s, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def _check(key: bytes, rounds: int, data: bytes) -> None:
    if len(key) != KEY_BYTES:
        raise ValueError(f"RC5 key must be {KEY_BYTES} octets, got {len(key)}")
    if rounds not in ROUNDS_ALLOWED:
        raise ValueError(f"rounds must be one of {ROUNDS_ALLOWED}, got {rounds}")
    if len(data) % BLOCK_BYTES:
        raise ValueError("data length must be a multiple of 8 octets")


def _to_words(data: bytes) -> np.ndarray:
    return np.frombuffer(data, dtype="<u4").astype(np.int64).reshape(-1, 2)


def _to_bytes(words: np.ndarray) -> bytes:
    return words.astype("<u4").tobytes()


def encrypt_blocks(key: bytes, rounds: int, data: bytes) -> bytes:
    """Encrypt one or more 8-octet blocks."""
    _check(key, rounds, data)
    if not data:
        return b""
    return _to_bytes(_kernels.encrypt_words(_schedule(key, rounds), rounds, _to_words(data)))


def decrypt_blocks(key: bytes, rounds: int, data: bytes) -> bytes:
    """Decrypt one or more 8-octet blocks."""
    _check(key, rounds, data)
    if not data:
        return b""
    return _to_bytes(_kernels.decrypt_words(_schedule(key, rounds), rounds, _to_words(data)))


def encrypt_block(key: bytes, rounds: int, block: bytes) -> bytes:
    """Encrypt a single 64-bit block."""
    if len(block) != BLOCK_BYTES:
        raise ValueError("block must be exactly 8 octets")
    return encrypt_blocks(key, rounds, block)


def decrypt_block(key: bytes, rounds: int, block: bytes) -> bytes:
    """Decrypt a single 64-bit block."""
    if len(block) != BLOCK_BYTES:
        raise ValueError("block must be exactly 8 octets")
    return decrypt_blocks(key, rounds, block)
