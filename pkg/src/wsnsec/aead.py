"""Per-packet payload protection: one-pass authenticated encryption.

Levels 1-3 run an OCB-style mode over RC5 (4, 8, or 12 rounds): a single
pass over the payload produces ciphertext and a 32-bit tag together, with
the packet header bound as associated data and the 32-bit send counter,
zero-extended to one block, as the nonce. Level 0 is a keystream XOR built
from successive PRF outputs over (counter, block index), with an optional
PRF-based 32-bit tag; it varies with the counter like the block modes but
offers no tamper resistance unless the tag is present.

The exact construction (normative for the pinned test vectors):

* ``l = E(0^64)``, ``l_inv = l * x^-1`` in GF(2^64) (poly x^64+x^4+x^3+x+1)
* ``r = E(nonce XOR l)``; offsets ``z[1] = l XOR r``,
  ``z[i] = z[i-1] XOR l * x^ntz(i)``
* full blocks: ``c[i] = E(m[i] XOR z[i]) XOR z[i]``
* final block: ``y = E(bitlen(m_final) XOR l_inv XOR z[m])``,
  ``c_final = m_final XOR y[:len]``
* checksum = XOR of full plaintext blocks, zero-padded final ciphertext,
  and ``y``; associated data is padded with 0x80 into one block and
  encrypted; tag = top 32 bits of ``E(checksum XOR z[m]) XOR E(pad(aad))``.

Block inputs that do not depend on each other are batched into single
kernel calls, so a seal costs three cipher invocations regardless of
payload length.
"""

from __future__ import annotations

import hashlib
import hmac
from functools import lru_cache
from typing import Optional

from . import rc5

TAG_BYTES = 4
_M64 = 0xFFFFFFFF_FFFFFFFF

# Domain tags for the level-0 stream expansion and its tag (the key
# derivation tags 0x01-0x04 live in `keys`).
_TAG_STREAM = b"\x05"
_TAG_STREAM_MAC = b"\x06"


def _double(x: int) -> int:
    x2 = (x << 1) & _M64
    return x2 ^ 0x1B if x >> 63 else x2


def _halve(x: int) -> int:
    x2 = x >> 1
    return x2 ^ 0x800000000000000D if x & 1 else x2


def _ntz(i: int) -> int:
    return (i & -i).bit_length() - 1


def _pad_block(data: bytes) -> bytes:
    if len(data) >= rc5.BLOCK_BYTES:
        raise ValueError("associated data must fit one block with padding")
    return data + b"\x80" + bytes(rc5.BLOCK_BYTES - len(data) - 1)


@lru_cache(maxsize=256)
def _setup(key: bytes, rounds: int) -> tuple[int, tuple[int, ...]]:
    l = int.from_bytes(rc5.encrypt_block(key, rounds, bytes(8)), "big")
    doubles = [l]
    for _ in range(8):
        doubles.append(_double(doubles[-1]))
    return _halve(l), tuple(doubles)


def _offsets(key: bytes, rounds: int, counter: int, m: int):
    l_inv, doubles = _setup(key, rounds)
    nonce = counter.to_bytes(8, "big")
    r_in = (int.from_bytes(nonce, "big") ^ doubles[0]).to_bytes(8, "big")
    r = int.from_bytes(rc5.encrypt_block(key, rounds, r_in), "big")
    z = [0] * (m + 1)
    z[1] = doubles[0] ^ r
    for i in range(2, m + 1):
        z[i] = z[i - 1] ^ doubles[_ntz(i)]
    return l_inv, z


def _seal_block_mode(key, rounds, counter, aad, plaintext, auth):
    m = max(1, (len(plaintext) + 7) // 8)
    l_inv, z = _offsets(key, rounds, counter, m)
    full = [plaintext[8 * i : 8 * i + 8] for i in range(m - 1)]
    final = plaintext[8 * (m - 1) :]

    batch = bytearray()
    for i, blk in enumerate(full, start=1):
        batch += (int.from_bytes(blk, "big") ^ z[i]).to_bytes(8, "big")
    batch += (len(final) * 8 ^ l_inv ^ z[m]).to_bytes(8, "big")
    if auth:
        batch += _pad_block(aad)
    out = rc5.encrypt_blocks(key, rounds, bytes(batch))

    checksum = 0
    ct = bytearray()
    for i, blk in enumerate(full, start=1):
        y = int.from_bytes(out[8 * (i - 1) : 8 * i], "big")
        ct += (y ^ z[i]).to_bytes(8, "big")
        checksum ^= int.from_bytes(blk, "big")
    y_final = int.from_bytes(out[8 * (m - 1) : 8 * m], "big")
    pad = y_final.to_bytes(8, "big")
    ct_final = bytes(p ^ q for p, q in zip(final, pad))
    ct += ct_final
    checksum ^= int.from_bytes(ct_final.ljust(8, b"\x00"), "big") ^ y_final

    tag = None
    if auth:
        auth_a = int.from_bytes(out[8 * m : 8 * m + 8], "big")
        t = rc5.encrypt_block(key, rounds, (checksum ^ z[m]).to_bytes(8, "big"))
        tag = ((int.from_bytes(t, "big") ^ auth_a) >> 32).to_bytes(4, "big")
    return bytes(ct), tag


def _open_block_mode(key, rounds, counter, aad, ciphertext, tag, auth):
    m = max(1, (len(ciphertext) + 7) // 8)
    l_inv, z = _offsets(key, rounds, counter, m)
    full = [ciphertext[8 * i : 8 * i + 8] for i in range(m - 1)]
    final = ciphertext[8 * (m - 1) :]

    checksum = 0
    pt = bytearray()
    if full:
        batch = bytearray()
        for i, blk in enumerate(full, start=1):
            batch += (int.from_bytes(blk, "big") ^ z[i]).to_bytes(8, "big")
        out = rc5.decrypt_blocks(key, rounds, bytes(batch))
        for i in range(1, m):
            word = int.from_bytes(out[8 * (i - 1) : 8 * i], "big") ^ z[i]
            pt += word.to_bytes(8, "big")
            checksum ^= word

    batch = bytearray((len(final) * 8 ^ l_inv ^ z[m]).to_bytes(8, "big"))
    if auth:
        batch += _pad_block(aad)
    out = rc5.encrypt_blocks(key, rounds, bytes(batch))
    y_final = int.from_bytes(out[:8], "big")
    pad = y_final.to_bytes(8, "big")
    pt_final = bytes(c ^ q for c, q in zip(final, pad))
    pt += pt_final
    checksum ^= int.from_bytes(final.ljust(8, b"\x00"), "big") ^ y_final

    if auth:
        auth_a = int.from_bytes(out[8:16], "big")
        t = rc5.encrypt_block(key, rounds, (checksum ^ z[m]).to_bytes(8, "big"))
        expect = ((int.from_bytes(t, "big") ^ auth_a) >> 32).to_bytes(4, "big")
        if tag is None or not hmac.compare_digest(expect, tag):
            return None
    return bytes(pt)


def _keystream(key: bytes, counter: int, length: int) -> bytes:
    out = bytearray()
    ctr = counter.to_bytes(4, "big")
    index = 0
    while len(out) < length:
        msg = _TAG_STREAM + ctr + index.to_bytes(4, "big")
        out += hmac.new(key, msg, hashlib.sha256).digest()
        index += 1
    return bytes(out[:length])


def _stream_tag(key: bytes, counter: int, aad: bytes, ciphertext: bytes) -> bytes:
    msg = (
        _TAG_STREAM_MAC
        + counter.to_bytes(4, "big")
        + len(aad).to_bytes(1, "big")
        + aad
        + ciphertext
    )
    return hmac.new(key, msg, hashlib.sha256).digest()[:TAG_BYTES]


def _check_args(key: bytes, counter: int) -> None:
    if len(key) != rc5.KEY_BYTES:
        raise ValueError(f"key must be {rc5.KEY_BYTES} octets")
    if not 0 <= counter < 1 << 32:
        raise ValueError("counter must fit 32 bits")


def seal(
    key: bytes,
    rounds: int,
    counter: int,
    aad: bytes,
    plaintext: bytes,
    auth: bool,
) -> tuple[bytes, Optional[bytes]]:
    """Encrypt `plaintext`; returns (ciphertext, tag-or-None).

    `rounds` 0 selects the level-0 keystream XOR, otherwise RC5 with that
    round count. Identical (key, counter, plaintext) always produce the
    same output; a different counter changes the whole ciphertext.
    """
    _check_args(key, counter)
    if rounds == 0:
        ct = bytes(p ^ k for p, k in zip(plaintext, _keystream(key, counter, len(plaintext))))
        return ct, _stream_tag(key, counter, aad, ct) if auth else None
    return _seal_block_mode(key, rounds, counter, aad, plaintext, auth)


def open_(
    key: bytes,
    rounds: int,
    counter: int,
    aad: bytes,
    ciphertext: bytes,
    tag: Optional[bytes],
    auth: bool,
) -> Optional[bytes]:
    """Inverse of :func:`seal`. Returns None when the tag does not verify."""
    _check_args(key, counter)
    if rounds == 0:
        if auth:
            expect = _stream_tag(key, counter, aad, ciphertext)
            if tag is None or not hmac.compare_digest(expect, tag):
                return None
        return bytes(
            c ^ k for c, k in zip(ciphertext, _keystream(key, counter, len(ciphertext)))
        )
    return _open_block_mode(key, rounds, counter, aad, ciphertext, tag, auth)


def rc5_invocations(payload_len: int, auth: bool) -> int:
    """Cipher-block invocations one seal (or open) performs; used by the
    simulator's energy accounting."""
    m = max(1, (payload_len + 7) // 8)
    return m + 1 + (2 if auth else 0)
