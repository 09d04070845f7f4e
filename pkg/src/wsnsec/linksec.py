"""Adaptive secure link-layer codec.

Wire layout (normative, bit-exact), 5 header octets:

    octet 0   group id
    octet 1   destination node id (0xFF = group broadcast)
    octet 2   source node id
    octet 3   bits 7-3 payload length (0..29), bits 2-1 encryption level,
              bit 0 authentication flag
    octet 4   low 8 bits of the 32-bit send counter
    5..       ciphertext (length per octet 3)
    tail      32-bit tag, present iff the authentication bit is set

Addressing costs 3 octets (group + src + dest) against TinySec's 4 while
covering the same 256*256 node space, because a node is identified by
{group, node id} and traffic never leaves its group.

Replay protection: both ends keep a 32-bit counter per (src, dest)
direction, but only the counter's low octet travels. The receiver splices
its expected counter's high 24 bits onto the received octet and, when the
tag does not verify, retries at the next few 256-wraps before rejecting,
which rides out bursts of lost packets. Accepted counters must strictly
increase, so no wire image is ever accepted twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional

from . import aead
from .addressing import BROADCAST_NODE_ID, NodeAddress
from .keys import KeyRing, SymmetricKey

HEADER_BYTES = 5
MAX_PAYLOAD = 29  # 5-bit field could hold 31; 30 and 31 are reserved-invalid
MAC_BYTES = 4
ADDRESS_OVERHEAD = 3
TINYSEC_ADDRESS_OVERHEAD = 2 + 2  # comparison constant: 2-octet src + dest
COUNTER_BITS = 32
DEFAULT_LOSS_THRESHOLD = 4


class Encryption(IntEnum):
    """2-bit wire codes for the four encryption levels."""

    XOR = 0
    RC5_R4 = 1
    RC5_R8 = 2
    RC5_R12 = 3

    @property
    def rounds(self) -> int:
        return (0, 4, 8, 12)[self]


@dataclass(frozen=True)
class SecurityLevel:
    encryption: Encryption
    auth: bool

    def __str__(self) -> str:
        return f"{self.encryption.name}{'+auth' if self.auth else ''}"


@dataclass
class CounterState:
    """Last accepted (receive) or last used (send) counter for one direction."""

    value: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.value < 1 << COUNTER_BITS:
            raise ValueError("counter must fit 32 bits")


@dataclass(frozen=True)
class PacketHeader:
    group: int
    dest: int
    src: int
    length: int
    level: SecurityLevel
    counter_lsb: int

    def encode(self) -> bytes:
        packed = (self.length << 3) | (self.level.encryption << 1) | int(self.level.auth)
        return bytes((self.group, self.dest, self.src, packed, self.counter_lsb))

    @classmethod
    def decode(cls, data: bytes) -> "PacketHeader":
        if len(data) < HEADER_BYTES:
            raise FormatError("truncated header")
        packed = data[3]
        return cls(
            group=data[0],
            dest=data[1],
            src=data[2],
            length=packed >> 3,
            level=SecurityLevel(Encryption((packed >> 1) & 0x3), bool(packed & 0x1)),
            counter_lsb=data[4],
        )


@dataclass
class SecurePacket:
    header: PacketHeader
    ciphertext: bytes
    mac: Optional[bytes] = None

    def to_wire(self) -> bytes:
        wire = self.header.encode() + self.ciphertext
        if self.mac is not None:
            wire += self.mac
        return wire


class DecodeError(Exception):
    """Base class for receive-side rejections."""


class FormatError(DecodeError):
    pass


class AuthenticationError(DecodeError):
    pass


class ReplayError(DecodeError):
    pass


class UnknownDestinationError(ValueError):
    """No key material for the requested destination."""


def wire_size(payload_len: int, auth: bool) -> int:
    return HEADER_BYTES + payload_len + (MAC_BYTES if auth else 0)


# ---------------------------------------------------------------------------
# Key selection. Destination semantics pick the key family:
#   dest 0xFF      group broadcast: session key once one is installed,
#                  otherwise the sender's broadcast key
#   dest == head   member-to-head channel under the sender's node-based key
#                  (the head holds each member's node-based key from setup)
#   otherwise      the pairwise key shared with that neighbor
# ---------------------------------------------------------------------------

def _sender_key(ring: KeyRing, dest: int) -> SymmetricKey:
    if dest == BROADCAST_NODE_ID:
        return ring.session if ring.session is not None else ring.broadcast
    if dest == ring.owner.node_id:
        raise UnknownDestinationError("cannot address a packet to oneself")
    if dest == ring.head.node_id and ring.owner != ring.head:
        return ring.node_based
    peer = NodeAddress(ring.owner.group_id, dest)
    try:
        return ring.pairwise[peer]
    except KeyError:
        raise UnknownDestinationError(f"no pairwise key for {peer}") from None


def _receiver_key(ring: KeyRing, src: int, dest: int) -> SymmetricKey:
    peer = NodeAddress(ring.owner.group_id, src)
    if dest == BROADCAST_NODE_ID:
        if ring.session is not None:
            return ring.session
        key = ring.peer_broadcast.get(peer)
    elif dest == ring.head.node_id and ring.owner == ring.head:
        key = ring.peer_node_based.get(peer)
    elif dest == ring.owner.node_id:
        key = ring.pairwise.get(peer)
    else:
        key = None
    if key is None:
        raise AuthenticationError(f"no key to receive {src} -> {dest}")
    return key


def encode(
    level: SecurityLevel,
    keyring: KeyRing,
    counter_state: CounterState,
    dest: int,
    payload: bytes,
) -> bytes:
    """Seal `payload` to `dest` and emit the wire bytes.

    Advances `counter_state` to the counter actually used. The source and
    group fields come from the keyring owner.
    """
    if len(payload) > MAX_PAYLOAD:
        raise ValueError(f"payload exceeds {MAX_PAYLOAD} octets")
    key = _sender_key(keyring, dest)
    counter = (counter_state.value + 1) & ((1 << COUNTER_BITS) - 1)
    counter_state.value = counter
    header = PacketHeader(
        group=keyring.owner.group_id,
        dest=dest,
        src=keyring.owner.node_id,
        length=len(payload),
        level=level,
        counter_lsb=counter & 0xFF,
    )
    aad = header.encode()
    ct, mac = aead.seal(key.data, level.encryption.rounds, counter, aad, payload, level.auth)
    return SecurePacket(header, ct, mac).to_wire()


def decode(
    wire: bytes,
    keyring: KeyRing,
    expected: CounterState,
    loss_threshold: int = DEFAULT_LOSS_THRESHOLD,
) -> bytes:
    """Verify and decrypt one wire packet, advancing `expected` on success.

    The candidate counter starts as the expected counter's high 24 bits
    joined with the received low octet; each retry adds one 256-wrap, up to
    `loss_threshold` wraps. Raises FormatError, AuthenticationError, or
    ReplayError; `expected` is untouched on any rejection. Without the auth
    bit nothing can verify a candidate, so there is no wrap search: the
    single reconstructed counter is taken on faith when it advances, and
    freshness degrades to counter monotonicity alone.
    """
    if loss_threshold < 0:
        raise ValueError("loss_threshold must be >= 0")
    header = PacketHeader.decode(wire)
    if header.length > MAX_PAYLOAD:
        raise FormatError(f"length {header.length} is reserved-invalid")
    if len(wire) != wire_size(header.length, header.level.auth):
        raise FormatError("wire size does not match header")
    if header.group != keyring.owner.group_id:
        raise AuthenticationError(
            f"packet for group {header.group}, ring owner in {keyring.owner.group_id}"
        )
    key = _receiver_key(keyring, header.src, header.dest)

    ct = wire[HEADER_BYTES : HEADER_BYTES + header.length]
    mac = wire[HEADER_BYTES + header.length :] if header.level.auth else None
    aad = wire[:HEADER_BYTES]
    rounds = header.level.encryption.rounds

    last = expected.value
    next_expected = (last + 1) & ((1 << COUNTER_BITS) - 1)
    base = (next_expected & ~0xFF) | header.counter_lsb

    if header.level.auth:
        for wrap in range(loss_threshold + 1):
            candidate = (base + (wrap << 8)) & ((1 << COUNTER_BITS) - 1)
            payload = aead.open_(key.data, rounds, candidate, aad, ct, mac, True)
            if payload is not None:
                if candidate <= last:
                    raise ReplayError(f"counter {candidate} not beyond {last}")
                expected.value = candidate
                return payload
        raise AuthenticationError(
            f"tag mismatch after {loss_threshold + 1} counter attempts"
        )

    # No tag, no way to verify a candidate: no wrap search. The single
    # reconstructed counter must advance or the packet is stale.
    if base <= last:
        raise ReplayError(f"counter {base} not beyond {last}")
    payload = aead.open_(key.data, rounds, base, aad, ct, None, False)
    expected.value = base
    return payload


def dissect(wire: bytes) -> dict:
    """Parse header fields without any key material (CLI support)."""
    header = PacketHeader.decode(wire)
    info = {
        "group": header.group,
        "dest": header.dest,
        "src": header.src,
        "length": header.length,
        "encryption": header.level.encryption.name,
        "auth": header.level.auth,
        "counter_lsb": header.counter_lsb,
        "wire_octets": len(wire),
        "expected_octets": wire_size(header.length, header.level.auth),
    }
    return info
