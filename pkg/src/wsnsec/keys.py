"""Symmetric key derivation and session re-keying.

Every key in the system is 80 bits and is derived from a pre-deployment
master key with a keyed PRF (HMAC-SHA256 truncated to 10 octets). Three key
families exist per node:

* node-based key, binding the node to its group head,
* pairwise keys, one per neighbor, identical on both ends,
* broadcast key, protecting the node's own group broadcasts.

A node also derives the broadcast and node-based keys of its neighbors while
the master key is still present (neighbor ids are exchanged during
deployment), so later head elections need no re-derivation. The master key
itself is deleted the moment derivation finishes: compromising a deployed
node exposes one-hop keys only, never the derivation root.

Byte encodings are normative and bit-exact. Each derivation is prefixed with
a 1-octet domain-separation tag so no two formulas can collide:

    node-based   0x01 || node(2) || head(2)
    pairwise     0x02 || min(i,j)(2) || max(i,j)(2)
    broadcast    0x03 || node(2)
    session      0x04 || group(1) || base_station(2)

Addresses encode as 2 octets (group, node); a bare group id as 1 octet.
"""

from __future__ import annotations

import hashlib
import hmac
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .addressing import NodeAddress

log = logging.getLogger(__name__)

KEY_BYTES = 10

TAG_NODE_BASED = b"\x01"
TAG_PAIRWISE = b"\x02"
TAG_BROADCAST = b"\x03"
TAG_SESSION = b"\x04"


class SymmetricKey:
    """An 80-bit key. Equality is constant time."""

    __slots__ = ("_data",)

    def __init__(self, data: bytes):
        if len(data) != KEY_BYTES:
            raise ValueError(f"key must be {KEY_BYTES} octets, got {len(data)}")
        self._data = bytes(data)

    @property
    def data(self) -> bytes:
        return self._data

    @classmethod
    def from_hex(cls, text: str) -> "SymmetricKey":
        return cls(bytes.fromhex(text))

    def hex(self) -> str:
        return self._data.hex()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymmetricKey):
            return NotImplemented
        return hmac.compare_digest(self._data, other._data)

    def __hash__(self) -> int:
        return hash(self._data)

    def __repr__(self) -> str:
        return f"SymmetricKey({self._data.hex()})"


PrfFn = Callable[["SymmetricKey", bytes], "SymmetricKey"]


def prf(key: SymmetricKey, message: bytes) -> SymmetricKey:
    """Keyed PRF: HMAC-SHA256 truncated to the key width.

    Deterministic; distinct messages under one key give computationally
    independent outputs. All derivation formulas call through this single
    substitution point, so tests can inject a double.
    """
    digest = hmac.new(key.data, message, hashlib.sha256).digest()
    return SymmetricKey(digest[:KEY_BYTES])


@dataclass
class KeyRing:
    """A node's post-setup key material. `master` is None once setup is done."""

    owner: NodeAddress
    head: NodeAddress
    node_based: SymmetricKey
    broadcast: SymmetricKey
    pairwise: dict[NodeAddress, SymmetricKey] = field(default_factory=dict)
    peer_broadcast: dict[NodeAddress, SymmetricKey] = field(default_factory=dict)
    peer_node_based: dict[NodeAddress, SymmetricKey] = field(default_factory=dict)
    master: Optional[SymmetricKey] = None
    session: Optional[SymmetricKey] = None


def _nb_message(node: NodeAddress, head: NodeAddress) -> bytes:
    return TAG_NODE_BASED + node.encode() + head.encode()


def _pw_message(a: NodeAddress, b: NodeAddress) -> bytes:
    lo, hi = sorted((a, b))
    return TAG_PAIRWISE + lo.encode() + hi.encode()


def _bc_message(node: NodeAddress) -> bytes:
    return TAG_BROADCAST + node.encode()


def derive_keyring(
    master: SymmetricKey,
    owner: NodeAddress,
    group_head: NodeAddress,
    neighbors: Iterable[NodeAddress],
    prf_fn: PrfFn = prf,
) -> KeyRing:
    """Run the deployment-time derivation and drop the master key.

    Besides the owner's own keys, the ring carries the broadcast and
    node-based keys of every neighbor: both are derivable only while the
    master key exists, and they are what lets the node decrypt neighbor
    broadcasts and, if elected head later, member uplinks.
    """
    neighbors = sorted(set(neighbors))
    if owner in neighbors:
        raise ValueError("a node is not its own neighbor")
    for n in neighbors:
        if n.group_id != owner.group_id:
            raise ValueError(f"neighbor {n} outside group {owner.group_id}")

    ring = KeyRing(
        owner=owner,
        head=group_head,
        node_based=prf_fn(master, _nb_message(owner, group_head)),
        broadcast=prf_fn(master, _bc_message(owner)),
    )
    for n in neighbors:
        ring.pairwise[n] = prf_fn(master, _pw_message(owner, n))
        ring.peer_broadcast[n] = prf_fn(master, _bc_message(n))
        ring.peer_node_based[n] = prf_fn(master, _nb_message(n, group_head))
    # Master key deletion: the returned ring never references it.
    return ring


def derive_session_key(
    master: SymmetricKey,
    group_id: int,
    base_station: NodeAddress,
    prf_fn: PrfFn = prf,
) -> SymmetricKey:
    """Derive the per-session group key a head multicasts to trusted members."""
    if not 0 <= group_id <= 0xFF:
        raise ValueError(f"group id out of 8-bit range: {group_id}")
    return prf_fn(master, TAG_SESSION + bytes((group_id,)) + base_station.encode())


def rekey_group(
    head_ring: KeyRing,
    member_trust: Mapping[NodeAddress, float],
    threshold: float,
    k1: SymmetricKey,
) -> set[NodeAddress]:
    """Select which members receive the new session key.

    Returns every member whose trust reaches `threshold`; the caller delivers
    `k1` to each of them under the head's pairwise key with that member.
    Members below the threshold keep their stale session key and are thereby
    cut off from session traffic. The head installs `k1` as its own session
    key immediately.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold must be in [0, 1), got {threshold}")
    recipients = {n for n, t in member_trust.items() if t >= threshold}
    head_ring.session = k1
    if not recipients and member_trust:
        log.warning(
            "re-key of group %d excludes every member", head_ring.owner.group_id
        )
    return recipients
