"""Two-octet node addressing: an 8-bit group id plus an 8-bit node id."""

from __future__ import annotations

from dataclasses import dataclass

# Total address space: 256 groups x 256 nodes.
GROUP_BITS = 8
NODE_BITS = 8
ADDRESS_SPACE = (1 << GROUP_BITS) * (1 << NODE_BITS)

# Reserved node ids within a group.
BASE_STATION_NODE_ID = 0x00
BROADCAST_NODE_ID = 0xFF


@dataclass(frozen=True, order=True)
class NodeAddress:
    """A {group id, node id} pair. Orders lexicographically on (group, node)."""

    group_id: int
    node_id: int

    def __post_init__(self) -> None:
        if not 0 <= self.group_id <= 0xFF:
            raise ValueError(f"group_id out of 8-bit range: {self.group_id}")
        if not 0 <= self.node_id <= 0xFF:
            raise ValueError(f"node_id out of 8-bit range: {self.node_id}")

    def encode(self) -> bytes:
        """Canonical 2-octet wire encoding: group octet then node octet."""
        return bytes((self.group_id, self.node_id))

    @classmethod
    def decode(cls, data: bytes) -> "NodeAddress":
        if len(data) != 2:
            raise ValueError("address encoding is exactly 2 octets")
        return cls(data[0], data[1])

    @classmethod
    def parse(cls, text: str) -> "NodeAddress":
        """Parse the "G.N" notation used by the CLI and config files."""
        try:
            group, node = text.split(".")
            return cls(int(group), int(node))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad address {text!r}, expected 'group.node'") from exc

    def __str__(self) -> str:
        return f"{self.group_id}.{self.node_id}"
