import pathlib
import random

import pytest

from wsnsec import linksec
from wsnsec.addressing import BROADCAST_NODE_ID, NodeAddress
from wsnsec.keys import SymmetricKey, derive_keyring
from wsnsec.linksec import (
    AuthenticationError,
    CounterState,
    Encryption,
    FormatError,
    PacketHeader,
    ReplayError,
    SecurityLevel,
    UnknownDestinationError,
)

VECTORS = pathlib.Path(__file__).parent / "vectors" / "packet_vectors.txt"
MASTER = SymmetricKey.from_hex("00112233445566778899")
GROUP = 4
HEAD = NodeAddress(GROUP, 1)
SRC = NodeAddress(GROUP, 2)
PEER = NodeAddress(GROUP, 7)
ALL_LEVELS = [
    SecurityLevel(Encryption(e), a) for e in range(4) for a in (True, False)
]


def make_rings():
    ring_head = derive_keyring(MASTER, HEAD, HEAD, [SRC, PEER])
    ring_src = derive_keyring(MASTER, SRC, HEAD, [HEAD, PEER])
    ring_peer = derive_keyring(MASTER, PEER, HEAD, [HEAD, SRC])
    return ring_head, ring_src, ring_peer


class TestWireLayout:
    def test_header_bit_layout_by_hand(self):
        # length 5 into bits 7-3, level 2 into bits 2-1, auth into bit 0:
        # 5<<3 | 2<<1 | 1 = 0x2D
        header = PacketHeader(
            group=4, dest=1, src=2, length=5,
            level=SecurityLevel(Encryption.RC5_R8, True), counter_lsb=0xAB,
        )
        assert header.encode() == bytes((0x04, 0x01, 0x02, 0x2D, 0xAB))
        assert PacketHeader.decode(header.encode()) == header

    def test_wire_size_formula(self):
        _, ring_src, _ = make_rings()
        for level in ALL_LEVELS:
            for n in (0, 1, 10, 29):
                wire = linksec.encode(
                    level, ring_src, CounterState(), HEAD.node_id, bytes(n)
                )
                assert len(wire) == 5 + n + (4 if level.auth else 0)

    def test_addressing_overhead_constants(self):
        assert linksec.ADDRESS_OVERHEAD == 3
        assert linksec.TINYSEC_ADDRESS_OVERHEAD == 4

    def test_pinned_wire_vectors(self):
        _, ring_src, _ = make_rings()
        for line in VECTORS.read_text().splitlines():
            if not line or line.startswith("#"):
                continue
            enc, auth, dest, last, payload_hex, wire_hex = line.split()
            level = SecurityLevel(Encryption(int(enc)), bool(int(auth)))
            payload = b"" if payload_hex == "-" else bytes.fromhex(payload_hex)
            state = CounterState(int(last))
            wire = linksec.encode(level, ring_src, state, int(dest), payload)
            assert wire.hex() == wire_hex


class TestRoundTrip:
    @pytest.mark.parametrize("level", ALL_LEVELS)
    def test_member_to_head(self, level):
        ring_head, ring_src, _ = make_rings()
        tx, rx = CounterState(), CounterState()
        for i in range(3):
            payload = bytes((i,)) * (i + 3)
            wire = linksec.encode(level, ring_src, tx, HEAD.node_id, payload)
            assert linksec.decode(wire, ring_head, rx) == payload
        assert rx.value == tx.value == 3

    def test_pairwise_and_broadcast(self):
        ring_head, ring_src, ring_peer = make_rings()
        level = SecurityLevel(Encryption.RC5_R4, True)
        wire = linksec.encode(level, ring_src, CounterState(), PEER.node_id, b"pw")
        assert linksec.decode(wire, ring_peer, CounterState()) == b"pw"
        wire = linksec.encode(level, ring_src, CounterState(), BROADCAST_NODE_ID, b"bc")
        assert linksec.decode(wire, ring_head, CounterState()) == b"bc"
        assert linksec.decode(wire, ring_peer, CounterState()) == b"bc"

    def test_session_broadcast_excludes_stale_ring(self):
        ring_head, ring_src, ring_peer = make_rings()
        k1 = SymmetricKey(b"\x31" * 10)
        ring_head.session = k1
        ring_src.session = k1  # peer never got the re-key
        level = SecurityLevel(Encryption.RC5_R12, True)
        wire = linksec.encode(level, ring_head, CounterState(), BROADCAST_NODE_ID, b"s2")
        assert linksec.decode(wire, ring_src, CounterState()) == b"s2"
        with pytest.raises(AuthenticationError):
            linksec.decode(wire, ring_peer, CounterState())


class TestReplayAndRecovery:
    def test_duplicate_wire_rejected(self):
        ring_head, ring_src, _ = make_rings()
        level = SecurityLevel(Encryption.RC5_R8, True)
        wire = linksec.encode(level, ring_src, CounterState(), HEAD.node_id, b"x")
        state = CounterState()
        linksec.decode(wire, ring_head, state)
        before = state.value
        with pytest.raises(ReplayError):
            linksec.decode(wire, ring_head, state)
        assert state.value == before

    def test_older_packet_rejected(self):
        ring_head, ring_src, _ = make_rings()
        level = SecurityLevel(Encryption.RC5_R8, True)
        tx = CounterState()
        first = linksec.encode(level, ring_src, tx, HEAD.node_id, b"1")
        second = linksec.encode(level, ring_src, tx, HEAD.node_id, b"2")
        state = CounterState()
        linksec.decode(second, ring_head, state)
        with pytest.raises((ReplayError, AuthenticationError)):
            linksec.decode(first, ring_head, state)

    def test_counter_jump_recovery(self):
        # Sender races ahead by 300 counts (one full 8-bit wrap plus change);
        # the receiver recovers on an incremented high-24 candidate.
        ring_head, ring_src, _ = make_rings()
        level = SecurityLevel(Encryption.RC5_R8, True)
        tx, rx = CounterState(), CounterState()
        linksec.decode(linksec.encode(level, ring_src, tx, HEAD.node_id, b"a"), ring_head, rx)
        tx.value += 300
        wire = linksec.encode(level, ring_src, tx, HEAD.node_id, b"b")
        assert linksec.decode(wire, ring_head, rx, loss_threshold=2) == b"b"
        assert rx.value == tx.value

    def test_jump_beyond_threshold_rejected(self):
        ring_head, ring_src, _ = make_rings()
        level = SecurityLevel(Encryption.RC5_R8, True)
        tx, rx = CounterState(), CounterState()
        linksec.decode(linksec.encode(level, ring_src, tx, HEAD.node_id, b"a"), ring_head, rx)
        tx.value += 256 * 5  # five wraps, threshold allows two
        wire = linksec.encode(level, ring_src, tx, HEAD.node_id, b"b")
        with pytest.raises(AuthenticationError):
            linksec.decode(wire, ring_head, rx, loss_threshold=2)

    def test_unauthenticated_monotonicity(self):
        ring_head, ring_src, _ = make_rings()
        level = SecurityLevel(Encryption.RC5_R4, False)
        tx, rx = CounterState(), CounterState()
        wire = linksec.encode(level, ring_src, tx, HEAD.node_id, b"q")
        assert linksec.decode(wire, ring_head, rx) == b"q"
        with pytest.raises(ReplayError):
            linksec.decode(wire, ring_head, rx)


class TestTamper:
    def test_every_bit_flip_rejected(self):
        ring_head, ring_src, _ = make_rings()
        level = SecurityLevel(Encryption.RC5_R8, True)
        wire = linksec.encode(level, ring_src, CounterState(), HEAD.node_id, b"payload+10")
        for bit in range(len(wire) * 8):
            bad = bytearray(wire)
            bad[bit // 8] ^= 1 << (bit % 8)
            with pytest.raises((AuthenticationError, FormatError, ReplayError)):
                linksec.decode(bytes(bad), ring_head, CounterState())


class TestFormat:
    def test_reserved_lengths_rejected(self):
        ring_head, _, _ = make_rings()
        for length in (30, 31):
            header = bytes((GROUP, HEAD.node_id, SRC.node_id, (length << 3) | 0x03, 1))
            wire = header + bytes(length) + bytes(4)
            with pytest.raises(FormatError):
                linksec.decode(wire, ring_head, CounterState())

    def test_truncated_and_padded_wires_rejected(self):
        ring_head, ring_src, _ = make_rings()
        wire = linksec.encode(
            SecurityLevel(Encryption.RC5_R8, True), ring_src, CounterState(),
            HEAD.node_id, b"hello",
        )
        with pytest.raises(FormatError):
            linksec.decode(wire[:-1], ring_head, CounterState())
        with pytest.raises(FormatError):
            linksec.decode(wire + b"\x00", ring_head, CounterState())
        with pytest.raises(FormatError):
            linksec.decode(wire[:3], ring_head, CounterState())

    def test_oversize_payload_rejected(self):
        _, ring_src, _ = make_rings()
        with pytest.raises(ValueError):
            linksec.encode(
                SecurityLevel(Encryption.XOR, True), ring_src, CounterState(),
                HEAD.node_id, bytes(30),
            )

    def test_unknown_destination(self):
        _, ring_src, _ = make_rings()
        with pytest.raises(UnknownDestinationError):
            linksec.encode(
                SecurityLevel(Encryption.XOR, True), ring_src, CounterState(), 200, b"x"
            )

    def test_dissect_matches_encode(self):
        _, ring_src, _ = make_rings()
        wire = linksec.encode(
            SecurityLevel(Encryption.RC5_R12, False), ring_src, CounterState(41),
            PEER.node_id, b"abcdef",
        )
        info = linksec.dissect(wire)
        assert info == {
            "group": GROUP, "dest": PEER.node_id, "src": SRC.node_id,
            "length": 6, "encryption": "RC5_R12", "auth": False,
            "counter_lsb": 42, "wire_octets": 11, "expected_octets": 11,
        }


def test_randomized_roundtrips_with_synchronized_state():
    rnd = random.Random(31337)
    ring_head, ring_src, _ = make_rings()
    tx = {}
    rx = {}
    for _ in range(500):
        level = SecurityLevel(Encryption(rnd.randrange(4)), rnd.random() < 0.5)
        payload = rnd.randbytes(rnd.randrange(30))
        t = tx.setdefault(level.auth, CounterState())
        r = rx.setdefault(level.auth, CounterState())
        # separate auth/no-auth streams share one direction each
        wire = linksec.encode(level, ring_src, t, HEAD.node_id, payload)
        assert linksec.decode(wire, ring_head, r) == payload
