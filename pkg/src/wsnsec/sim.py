"""Deterministic discrete-event simulator for grouped sensor nodes.

Model (desk scale, normative for the closed-form energy tests):

* Nodes are split into groups; each group is a single-hop clique scheduled
  by TDM. Transmissions within a (group, frame) take consecutive slots and
  only the slot owner transmits; everyone else listens promiscuously.
  Non-destinations pay header-only receive energy (early rejection),
  destinations and broadcast listeners receive and decrypt the whole
  packet. Replay attackers transmit out of turn, which observers book as
  collisions.
* Traffic per frame and group: the head broadcasts a schedule beacon
  (routing control), every member sends one sensed-data packet to the
  head, and the head hands the previous frame's aggregate (member payloads
  concatenated and truncated to the maximum payload) to a rotating duty
  member, which relays it toward the base station and re-broadcasts the
  beacon. The base-station uplink is modeled as transmit cost only; in a
  single-member group the head stages (seals) the aggregate without radio.
* Sessions: every `session_length` frames the head derives a fresh session
  key from a per-session seed handed over by the safe base station out of
  band, and delivers it under pairwise keys to members whose trust reaches
  the re-key threshold. Group broadcasts ride the session key once one
  exists, so an excluded member can no longer read them.
* Elections: when the head's remaining energy falls below 20% of the group
  median it calls an election (broadcast + one vote per member + result
  broadcast) and hands over to the vote winner.
* Adversaries: `drop-fraction` nodes drop duty obligations, `replay-attacker`
  nodes retransmit a captured packet out of slot each frame, `captured`
  nodes advertise rising energy readings and trip the suspicious flag.

Runs are pure functions of the config: one `random.Random(seed)` instance
drives adversary drops and channel loss, everything else is arithmetic.
"""

from __future__ import annotations

import io
import json
import random
import statistics
from dataclasses import dataclass, field, replace
from typing import Optional

from . import aead, linksec
from .addressing import BROADCAST_NODE_ID, NodeAddress
from .agent import (
    Layer,
    PacketClass,
    ScenarioPolicy,
    SecurityAgent,
    SCENARIO_ALIASES,
    SCENARIO_NAMES,
    default_policy,
)
from .keys import (
    KeyRing,
    SymmetricKey,
    derive_keyring,
    derive_session_key,
    prf,
    rekey_group,
)
from .linksec import CounterState, Encryption, SecurityLevel
from .trust import CSV_COLUMNS, TrustTable, TrustWeights, run_election

BASE_STATION = NodeAddress(0, 0)
MAX_GROUP_MEMBERS = 254  # node id 0 is the base station, 0xFF is broadcast
_SESSION_SEED_TAG = b"\x10"

ADVERSARY_BEHAVIORS = ("drop-fraction", "replay-attacker", "captured")


# =============================================================================
# Configuration
# =============================================================================

@dataclass(frozen=True)
class EnergyModel:
    tx_per_octet: float = 0.0006
    rx_per_octet: float = 0.0003
    rc5_per_block_per_round: float = 0.000002
    xor_per_octet: float = 0.000001
    mac_fixed: float = 0.00001
    initial_energy: float = 1000.0

    def __post_init__(self) -> None:
        for name in (
            "tx_per_octet",
            "rx_per_octet",
            "rc5_per_block_per_round",
            "xor_per_octet",
            "mac_fixed",
            "initial_energy",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class AdversarySpec:
    node: NodeAddress
    behavior: str
    drop_fraction: float = 1.0
    start_frame: int = 0

    def __post_init__(self) -> None:
        if self.behavior not in ADVERSARY_BEHAVIORS:
            raise ValueError(f"behavior must be one of {ADVERSARY_BEHAVIORS}")
        if not 0.0 <= self.drop_fraction <= 1.0:
            raise ValueError("drop_fraction must be in [0, 1]")
        if self.start_frame < 0:
            raise ValueError("start_frame must be non-negative")


@dataclass(frozen=True)
class SimConfig:
    seed: int = 1
    node_count: int = 20
    group_count: int = 2
    slots_per_frame: Optional[int] = None
    session_length: int = 50
    sim_length: int = 500
    scenario: ScenarioPolicy = None  # type: ignore[assignment]
    adaptive: bool = True
    adversaries: tuple[AdversarySpec, ...] = ()
    energy_model: EnergyModel = field(default_factory=EnergyModel)
    trust_weights: TrustWeights = field(default_factory=TrustWeights)
    rekey_threshold: float = 0.4
    loss_threshold: int = 4
    loss_rate: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit 64 bits")
        if not 1 <= self.group_count <= 256:
            raise ValueError("group_count must be in 1..256")
        if not 1 <= self.node_count <= 65536:
            raise ValueError("node_count must be in 1..65536")
        per_group = -(-self.node_count // self.group_count)
        if per_group > MAX_GROUP_MEMBERS:
            raise ValueError(
                f"groups of {per_group} exceed {MAX_GROUP_MEMBERS} addressable members"
            )
        if self.slots_per_frame is not None and self.slots_per_frame < per_group:
            raise ValueError("slots_per_frame smaller than the largest group")
        if self.session_length < 1:
            raise ValueError("session_length must be at least one frame")
        if self.sim_length < 0:
            raise ValueError("sim_length must be non-negative")
        if not 0.0 <= self.rekey_threshold < 1.0:
            raise ValueError("rekey_threshold must be in [0, 1)")
        if self.loss_threshold < 0:
            raise ValueError("loss_threshold must be non-negative")
        if not 0.0 <= self.loss_rate < 1.0:
            raise ValueError("loss_rate must be in [0, 1)")
        if self.scenario is None:
            object.__setattr__(
                self,
                "scenario",
                default_policy("habitat-monitoring", self.energy_model.initial_energy),
            )


# =============================================================================
# Reports
# =============================================================================

@dataclass
class EnergyLedger:
    tx: float = 0.0
    rx: float = 0.0
    crypto: float = 0.0

    @property
    def total(self) -> float:
        return self.tx + self.rx + self.crypto


@dataclass
class NodeStats:
    address: NodeAddress
    ledger: EnergyLedger = field(default_factory=EnergyLedger)
    alive: bool = True
    packets_sent: int = 0
    decode_ok: int = 0
    auth_rejects: int = 0
    replay_rejects: int = 0
    format_rejects: int = 0
    replay_accepted: int = 0
    bcast_ok_before_rekey: int = 0
    bcast_ok_after_rekey: int = 0
    bcast_fail: int = 0


@dataclass(frozen=True)
class ElectionEvent:
    frame: int
    group_id: int
    old_head: NodeAddress
    new_head: NodeAddress
    vice_head: Optional[NodeAddress]


@dataclass(frozen=True)
class RekeyEvent:
    frame: int
    group_id: int
    session_index: int
    recipients: tuple[NodeAddress, ...]
    excluded: tuple[NodeAddress, ...]


@dataclass
class SimReport:
    seed: int
    scenario_name: str
    adaptive: bool
    frames: int
    nodes: dict[NodeAddress, NodeStats]
    elections: list[ElectionEvent]
    rekeys: list[RekeyEvent]
    trust_tables: dict[NodeAddress, TrustTable]
    slot_log: list[tuple[int, int, int, NodeAddress, bool]]

    def total_energy(self) -> float:
        return sum(s.ledger.total for s in self.nodes.values())

    def energy_csv(self) -> str:
        buf = io.StringIO()
        buf.write("node,tx_j,rx_j,crypto_j,total_j\n")
        for addr in sorted(self.nodes):
            led = self.nodes[addr].ledger
            buf.write(
                f"{addr},{led.tx:.9f},{led.rx:.9f},{led.crypto:.9f},{led.total:.9f}\n"
            )
        return buf.getvalue()

    def summary_text(self) -> str:
        lines = [
            f"scenario: {self.scenario_name}",
            f"mode: {'adaptive' if self.adaptive else 'fixed'}",
            f"frames: {self.frames}  seed: {self.seed}",
            f"total energy: {self.total_energy():.9f} J",
            f"elections: {len(self.elections)}  re-keys: {len(self.rekeys)}",
        ]
        return "\n".join(lines) + "\n"

    def trust_csv(self) -> str:
        """Every observer's neighbor table, one header, fixed column order."""
        lines = [",".join(CSV_COLUMNS)]
        for addr in sorted(self.trust_tables):
            lines.extend(self.trust_tables[addr].to_csv().splitlines()[1:])
        return "\n".join(lines) + "\n"


@dataclass
class SavingsReport:
    scenario_name: str
    fixed: SimReport
    adaptive: SimReport

    def per_node(self) -> list[tuple[NodeAddress, float, float, float]]:
        rows = []
        for addr in sorted(self.fixed.nodes):
            f = self.fixed.nodes[addr].ledger.total
            a = self.adaptive.nodes[addr].ledger.total
            pct = 100.0 * (f - a) / f if f > 0 else 0.0
            rows.append((addr, f, a, pct))
        return rows

    @property
    def total_saving_pct(self) -> float:
        f = self.fixed.total_energy()
        if f <= 0:
            return 0.0
        return 100.0 * (f - self.adaptive.total_energy()) / f

    def savings_csv(self) -> str:
        buf = io.StringIO()
        buf.write("node,fixed_j,adaptive_j,saving_pct\n")
        for addr, f, a, pct in self.per_node():
            buf.write(f"{addr},{f:.9f},{a:.9f},{pct:.9f}\n")
        return buf.getvalue()

    def summary_text(self) -> str:
        return (
            f"scenario: {self.scenario_name}\n"
            f"fixed energy:    {self.fixed.total_energy():.9f} J\n"
            f"adaptive energy: {self.adaptive.total_energy():.9f} J\n"
            f"total saving:    {self.total_saving_pct:.4f} %\n"
        )


# =============================================================================
# Internal node / group state
# =============================================================================

class _Node:
    def __init__(self, addr: NodeAddress, ring: KeyRing, config: SimConfig):
        self.addr = addr
        self.ring = ring
        self.table = TrustTable(observer=addr, weights=config.trust_weights)
        self.agent = SecurityAgent(config.scenario)
        self.stats = NodeStats(address=addr)
        self.model = config.energy_model
        self.adversary: Optional[AdversarySpec] = None
        self.captured_wire: Optional[tuple[bytes, int]] = None  # (wire, dest)
        self.out_ctr: dict[int, CounterState] = {}
        self.in_ctr: dict[tuple[int, int], CounterState] = {}

    @property
    def alive(self) -> bool:
        return self.stats.alive

    @property
    def remaining(self) -> float:
        return self.model.initial_energy - self.stats.ledger.total

    def debit(self, kind: str, joules: float) -> None:
        if not self.stats.alive:
            return
        joules = min(joules, self.remaining)
        setattr(self.stats.ledger, kind, getattr(self.stats.ledger, kind) + joules)
        if self.remaining <= 0:
            self.stats.alive = False

    def counter_to(self, dest: int) -> CounterState:
        return self.out_ctr.setdefault(dest, CounterState())

    def counter_from(self, src: int, dest: int) -> CounterState:
        return self.in_ctr.setdefault((src, dest), CounterState())


class _Group:
    def __init__(self, gid: int, nodes: list[_Node]):
        self.gid = gid
        self.nodes = sorted(nodes, key=lambda n: n.addr)
        self.head = self.nodes[0]
        self.vice: Optional[_Node] = None
        self.pending_aggregate: Optional[bytes] = None
        self.session_index = 0
        self.first_rekey_frame: Optional[int] = None
        self.last_election_frame: Optional[int] = None
        self.next_slot = 0


# =============================================================================
# Simulation
# =============================================================================

class _Simulation:
    def __init__(self, config: SimConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        self.model = config.energy_model
        # Network-wide deployment master key; the simulator plays the safe
        # base station and therefore keeps it for session seeds.
        self.bs_master = prf(
            SymmetricKey(b"\x00" * 10), b"master" + config.seed.to_bytes(8, "big")
        )
        self.groups = self._build_groups()
        self.nodes: dict[NodeAddress, _Node] = {
            n.addr: n for g in self.groups for n in g.nodes
        }
        for spec in config.adversaries:
            node = self.nodes.get(spec.node)
            if node is None:
                raise ValueError(f"adversary {spec.node} is not a simulated node")
            node.adversary = spec
        self.elections: list[ElectionEvent] = []
        self.rekeys: list[RekeyEvent] = []
        self.slot_log: list[tuple[int, int, int, NodeAddress, bool]] = []

    # ---- topology -----------------------------------------------------------

    def _build_groups(self) -> list[_Group]:
        cfg = self.config
        sizes = [cfg.node_count // cfg.group_count] * cfg.group_count
        for i in range(cfg.node_count % cfg.group_count):
            sizes[i] += 1
        groups = []
        for gid, size in enumerate(sizes):
            if size == 0:
                continue
            addrs = [NodeAddress(gid, i + 1) for i in range(size)]
            head = addrs[0]
            members = []
            for addr in addrs:
                ring = derive_keyring(
                    self.bs_master, addr, head, [a for a in addrs if a != addr]
                )
                members.append(_Node(addr, ring, cfg))
            groups.append(_Group(gid, members))
        return groups

    # ---- per-packet helpers -------------------------------------------------

    def _decide(self, sender: _Node, pclass: PacketClass) -> SecurityLevel:
        if not self.config.adaptive:
            return self.config.scenario.fixed_level
        return sender.agent.decide(pclass)

    def _crypto_cost(self, level: SecurityLevel, payload_len: int) -> float:
        if level.encryption is Encryption.XOR:
            cost = self.model.xor_per_octet * payload_len
        else:
            cost = (
                self.model.rc5_per_block_per_round
                * level.encryption.rounds
                * aead.rc5_invocations(payload_len, level.auth)
            )
        if level.auth:
            cost += self.model.mac_fixed
        return cost

    def _alive_members(self, group: _Group) -> list[_Node]:
        return [n for n in group.nodes if n.alive]

    def _apply_events(
        self, group: _Group, events: list[tuple[NodeAddress, str, Optional[float]]]
    ) -> None:
        for observer in self._alive_members(group):
            for subject, kind, value in events:
                if subject != observer.addr:
                    observer.table.record(subject, kind, value)

    def _transmit(
        self,
        group: _Group,
        frame: int,
        sender: _Node,
        dest: int,
        pclass: PacketClass,
        payload: bytes,
        in_slot: bool = True,
        replayed_wire: Optional[bytes] = None,
    ) -> dict[NodeAddress, bytes]:
        """One on-air transmission: energy, trust observations, deliveries.

        Honest transmissions each take the group's next TDM slot; an
        out-of-slot injection reuses the current slot, which observers book
        as a collision. Returns successful decodes keyed by receiver."""
        if not sender.alive:
            return {}
        if in_slot:
            slot = group.next_slot
            group.next_slot += 1
        else:
            slot = max(group.next_slot - 1, 0)
        if replayed_wire is None:
            level = self._decide(sender, pclass)
            wire = linksec.encode(
                level, sender.ring, sender.counter_to(dest), dest, payload
            )
            sender.debit("crypto", self._crypto_cost(level, len(payload)))
        else:
            # Verbatim retransmission of captured bytes: no sealing work.
            wire = replayed_wire
        sender.debit("tx", self.model.tx_per_octet * len(wire))
        sender.stats.packets_sent += 1
        self.slot_log.append((frame, group.gid, slot, sender.addr, in_slot))

        events: list[tuple[NodeAddress, str, Optional[float]]] = [
            (sender.addr, "packet-transmitted", None)
        ]
        if not in_slot:
            events.append((sender.addr, "collision", None))
        if dest != BROADCAST_NODE_ID:
            events.append((NodeAddress(group.gid, dest), "packet-received", None))

        header = linksec.PacketHeader.decode(wire)
        decoded: dict[NodeAddress, bytes] = {}
        for listener in self._alive_members(group):
            if listener is sender:
                continue
            if self.config.loss_rate and self.rng.random() < self.config.loss_rate:
                continue
            is_dest = dest == BROADCAST_NODE_ID or listener.addr.node_id == dest
            if not is_dest:
                # Promiscuous listeners parse the clear header, then gate off.
                listener.debit("rx", self.model.rx_per_octet * linksec.HEADER_BYTES)
                continue
            listener.debit("rx", self.model.rx_per_octet * len(wire))
            listener.debit("crypto", self._crypto_cost(header.level, header.length))
            state = listener.counter_from(header.src, header.dest)
            try:
                plain = linksec.decode(
                    wire, listener.ring, state, self.config.loss_threshold
                )
            except linksec.ReplayError:
                listener.stats.replay_rejects += 1
            except linksec.AuthenticationError:
                listener.stats.auth_rejects += 1
                if dest == BROADCAST_NODE_ID:
                    listener.stats.bcast_fail += 1
            except linksec.FormatError:
                listener.stats.format_rejects += 1
            else:
                listener.stats.decode_ok += 1
                decoded[listener.addr] = plain
                if replayed_wire is not None:
                    listener.stats.replay_accepted += 1
                if dest == BROADCAST_NODE_ID:
                    if group.first_rekey_frame is None:
                        listener.stats.bcast_ok_before_rekey += 1
                    else:
                        listener.stats.bcast_ok_after_rekey += 1
        self._apply_events(group, events)

        # Replay attackers squirrel away the latest sensed-data wire bytes.
        if pclass is PacketClass.SENSED_DATA and replayed_wire is None:
            for node in self._alive_members(group):
                if (
                    node.adversary is not None
                    and node.adversary.behavior == "replay-attacker"
                    and node is not sender
                ):
                    node.captured_wire = (wire, dest)
        return decoded

    # ---- frame machinery ----------------------------------------------------

    def _maybe_election(self, group: _Group, frame: int) -> None:
        members = self._alive_members(group)
        if not members:
            return
        head = group.head
        if not head.alive:
            # Head failure: the vice steps in without a vote (that is what
            # it was elected for); the lowest survivor otherwise.
            successor = group.vice if group.vice and group.vice.alive else members[0]
            group.head = successor
            group.vice = None
            for node in group.nodes:
                node.ring.head = successor.addr
            return
        if len(members) < 2 or frame == 0:
            return
        # A re-elected head stays in charge; do not spin the vote every
        # frame while it remains drained.
        if (
            group.last_election_frame is not None
            and frame - group.last_election_frame < self.config.session_length
        ):
            return
        median = statistics.median(n.remaining for n in members)
        if head.remaining >= 0.2 * median:
            return
        # Step 1: the head calls for a re-election.
        self._transmit(
            group, frame, head, BROADCAST_NODE_ID, PacketClass.CONTROL, b"reelect!"
        )
        # Step 2: every other member casts its vote toward the head.
        for member in members:
            if member is head:
                continue
            self._transmit(
                group, frame, member, head.addr.node_id, PacketClass.CONTROL,
                member.addr.encode() + b"\x00\x00",
            )
        # Step 3: tally and hand over.
        tables = {n.addr: n.table for n in members}
        new_head, vice = run_election([n.addr for n in members], tables, head.addr)
        result = new_head.encode() + (vice.encode() if vice else b"\x00\x00")
        self._transmit(
            group, frame, head, BROADCAST_NODE_ID, PacketClass.CONTROL, result
        )
        self.elections.append(
            ElectionEvent(frame, group.gid, head.addr, new_head, vice)
        )
        group.last_election_frame = frame
        group.vice = self.nodes[vice] if vice is not None else None
        if new_head != head.addr:
            group.head = self.nodes[new_head]
            for node in group.nodes:
                node.ring.head = new_head

    def _maybe_rekey(self, group: _Group, frame: int) -> None:
        if frame == 0 or frame % self.config.session_length != 0:
            return
        members = self._alive_members(group)
        head = group.head
        if not head.alive or len(members) < 2:
            return
        group.session_index += 1
        # Fresh per-session seed from the (safe) base station, out of band.
        seed = prf(
            self.bs_master, _SESSION_SEED_TAG + group.session_index.to_bytes(4, "big")
        )
        k1 = derive_session_key(seed, group.gid, BASE_STATION)
        member_trust = {
            n.addr: head.table.election_trust(n.addr) for n in members if n is not head
        }
        recipients = rekey_group(
            head.ring, member_trust, self.config.rekey_threshold, k1
        )
        for addr in sorted(recipients):
            decoded = self._transmit(
                group, frame, head, addr.node_id, PacketClass.KEY_MATERIAL, k1.data
            )
            if addr in decoded:
                self.nodes[addr].ring.session = SymmetricKey(decoded[addr])
        excluded = tuple(sorted(set(member_trust) - recipients))
        if group.first_rekey_frame is None:
            group.first_rekey_frame = frame
        self.rekeys.append(
            RekeyEvent(
                frame, group.gid, group.session_index,
                tuple(sorted(recipients)), excluded,
            )
        )

    def _group_frame(self, group: _Group, frame: int) -> None:
        members = self._alive_members(group)
        if not members:
            return
        head = group.head
        if not head.alive:
            return
        others = [n for n in members if n is not head]
        if not others:
            # Lone node: nothing goes on air; it stages its sealed aggregate
            # until a relay exists.
            if group.pending_aggregate is not None:
                level = self._decide(head, PacketClass.SENSED_DATA)
                head.debit(
                    "crypto", self._crypto_cost(level, len(group.pending_aggregate))
                )
            own = bytes((frame + head.addr.node_id + i) & 0xFF for i in range(10))
            group.pending_aggregate = own[: linksec.MAX_PAYLOAD]
            return
        duty = others[frame % len(others)]

        # Head slot: schedule beacon, then the aggregate handoff.
        beacon = frame.to_bytes(4, "big") + bytes((group.gid,)) + b"\x00\x00\x00"
        beacon_rx = self._transmit(
            group, frame, head, BROADCAST_NODE_ID, PacketClass.ROUTING_CONTROL, beacon
        )
        duty_has_beacon = duty.addr in beacon_rx
        self._apply_events(group, [(duty.addr, "control-received-for-forward", None)])
        handoff_ok = False
        if group.pending_aggregate is not None:
            decoded = self._transmit(
                group, frame, head, duty.addr.node_id, PacketClass.SENSED_DATA,
                group.pending_aggregate,
            )
            self._apply_events(
                group, [(duty.addr, "data-received-for-forward", None)]
            )
            handoff_ok = duty.addr in decoded

        # Member slots in address order: one data packet each; the duty
        # member additionally relays uplink and beacon.
        collected: list[bytes] = []
        for member in others:
            payload = bytes(
                (frame + member.addr.node_id + i) & 0xFF for i in range(10)
            )
            decoded = self._transmit(
                group, frame, member, head.addr.node_id, PacketClass.SENSED_DATA,
                payload,
            )
            if head.addr in decoded:
                collected.append(decoded[head.addr])

            if member is duty:
                drops = (
                    member.adversary is not None
                    and member.adversary.behavior == "drop-fraction"
                    and frame >= member.adversary.start_frame
                )
                if handoff_ok:
                    if drops and self.rng.random() < member.adversary.drop_fraction:
                        self._apply_events(
                            group, [(member.addr, "packet-dropped", None)]
                        )
                    else:
                        # Uplink toward the base station: off-group radio,
                        # modeled as transmit + seal cost with no receiver.
                        level = self._decide(member, PacketClass.SENSED_DATA)
                        size = linksec.wire_size(
                            len(group.pending_aggregate), level.auth
                        )
                        member.debit(
                            "crypto",
                            self._crypto_cost(level, len(group.pending_aggregate)),
                        )
                        member.debit("tx", self.model.tx_per_octet * size)
                        member.stats.packets_sent += 1
                        self._apply_events(
                            group, [(member.addr, "data-forwarded", None)]
                        )
                if duty_has_beacon:
                    if drops and self.rng.random() < member.adversary.drop_fraction:
                        pass
                    else:
                        self._transmit(
                            group, frame, member, BROADCAST_NODE_ID,
                            PacketClass.ROUTING_CONTROL, beacon,
                        )
                        self._apply_events(
                            group, [(member.addr, "control-forwarded", None)]
                        )

            if (
                member.adversary is not None
                and member.adversary.behavior == "replay-attacker"
                and frame >= member.adversary.start_frame
                and member.captured_wire is not None
            ):
                wire, dest = member.captured_wire
                self._transmit(
                    group, frame, member, dest, PacketClass.SENSED_DATA, b"",
                    in_slot=False, replayed_wire=wire,
                )

        # The head's own reading joins locally; the aggregate ships next frame.
        own = bytes((frame + head.addr.node_id + i) & 0xFF for i in range(10))
        blob = own + b"".join(collected)
        group.pending_aggregate = blob[: linksec.MAX_PAYLOAD]

    def _frame_end(self, frame: int) -> None:
        for group in self.groups:
            members = self._alive_members(group)
            samples: list[tuple[NodeAddress, str, Optional[float]]] = []
            for node in members:
                claimed = node.remaining
                if (
                    node.adversary is not None
                    and node.adversary.behavior == "captured"
                    and frame >= node.adversary.start_frame
                ):
                    # Compromised nodes overstate their battery to win
                    # energy-based handovers.
                    claimed = self.model.initial_energy + 1.0 + frame
                samples.append((node.addr, "energy-sample", claimed))
                samples.append((node.addr, "signal-sample", 0.8))
            self._apply_events(group, samples)
            for node in members:
                node.agent.report(Layer.PHYSICAL, "energy", node.remaining)
                for neighbor in node.table.rows:
                    node.agent.report(
                        Layer.LINK, "trust",
                        (neighbor, node.table.election_trust(neighbor)),
                    )

    def run(self) -> SimReport:
        for frame in range(self.config.sim_length):
            for group in self.groups:
                group.next_slot = 0
                self._maybe_election(group, frame)
                self._maybe_rekey(group, frame)
                self._group_frame(group, frame)
            self._frame_end(frame)
        return SimReport(
            seed=self.config.seed,
            scenario_name=self.config.scenario.name,
            adaptive=self.config.adaptive,
            frames=self.config.sim_length,
            nodes={addr: node.stats for addr, node in self.nodes.items()},
            elections=self.elections,
            rekeys=self.rekeys,
            trust_tables={addr: node.table for addr, node in self.nodes.items()},
            slot_log=self.slot_log,
        )


def run(config: SimConfig) -> SimReport:
    """Execute one deterministic run; same config and seed, same report."""
    return _Simulation(config).run()


def compare_fixed_vs_adaptive(config: SimConfig) -> SavingsReport:
    """Run the same seeded scenario with the agent off, then on.

    The fixed arm pins every packet at the scenario's no-agent deployment
    level; the adaptive arm lets the per-node agent pick levels."""
    fixed = run(replace(config, adaptive=False))
    adaptive = run(replace(config, adaptive=True))
    return SavingsReport(
        scenario_name=config.scenario.name, fixed=fixed, adaptive=adaptive
    )


# =============================================================================
# Config file loading (JSON; keys match the dataclass fields)
# =============================================================================

def _parse_level(obj) -> SecurityLevel:
    return SecurityLevel(Encryption(int(obj["encryption"])), bool(obj["auth"]))


def _parse_scenario(obj, initial_energy: float) -> ScenarioPolicy:
    if isinstance(obj, str):
        return default_policy(obj, initial_energy)
    name = SCENARIO_ALIASES.get(obj.get("name"), obj.get("name"))
    policy = default_policy(name, initial_energy) if name in SCENARIO_NAMES else None
    kwargs = {}
    for key in ("base_level", "min_level", "fixed_level"):
        if key in obj:
            kwargs[key] = _parse_level(obj[key])
    for key in ("energy_floor", "trust_alarm"):
        if key in obj:
            kwargs[key] = float(obj[key])
    if policy is not None:
        return replace(policy, **kwargs)
    if "base_level" not in kwargs:
        raise ValueError("custom scenarios need at least a base_level")
    return ScenarioPolicy(
        name=obj.get("name", "custom"),
        base_level=kwargs["base_level"],
        min_level=kwargs.get("min_level", kwargs["base_level"]),
        energy_floor=kwargs.get("energy_floor", 0.0),
        trust_alarm=kwargs.get("trust_alarm", 0.3),
        fixed_level=kwargs.get("fixed_level", SecurityLevel(Encryption.RC5_R12, True)),
    )


def config_from_dict(data: dict) -> SimConfig:
    """Build a SimConfig from the documented JSON schema."""
    data = dict(data)
    energy = EnergyModel(**data.pop("energy_model", {}))
    weights_raw = data.pop("trust_weights", None)
    if weights_raw is None:
        weights = TrustWeights()
    elif isinstance(weights_raw, (list, tuple)):
        weights = TrustWeights(*[float(w) for w in weights_raw])
    else:
        weights = TrustWeights(**{k: float(v) for k, v in weights_raw.items()})
    scenario = _parse_scenario(
        data.pop("scenario", "habitat-monitoring"), energy.initial_energy
    )
    adversaries = tuple(
        AdversarySpec(
            node=NodeAddress.parse(a["node"]),
            behavior=a["behavior"],
            drop_fraction=float(a.get("drop_fraction", 1.0)),
            start_frame=int(a.get("start_frame", 0)),
        )
        for a in data.pop("adversaries", [])
    )
    known = {
        "seed",
        "node_count",
        "group_count",
        "slots_per_frame",
        "session_length",
        "sim_length",
        "adaptive",
        "rekey_threshold",
        "loss_threshold",
        "loss_rate",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SimConfig(
        scenario=scenario,
        adversaries=adversaries,
        energy_model=energy,
        trust_weights=weights,
        **data,
    )


def set_override(data: dict, dotted: str, raw: str) -> None:
    """Apply one `a.b=value` override onto a config dict (value is JSON)."""
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    target = data
    *front, last = dotted.split(".")
    for part in front:
        target = target.setdefault(part, {})
        if not isinstance(target, dict):
            raise ValueError(f"cannot override through non-object key {part!r}")
    target[last] = value


def load_config(path: str, overrides: Optional[list[str]] = None) -> SimConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    for item in overrides or []:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        set_override(data, key.strip(), raw.strip())
    return config_from_dict(data)
