"""Command-line front door.

Thin wrappers over the library: simulation runs, fixed-vs-adaptive
comparisons, key derivation, packet encode/decode/dissect, and trust
computation from an observation CSV.

Exit codes: 0 success, 2 usage, 3 invalid input or config, 4
authentication reject, 5 replay reject, 6 malformed packet. Failures print
one machine-readable line to stderr: ``error: <category>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Optional

from . import linksec, sim
from .addressing import NodeAddress
from .keys import KeyRing, SymmetricKey, derive_keyring, derive_session_key
from .linksec import CounterState, Encryption, SecurityLevel
from .trust import CSV_COLUMNS, NeighborRecord, TrustWeights, compute_trust

EXIT_INVALID = 3
EXIT_AUTH = 4
EXIT_REPLAY = 5
EXIT_FORMAT = 6


def _fail(category: str, message: str, code: int) -> int:
    print(f"error: {category}: {message}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# Keyring file format (JSON, hex-encoded keys)
# ---------------------------------------------------------------------------

def keyring_to_dict(ring: KeyRing) -> dict:
    return {
        "owner": str(ring.owner),
        "head": str(ring.head),
        "node_based": ring.node_based.hex(),
        "broadcast": ring.broadcast.hex(),
        "session": ring.session.hex() if ring.session else None,
        "pairwise": {str(a): k.hex() for a, k in sorted(ring.pairwise.items())},
        "peer_broadcast": {
            str(a): k.hex() for a, k in sorted(ring.peer_broadcast.items())
        },
        "peer_node_based": {
            str(a): k.hex() for a, k in sorted(ring.peer_node_based.items())
        },
    }


def keyring_from_dict(data: dict) -> KeyRing:
    def keymap(obj) -> dict[NodeAddress, SymmetricKey]:
        return {
            NodeAddress.parse(a): SymmetricKey.from_hex(h)
            for a, h in (obj or {}).items()
        }

    return KeyRing(
        owner=NodeAddress.parse(data["owner"]),
        head=NodeAddress.parse(data["head"]),
        node_based=SymmetricKey.from_hex(data["node_based"]),
        broadcast=SymmetricKey.from_hex(data["broadcast"]),
        pairwise=keymap(data.get("pairwise")),
        peer_broadcast=keymap(data.get("peer_broadcast")),
        peer_node_based=keymap(data.get("peer_node_based")),
        session=SymmetricKey.from_hex(data["session"]) if data.get("session") else None,
    )


def _load_ring(path: str) -> KeyRing:
    with open(path, "r", encoding="utf-8") as fh:
        return keyring_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    config = sim.load_config(args.config, args.set or [])
    report = sim.run(config)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = {
        "energy.csv": report.energy_csv(),
        "trust.csv": report.trust_csv(),
        "summary.txt": report.summary_text(),
    }
    for name, text in outputs.items():
        with open(os.path.join(args.out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    print(report.summary_text(), end="")
    return 0


def _cmd_compare(args) -> int:
    if args.config:
        config = sim.load_config(args.config, args.set or [])
    else:
        overrides = {}
        if args.nodes is not None:
            overrides["node_count"] = args.nodes
        if args.groups is not None:
            overrides["group_count"] = args.groups
        if args.frames is not None:
            overrides["sim_length"] = args.frames
        if args.seed is not None:
            overrides["seed"] = args.seed
        config = sim.config_from_dict({"scenario": args.scenario, **overrides})
    savings = sim.compare_fixed_vs_adaptive(config)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = {
        "fixed_energy.csv": savings.fixed.energy_csv(),
        "adaptive_energy.csv": savings.adaptive.energy_csv(),
        "savings.csv": savings.savings_csv(),
        "summary.txt": savings.summary_text(),
    }
    for name, text in outputs.items():
        with open(os.path.join(args.out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    print(savings.summary_text(), end="")
    return 0


def _cmd_derive_keys(args) -> int:
    master = SymmetricKey.from_hex(args.master)
    node = NodeAddress.parse(args.node)
    head = NodeAddress.parse(args.head)
    neighbors = [NodeAddress.parse(n) for n in args.neighbors.split(",")] if args.neighbors else []
    ring = derive_keyring(master, node, head, neighbors)
    print(f"node_based {ring.node_based.hex()}")
    print(f"broadcast {ring.broadcast.hex()}")
    for addr in sorted(ring.pairwise):
        print(f"pairwise {addr} {ring.pairwise[addr].hex()}")
    if args.session_group is not None:
        base = NodeAddress.parse(args.base_station)
        k1 = derive_session_key(master, args.session_group, base)
        print(f"session {k1.hex()}")
    if args.ring_out:
        with open(args.ring_out, "w", encoding="utf-8") as fh:
            json.dump(keyring_to_dict(ring), fh, indent=2)
            fh.write("\n")
    return 0


def _parse_level(args) -> SecurityLevel:
    return SecurityLevel(Encryption(args.level), args.auth)


def _cmd_packet_encode(args) -> int:
    ring = _load_ring(args.keyring)
    state = CounterState(args.counter)
    wire = linksec.encode(
        _parse_level(args), ring, state, args.dest, bytes.fromhex(args.payload)
    )
    print(wire.hex())
    print(f"counter {state.value}")
    return 0


def _cmd_packet_decode(args) -> int:
    ring = _load_ring(args.keyring)
    state = CounterState(args.counter)
    payload = linksec.decode(
        bytes.fromhex(args.wire), ring, state, args.loss_threshold
    )
    print(payload.hex())
    print(f"counter {state.value}")
    return 0


def _cmd_packet_dissect(args) -> int:
    info = linksec.dissect(bytes.fromhex(args.wire))
    for key, value in info.items():
        print(f"{key}: {value}")
    return 0


_TRUST_INT_FIELDS = ("crf", "craf", "npc", "drf", "draf", "pd", "npt", "npr")
_TRUST_FLOAT_FIELDS = ("ae_t1", "ae_t2", "pss_t1", "pss_t2", "rc")


def _cmd_trust(args) -> int:
    if args.weights:
        weights = TrustWeights(*[float(w) for w in args.weights.split(",")])
    else:
        weights = TrustWeights()
    with open(args.observations, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "neighbor" not in reader.fieldnames:
            raise ValueError("observation CSV needs a 'neighbor' column")
        unknown = set(reader.fieldnames) - set(CSV_COLUMNS)
        if unknown:
            raise ValueError(f"unknown observation columns: {sorted(unknown)}")
        for row in reader:
            record = NeighborRecord()
            for name in _TRUST_INT_FIELDS:
                if row.get(name):
                    setattr(record, name, int(row[name]))
            for name in _TRUST_FLOAT_FIELDS:
                if row.get(name):
                    setattr(record, name, float(row[name]))
            print(f"{row['neighbor']} {compute_trust(record, weights):.4f}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsnsec",
        description="Sensor-network security toolkit: simulator, keys, packets, trust.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="fixed vs adaptive energy comparison")
    p.add_argument("--config")
    p.add_argument(
        "--scenario",
        choices=sorted(set(sim.SCENARIO_NAMES) | set(sim.SCENARIO_ALIASES)),
        default="habitat-monitoring",
    )
    p.add_argument("--nodes", type=int)
    p.add_argument("--groups", type=int)
    p.add_argument("--frames", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("derive-keys", help="derive a node's key ring")
    p.add_argument("--master", required=True, help="hex master key (10 octets)")
    p.add_argument("--node", required=True, help="owner address G.N")
    p.add_argument("--head", required=True, help="group head address G.N")
    p.add_argument("--neighbors", default="", help="comma-separated G.N list")
    p.add_argument("--session-group", type=int, default=None)
    p.add_argument("--base-station", default="0.0")
    p.add_argument("--ring-out", help="write the full keyring as JSON")
    p.set_defaults(func=_cmd_derive_keys)

    p = sub.add_parser("packet-encode", help="seal a payload into wire bytes")
    p.add_argument("--keyring", required=True)
    p.add_argument("--dest", type=int, required=True)
    p.add_argument("--level", type=int, choices=[0, 1, 2, 3], required=True)
    auth = p.add_mutually_exclusive_group()
    auth.add_argument("--auth", dest="auth", action="store_true", default=True)
    auth.add_argument("--no-auth", dest="auth", action="store_false")
    p.add_argument("--counter", type=int, default=0, help="last used counter")
    p.add_argument("--payload", required=True, help="hex payload (<= 29 octets)")
    p.set_defaults(func=_cmd_packet_encode)

    p = sub.add_parser("packet-decode", help="verify and open wire bytes")
    p.add_argument("--keyring", required=True)
    p.add_argument("--counter", type=int, default=0, help="last accepted counter")
    p.add_argument("--loss-threshold", type=int, default=linksec.DEFAULT_LOSS_THRESHOLD)
    p.add_argument("wire", help="hex wire bytes")
    p.set_defaults(func=_cmd_packet_decode)

    p = sub.add_parser("packet-dissect", help="parse header fields, no keys")
    p.add_argument("wire", help="hex wire bytes")
    p.set_defaults(func=_cmd_packet_dissect)

    p = sub.add_parser("trust", help="compute trust from an observation CSV")
    p.add_argument("--observations", required=True)
    p.add_argument("--weights", help="six comma-separated weights")
    p.set_defaults(func=_cmd_trust)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except linksec.ReplayError as exc:
        return _fail("replay", str(exc), EXIT_REPLAY)
    except linksec.AuthenticationError as exc:
        return _fail("authentication", str(exc), EXIT_AUTH)
    except linksec.FormatError as exc:
        return _fail("format", str(exc), EXIT_FORMAT)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        return _fail("invalid", str(exc), EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
