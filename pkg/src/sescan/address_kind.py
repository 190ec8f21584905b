"""What sits at an address: an EOA, a contract, or nothing we know about.

Offline knowledge comes from a snapshot file; live knowledge from an
``eth_getCode`` query.  A live answer is only true at the moment it was
checked, which is exactly the gap a pre-computed contract address exploits.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, Iterable, Optional

import requests

from sescan.primitives import Address

EOA = "eoa"
CONTRACT_PAYABLE = "contract-payable"
CONTRACT_NONPAYABLE = "contract-nonpayable"
CONTRACT_UNKNOWN = "contract-unknown-payability"
KINDS = (EOA, CONTRACT_PAYABLE, CONTRACT_NONPAYABLE, CONTRACT_UNKNOWN)
UNKNOWN = "unknown"


class SnapshotError(ValueError):
    pass


class ResolverUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class AddressKindMap:
    entries: Dict[Address, str] = field(default_factory=dict)
    source_tag: str = "empty"

    def kind_of(self, addr: Address) -> str:
        return self.entries.get(addr, UNKNOWN)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, addr: Address) -> bool:
        return addr in self.entries


def parse_snapshot(text: str, source_tag: str = "snapshot") -> AddressKindMap:
    entries: Dict[Address, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not re.fullmatch(r"0x[0-9a-f]{40}", parts[0]):
            raise SnapshotError(f"line {lineno}: expected 'address,kind' with lowercase hex address")
        if parts[1] not in KINDS:
            raise SnapshotError(f"line {lineno}: unknown kind {parts[1]!r}")
        addr = Address.from_hex(parts[0])
        if addr in entries:
            raise SnapshotError(f"line {lineno}: duplicate address {parts[0]}")
        entries[addr] = parts[1]
    return AddressKindMap(entries, source_tag)


def load_snapshot(path) -> AddressKindMap:
    with open(path, encoding="utf-8") as f:
        return parse_snapshot(f.read(), f"snapshot:{path}")


@dataclass(frozen=True)
class NodeAnswer:
    address: Address
    kind: str
    block: str
    checked_at: datetime


def getcode_request(addr: Address, request_id: int = 1) -> bytes:
    """The exact JSON-RPC body sent to the node."""
    body = {
        "jsonrpc": "2.0",
        "method": "eth_getCode",
        "params": [addr.hex, "latest"],
        "id": request_id,
    }
    return json.dumps(body, separators=(",", ":")).encode("utf-8")


def query_node(endpoint: str, addr: Address, request_id: int = 1, timeout: float = 10.0) -> NodeAnswer:
    try:
        resp = requests.post(
            endpoint,
            data=getcode_request(addr, request_id),
            headers={"content-type": "application/json"},
            timeout=timeout,
        )
        resp.raise_for_status()
        code = resp.json()["result"]
    except (requests.RequestException, ValueError, KeyError, TypeError) as e:
        raise ResolverUnavailable(f"{endpoint}: {e}") from e
    if not isinstance(code, str) or not code.startswith("0x"):
        raise ResolverUnavailable(f"{endpoint}: unexpected result {code!r}")
    kind = EOA if code in ("0x", "0x0") else CONTRACT_UNKNOWN
    return NodeAnswer(addr, kind, "latest", datetime.now(timezone.utc))


class LiveResolver:
    """Snapshot first, then the node.  Answers are cached for one run only."""

    def __init__(self, snapshot: AddressKindMap, endpoint: Optional[str] = None):
        self.snapshot = snapshot
        self.endpoint = endpoint
        self.answers: Dict[Address, NodeAnswer] = {}
        self.failures: Dict[Address, str] = {}
        self._next_id = 1

    def resolve(self, addr: Address) -> str:
        if addr in self.snapshot:
            return self.snapshot.kind_of(addr)
        if self.endpoint is None or addr in self.failures:
            return UNKNOWN
        if addr not in self.answers:
            try:
                self.answers[addr] = query_node(self.endpoint, addr, self._next_id)
            except ResolverUnavailable as e:
                self.failures[addr] = str(e)
                return UNKNOWN
            finally:
                self._next_id += 1
        return self.answers[addr].kind

    def resolve_all(self, addrs: Iterable[Address]) -> AddressKindMap:
        """Resolve in sorted order, so request ids do not depend on input order."""
        merged = dict(self.snapshot.entries)
        for a in sorted(set(addrs), key=lambda a: a.raw):
            kind = self.resolve(a)
            if kind != UNKNOWN:
                merged[a] = kind
        tag = self.snapshot.source_tag + ("+live" if self.endpoint else "")
        return AddressKindMap(merged, tag)
