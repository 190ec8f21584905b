"""Ethereum byte-level primitives.

Keccak-256, function selectors, EIP-55 checksummed address text and
CREATE contract address derivation.  Everything here is a pure function
over immutable values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from Crypto.Hash import keccak as _keccak

MAX_ARGS = 16
MAX_NONCE = 2**64 - 1

VALID_EIP55 = "valid-eip55"
ALL_LOWER = "all-lower"
ALL_UPPER = "all-upper"
INVALID_CHECKSUM = "invalid-checksum"
MALFORMED = "malformed"
CASE_CLASSES = (VALID_EIP55, ALL_LOWER, ALL_UPPER, INVALID_CHECKSUM, MALFORMED)

_ADDRESS_TEXT = re.compile(r"0[xX]([0-9a-fA-F]{40})")
_IDENTIFIER = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")


def keccak256(data: bytes) -> bytes:
    """Keccak-256 with the original Keccak padding (not FIPS-202 SHA3)."""
    return _keccak.new(data=bytes(data), digest_bits=256).digest()


@dataclass(frozen=True)
class Address:
    raw: bytes

    def __post_init__(self):
        if not isinstance(self.raw, (bytes, bytearray)) or len(self.raw) != 20:
            raise ValueError("address must be exactly 20 bytes")
        object.__setattr__(self, "raw", bytes(self.raw))

    @classmethod
    def from_hex(cls, text: str) -> "Address":
        """Parse ``0x`` + 40 hex digits, ignoring letter case."""
        m = _ADDRESS_TEXT.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"not a 20-byte hex address: {text!r}")
        return cls(bytes.fromhex(m.group(1)))

    @property
    def hex(self) -> str:
        return "0x" + self.raw.hex()

    def __str__(self) -> str:
        return self.hex


@dataclass(frozen=True)
class Selector:
    raw: bytes

    def __post_init__(self):
        if len(self.raw) != 4:
            raise ValueError("selector must be exactly 4 bytes")

    @classmethod
    def from_hex(cls, text: str) -> "Selector":
        t = text.strip()
        if t[:2] in ("0x", "0X"):
            t = t[2:]
        if not re.fullmatch(r"[0-9a-fA-F]{8}", t):
            raise ValueError(f"selector must be 8 hex digits: {text!r}")
        return cls(bytes.fromhex(t))

    @property
    def hex(self) -> str:
        return "0x" + self.raw.hex()

    def __int__(self) -> int:
        return int.from_bytes(self.raw, "big")

    def __str__(self) -> str:
        return self.hex


class HeaderError(ValueError):
    """A function header failed validation; ``token`` is the offending piece."""

    def __init__(self, message: str, token: str):
        super().__init__(f"{message}: {token!r}")
        self.token = token


_ALIASES = {
    "uint": "uint256",
    "int": "int256",
    "byte": "bytes1",
    "fixed": "fixed128x18",
    "ufixed": "ufixed128x18",
}


def canonical_type(token: str) -> str:
    """Normalize one ABI argument type, raising HeaderError if unknown."""
    t = token.strip()
    m = re.fullmatch(r"([a-z0-9]+)((?:\[\d*\])*)", t)
    if m is None:
        raise HeaderError("unknown ABI type", t)
    base, dims = m.group(1), m.group(2)
    base = _ALIASES.get(base, base)
    if not _elementary(base):
        raise HeaderError("unknown ABI type", t)
    for d in re.findall(r"\[(\d*)\]", dims):
        if d and (d.startswith("0") or int(d) == 0):
            raise HeaderError("bad array length", t)
    return base + dims


def _elementary(base: str) -> bool:
    if base in ("address", "bool", "string", "bytes", "function"):
        return True
    m = re.fullmatch(r"(u?int)(\d+)", base)
    if m:
        bits = int(m.group(2))
        return m.group(2)[0] != "0" and 8 <= bits <= 256 and bits % 8 == 0
    m = re.fullmatch(r"bytes(\d+)", base)
    if m:
        return m.group(1)[0] != "0" and 1 <= int(m.group(1)) <= 32
    m = re.fullmatch(r"u?fixed(\d+)x(\d+)", base)
    if m:
        bits, dec = int(m.group(1)), int(m.group(2))
        return 8 <= bits <= 256 and bits % 8 == 0 and 0 < dec <= 80
    return False


@dataclass(frozen=True)
class FunctionHeader:
    name: str
    arg_types: tuple = ()

    def __post_init__(self):
        if not _IDENTIFIER.fullmatch(self.name):
            raise HeaderError("bad function name", self.name)
        if len(self.arg_types) > MAX_ARGS:
            raise HeaderError("too many arguments", ",".join(self.arg_types))
        object.__setattr__(
            self, "arg_types", tuple(canonical_type(t) for t in self.arg_types)
        )

    @classmethod
    def parse(cls, text: str) -> "FunctionHeader":
        """Parse ``name(type,...)``; whitespace around pieces is tolerated."""
        m = re.fullmatch(r"\s*([^\s(]*)\s*\((.*)\)\s*", text, re.S)
        if m is None:
            raise HeaderError("not a function header", text)
        name, args = m.group(1), m.group(2).strip()
        if "(" in args or ")" in args:
            raise HeaderError("tuple arguments are not supported", args)
        arg_types = tuple(a.strip() for a in args.split(",")) if args else ()
        if any(not a for a in arg_types):
            raise HeaderError("empty argument type", args)
        return cls(name, arg_types)

    @property
    def canonical(self) -> str:
        return f"{self.name}({','.join(self.arg_types)})"

    def __str__(self) -> str:
        return self.canonical


def raw_selector(text: str) -> Selector:
    """Selector over the UTF-8 bytes of ``text`` exactly as written.

    No validation or canonicalization: this is what a contract computes
    for a header string literal, homoglyphs included.
    """
    return Selector(keccak256(text.encode("utf-8"))[:4])


def compute_selector(header: Union[FunctionHeader, str]) -> Selector:
    if isinstance(header, str):
        header = FunctionHeader.parse(header)
    return raw_selector(header.canonical)


@dataclass(frozen=True)
class ChecksummedAddressText:
    text: str
    case_class: str
    address: Optional[Address] = None
    # True when the letter case agrees with EIP-55, even for single-case text.
    checksum_matches: bool = False


def _checksum_hex(lower_hex: str) -> str:
    digest = keccak256(lower_hex.encode("ascii")).hex()
    return "".join(
        c.upper() if c.isalpha() and int(h, 16) >= 8 else c
        for c, h in zip(lower_hex, digest)
    )


def eip55_encode(addr: Address) -> ChecksummedAddressText:
    text = "0x" + _checksum_hex(addr.raw.hex())
    return ChecksummedAddressText(text, VALID_EIP55, addr, True)


def eip55_classify(text: str) -> ChecksummedAddressText:
    """Classify the letter case of a textual address.

    Single-case text is reported as ``all-lower``/``all-upper`` before the
    checksum is consulted, since the EVM accepts either; ``checksum_matches``
    still records whether the case happens to agree with EIP-55.
    """
    m = re.fullmatch(r"0x([0-9a-fA-F]{40})", text)
    if m is None:
        return ChecksummedAddressText(text, MALFORMED)
    body = m.group(1)
    addr = Address(bytes.fromhex(body))
    matches = _checksum_hex(body.lower()) == body
    letters = [c for c in body if c.isalpha()]
    if all(c.islower() for c in letters):
        cls = ALL_LOWER
    elif all(c.isupper() for c in letters):
        cls = ALL_UPPER
    else:
        cls = VALID_EIP55 if matches else INVALID_CHECKSUM
    return ChecksummedAddressText(text, cls, addr, matches)


def _rlp_string(payload: bytes) -> bytes:
    if len(payload) == 1 and payload[0] < 0x80:
        return payload
    if len(payload) > 55:
        raise ValueError("payload too long for short-string form")
    return bytes([0x80 + len(payload)]) + payload


def rlp_encode_address_nonce(sender: Address, nonce: int) -> bytes:
    """RLP of the two-item list ``[sender, nonce]``; nothing more general."""
    if not 0 <= nonce <= MAX_NONCE:
        raise ValueError(f"nonce out of range [0, 2**64): {nonce}")
    nonce_bytes = nonce.to_bytes((nonce.bit_length() + 7) // 8, "big")
    body = _rlp_string(sender.raw) + _rlp_string(nonce_bytes)
    # body is at most 21 + 9 bytes, always the short-list form
    return bytes([0xC0 + len(body)]) + body


def derive_create_address(sender: Address, nonce: int) -> Address:
    return Address(keccak256(rlp_encode_address_nonce(sender, nonce))[-20:])
