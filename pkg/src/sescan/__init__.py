"""Static detection of Ethereum social-engineering patterns in Solidity source."""

from sescan.primitives import (
    Address,
    ChecksummedAddressText,
    FunctionHeader,
    HeaderError,
    Selector,
    compute_selector,
    derive_create_address,
    eip55_classify,
    eip55_encode,
    keccak256,
    raw_selector,
)

__version__ = "0.1.0"

__all__ = [
    "Address",
    "ChecksummedAddressText",
    "FunctionHeader",
    "HeaderError",
    "Selector",
    "compute_selector",
    "derive_create_address",
    "eip55_classify",
    "eip55_encode",
    "keccak256",
    "raw_selector",
]
