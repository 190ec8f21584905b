"""Confusable-character analysis.

Maps each look-alike codepoint to its ASCII prototype, one codepoint at a
time.  There is deliberately no case folding and no Unicode normalization:
case carries meaning for checksums and selectors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, List, NamedTuple, Optional

_VERSION_PREFIX = "# version:"


class ConfusableTableError(ValueError):
    pass


class UnmappedError(ValueError):
    """Raised by ``skeleton`` when non-ASCII codepoints have no prototype."""

    def __init__(self, codepoints: List[int]):
        self.codepoints = codepoints
        super().__init__(
            "unmapped non-ASCII: " + ", ".join(f"U+{c:04X}" for c in codepoints)
        )


@dataclass(frozen=True)
class ConfusableMap:
    entries: Dict[int, str]
    version_tag: str = "unversioned"

    def prototype(self, cp: int) -> Optional[str]:
        if cp < 0x80:
            return chr(cp)
        return self.entries.get(cp)

    def __contains__(self, cp: int) -> bool:
        return cp < 0x80 or cp in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def parse_table(text: str) -> ConfusableMap:
    entries: Dict[int, str] = {}
    version = "unversioned"
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith(_VERSION_PREFIX):
            version = line[len(_VERSION_PREFIX):].strip()
            continue
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2 or not parts[0].startswith("U+"):
            raise ConfusableTableError(f"line {lineno}: malformed record {line!r}")
        try:
            cp = int(parts[0][2:], 16)
        except ValueError:
            raise ConfusableTableError(f"line {lineno}: bad codepoint {parts[0]!r}")
        proto = parts[1]
        if cp < 0x80:
            raise ConfusableTableError(f"line {lineno}: ASCII codepoint {parts[0]} maps to itself")
        if not proto or not proto.isascii():
            raise ConfusableTableError(f"line {lineno}: prototype must be non-empty ASCII")
        if cp in entries:
            raise ConfusableTableError(f"line {lineno}: duplicate codepoint {parts[0]}")
        entries[cp] = proto
    return ConfusableMap(entries, version)


def load_table(path) -> ConfusableMap:
    with open(path, encoding="utf-8") as f:
        return parse_table(f.read())


@lru_cache(maxsize=None)
def default_map() -> ConfusableMap:
    """The bundled table shipped in ``sescan/data/confusables.tsv``."""
    text = resources.files("sescan").joinpath("data/confusables.tsv").read_text("utf-8")
    return parse_table(text)


def skeleton(s: str, cmap: Optional[ConfusableMap] = None) -> str:
    cmap = cmap or default_map()
    if s.isascii():
        return s
    out = []
    missing = []
    for ch in s:
        proto = cmap.prototype(ord(ch))
        if proto is None:
            missing.append(ord(ch))
        else:
            out.append(proto)
    if missing:
        raise UnmappedError(sorted(set(missing)))
    return "".join(out)


@dataclass
class HomographReport:
    has_non_ascii: bool
    unmapped_non_ascii: List[int] = field(default_factory=list)
    skeleton: Optional[str] = None
    confusable_with_ascii: bool = False
    offending_positions: List[int] = field(default_factory=list)


def analyze_string(s: str, cmap: Optional[ConfusableMap] = None) -> HomographReport:
    cmap = cmap or default_map()
    positions = [i for i, ch in enumerate(s) if ord(ch) >= 0x80]
    if not positions:
        return HomographReport(False, skeleton=s)
    try:
        skel = skeleton(s, cmap)
    except UnmappedError as e:
        return HomographReport(True, e.codepoints, None, False, positions)
    return HomographReport(True, [], skel, skel != s and skel.isascii(), positions)


class HeaderRelation(enum.Enum):
    IDENTICAL = "identical"
    HOMOGRAPH_TWIN = "homograph_twin"
    DISTINCT = "distinct"


class HeaderComparison(NamedTuple):
    relation: HeaderRelation
    unmapped: bool = False


def compare_headers(h1: str, h2: str, cmap: Optional[ConfusableMap] = None) -> HeaderComparison:
    if h1 == h2:
        return HeaderComparison(HeaderRelation.IDENTICAL)
    try:
        same = skeleton(h1, cmap) == skeleton(h2, cmap)
    except UnmappedError:
        return HeaderComparison(HeaderRelation.DISTINCT, unmapped=True)
    return HeaderComparison(HeaderRelation.HOMOGRAPH_TWIN if same else HeaderRelation.DISTINCT)
