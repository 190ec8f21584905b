"""Detectors for the six social-engineering attack classes.

A1  value transfer to a hard-coded address that is a non-payable contract
A2  value transfer to a hard-coded address that is not (yet) a contract
A3  address text compared in a case-sensitive way, or case-divergent copies
A4  homograph string literal in a branch condition
A5  homograph function header in an inter-contract call
A6  A5 where a local function was mined to answer the tampered selector

Detection is token-pattern based; see ``sescan.lexer``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sescan import address_kind as ak
from sescan.homograph import ConfusableMap, analyze_string, default_map
from sescan.lexer import (
    ADDRESS,
    COMMENT,
    IDENTIFIER,
    NUMBER,
    OTHER,
    STRING,
    Span,
    Token,
    tokenize,
)
from sescan.primitives import (
    ALL_LOWER,
    ALL_UPPER,
    INVALID_CHECKSUM,
    Address,
    FunctionHeader,
    HeaderError,
    canonical_type,
    compute_selector,
    eip55_classify,
    raw_selector,
)

CLASSES = ("A1", "A2", "A3", "A4", "A5", "A6")
SEVERITIES = ("info", "medium", "high")
_RANK = {s: i for i, s in enumerate(SEVERITIES)}

A2_RISK = (
    "an attacker who pre-computed this address can later deploy a non-payable "
    "contract there, making every transfer to it revert"
)


def severity_at_least(severity: str, floor: str) -> bool:
    return _RANK[severity] >= _RANK[floor]


@dataclass
class Finding:
    attack_class: str
    severity: str
    span: Span
    message: str
    evidence: dict = field(default_factory=dict)

    def sort_key(self):
        return (self.span.offset, self.span.length, self.attack_class, self.message)


@dataclass
class Note:
    """Informational non-ASCII observation that is not an attack instance."""

    span: Span
    message: str
    evidence: dict = field(default_factory=dict)
    severity: str = "info"


@dataclass(frozen=True)
class ScanConfig:
    confusable_map: ConfusableMap = field(default_factory=default_map)
    address_kinds: ak.AddressKindMap = field(default_factory=ak.AddressKindMap)
    enabled_classes: FrozenSet[str] = frozenset(CLASSES)
    severity_floor: str = "info"

    def __post_init__(self):
        if not self.enabled_classes:
            raise ValueError("enabled_classes must be non-empty")
        unknown = set(self.enabled_classes) - set(CLASSES)
        if unknown:
            raise ValueError(f"unknown attack classes: {sorted(unknown)}")
        if self.severity_floor not in SEVERITIES:
            raise ValueError(f"unknown severity {self.severity_floor!r}")
        object.__setattr__(self, "enabled_classes", frozenset(self.enabled_classes))


# -- token helpers -----------------------------------------------------------


def code_tokens(tokens: Sequence[Token]) -> List[Token]:
    return [t for t in tokens if t.kind != COMMENT]


def _match_brackets(toks: Sequence[Token]) -> Dict[int, int]:
    pairs = {"(": ")", "[": "]", "{": "}"}
    stack: List[Tuple[int, str]] = []
    match: Dict[int, int] = {}
    for i, t in enumerate(toks):
        if t.is_punct(*pairs):
            stack.append((i, pairs[t.text]))
        elif t.is_punct(*pairs.values()):
            # unbalanced source: drop frames until one closes with this bracket
            while stack and stack[-1][1] != t.text:
                stack.pop()
            if stack:
                j, _ = stack.pop()
                match[j] = i
                match[i] = j
    return match


def _split_args(toks: Sequence[Token], lo: int, hi: int, match: Dict[int, int]) -> List[Tuple[int, int]]:
    """Top-level comma-separated ranges between brackets at ``lo`` and ``hi``."""
    out = []
    start = i = lo + 1
    while i < hi:
        if i in match and match[i] > i:
            i = match[i] + 1
            continue
        if toks[i].is_punct(","):
            out.append((start, i))
            start = i + 1
        i += 1
    if start < hi or out:
        out.append((start, hi))
    return out


def _is_address_text(s: str) -> bool:
    return re.fullmatch(r"0x[0-9a-fA-F]{40}", s) is not None


# -- A1 / A2 -----------------------------------------------------------------


def _literal_in(toks: Sequence[Token], lo: int, hi: int, match) -> Optional[Token]:
    """Address literal for expressions like ``0x..``, ``payable(0x..)``,
    ``payable(address(0x..))`` spanning ``toks[lo:hi]``."""
    if hi - lo == 1 and toks[lo].kind == ADDRESS:
        return toks[lo]
    if (
        hi - lo >= 4
        and toks[lo].is_word("payable", "address")
        and toks[lo + 1].is_punct("(")
        and match.get(lo + 1) == hi - 1
    ):
        return _literal_in(toks, lo + 2, hi - 1, match)
    return None


def _literal_bindings(toks: Sequence[Token], match) -> Dict[str, List[Token]]:
    """Identifiers assigned an address literal anywhere in the file."""
    out: Dict[str, List[Token]] = {}
    for i, t in enumerate(toks):
        if not t.is_punct("=") or i == 0 or toks[i - 1].kind != IDENTIFIER:
            continue
        end = i + 1
        while end < len(toks) and not toks[end].is_punct(";", ",", ")", "}"):
            if end in match and match[end] > end:
                end = match[end]
            end += 1
        lit = _literal_in(toks, i + 1, end, match)
        if lit is not None:
            out.setdefault(toks[i - 1].text, []).append(lit)
    return out


@dataclass
class ValueTransfer:
    call: Token
    method: str
    literal: Token
    receiver: str


def value_transfers(tokens: Sequence[Token]) -> List[ValueTransfer]:
    """Ether transfers whose receiver resolves to a hard-coded address."""
    toks = code_tokens(tokens)
    match = _match_brackets(toks)
    bindings = _literal_bindings(toks, match)
    out = []
    for i, t in enumerate(toks):
        if not t.is_punct(".") or i == 0 or i + 2 >= len(toks):
            continue
        method = toks[i + 1]
        nxt = toks[i + 2]
        if method.is_word("transfer", "send") and nxt.is_punct("("):
            close = match.get(i + 2)
            if close is None or len(_split_args(toks, i + 2, close, match)) != 1:
                continue  # token transfers take two arguments
        elif method.is_word("call") and nxt.is_punct("{"):
            close = match.get(i + 2)
            if close is None or not any(x.is_word("value") for x in toks[i + 3 : close]):
                continue
        elif (
            method.is_word("call")
            and nxt.is_punct(".")
            and i + 3 < len(toks)
            and toks[i + 3].is_word("value")
        ):
            pass
        else:
            continue
        # receiver expression ends at toks[i - 1]
        prev = toks[i - 1]
        lits: List[Token] = []
        recv_lo = i - 1
        if prev.is_punct(")") and (i - 1) in match:
            open_ = match[i - 1]
            recv_lo = max(open_ - 1, 0)
            lit = _literal_in(toks, open_ - 1, i, match) if open_ > 0 else None
            if lit is not None:
                lits = [lit]
            elif open_ > 0 and toks[open_ - 1].is_word("payable", "address"):
                inner = toks[open_ + 1 : i - 1]
                if len(inner) == 1 and inner[0].kind == IDENTIFIER:
                    lits = bindings.get(inner[0].text, [])
        elif prev.kind == ADDRESS:
            lits = [prev]
        elif prev.kind == IDENTIFIER and not (i >= 2 and toks[i - 2].is_punct(".")):
            lits = bindings.get(prev.text, [])
        receiver = "".join(x.text for x in toks[recv_lo:i])
        for lit in lits:
            out.append(ValueTransfer(method, method.text, lit, receiver))
    return out


def hardcoded_receivers(tokens: Sequence[Token]) -> List[Address]:
    return [Address.from_hex(v.literal.text) for v in value_transfers(tokens)]


def detect_a1_a2(tokens: Sequence[Token], config: ScanConfig) -> List[Finding]:
    findings = []
    for v in value_transfers(tokens):
        addr = Address.from_hex(v.literal.text)
        kind = config.address_kinds.kind_of(addr)
        evidence = {
            "literal": v.literal.text,
            "address": addr.hex,
            "address_kind": kind,
            "call": v.method,
            "receiver": v.receiver,
            "call_site": {"line": v.call.span.line, "column": v.call.span.column},
        }
        if kind == ak.CONTRACT_NONPAYABLE:
            findings.append(Finding(
                "A1", "high", v.literal.span,
                f"value {v.method} to hard-coded non-payable contract {addr.hex}; "
                "the transfer reverts and the transaction fails",
                evidence,
            ))
        elif kind == ak.CONTRACT_UNKNOWN:
            findings.append(Finding(
                "A1", "medium", v.literal.span,
                f"value {v.method} to hard-coded contract {addr.hex} of unknown payability",
                evidence,
            ))
        elif kind in (ak.EOA, ak.UNKNOWN):
            state = "an EOA at snapshot time" if kind == ak.EOA else "not a known contract"
            findings.append(Finding(
                "A2", "medium", v.literal.span,
                f"value {v.method} to hard-coded address {addr.hex}, {state}; {A2_RISK}",
                evidence,
            ))
    return findings


# -- A3 ----------------------------------------------------------------------


def _comparison_operands(toks: Sequence[Token], match) -> List[Tuple[int, int, int]]:
    """For each ``==``/``!=``: (op index, left start, right end)."""
    stops = ("(", "[", "{", ",", ";", "&&", "||", "?", ":", "=", "return")
    out = []
    for i, t in enumerate(toks):
        if not t.is_punct("==", "!="):
            continue
        lo = i - 1
        while lo >= 0:
            if lo in match and match[lo] < lo:
                lo = match[lo] - 1
                continue
            if toks[lo].is_punct(*stops) or toks[lo].is_punct(")", "]", "}") or toks[lo].is_word("return"):
                break
            lo -= 1
        hi = i + 1
        while hi < len(toks):
            if hi in match and match[hi] > hi:
                hi = match[hi] + 1
                continue
            if toks[hi].is_punct(*stops) or toks[hi].is_punct(")", "]", "}"):
                break
            hi += 1
        out.append((i, lo + 1, hi))
    return out


def detect_a3(tokens: Sequence[Token], config: ScanConfig) -> List[Finding]:
    toks = code_tokens(tokens)
    match = _match_brackets(toks)
    findings = []

    for t in toks:
        if t.kind != ADDRESS:
            continue
        c = eip55_classify("0x" + t.text[2:])
        if c.case_class == INVALID_CHECKSUM:
            findings.append(Finding(
                "A3", "high", t.span,
                f"address literal {t.text} fails its EIP-55 checksum",
                {"literal": t.text, "classification": c.case_class},
            ))
        elif c.case_class in (ALL_LOWER, ALL_UPPER) and not c.checksum_matches:
            findings.append(Finding(
                "A3", "info", t.span,
                f"address literal {t.text} carries no checksum ({c.case_class})",
                {"literal": t.text, "classification": c.case_class},
            ))

    seen = set()
    for op, lo, hi in _comparison_operands(toks, match):
        for j in range(lo, hi):
            t = toks[j]
            if t.kind != STRING or j in seen or not _is_address_text(t.value or ""):
                continue
            seen.add(j)
            c = eip55_classify(t.value)
            findings.append(Finding(
                "A3", "high", t.span,
                f"address compared as a string with '{toks[op].text}'; string comparison is "
                "case-sensitive while EVM address comparison is not",
                {
                    "literal": t.text,
                    "classification": c.case_class,
                    "address": c.address.hex,
                    "operator": toks[op].text,
                },
            ))

    groups: Dict[str, List[Token]] = {}
    for t in toks:
        if t.kind == ADDRESS:
            text = "0x" + t.text[2:]
        elif t.kind == STRING and _is_address_text(t.value or ""):
            text = t.value
        else:
            continue
        groups.setdefault(text.lower(), []).append(t)
    for lowered, group in groups.items():
        texts = {}
        for t in group:
            text = t.value if t.kind == STRING else "0x" + t.text[2:]
            texts.setdefault(text, t)
        if len(texts) < 2:
            continue
        (first_text, _), (second_text, second) = list(texts.items())[:2]
        findings.append(Finding(
            "A3", "medium", second.span,
            f"address {lowered} is written with diverging letter case in this file",
            {
                "literal": second.text,
                "variants": sorted(texts),
                "classifications": {k: eip55_classify(k).case_class for k in sorted(texts)},
            },
        ))
    return findings


# -- A4 ----------------------------------------------------------------------


def branch_string_indices(toks: Sequence[Token], match) -> List[int]:
    """Indices of string literals in a branch condition or ==/!= operand."""
    hits = set()
    for i, t in enumerate(toks):
        if not (t.is_word("if", "while", "require", "assert") and i + 1 < len(toks)):
            continue
        if not toks[i + 1].is_punct("(") or (i + 1) not in match:
            continue
        close = match[i + 1]
        if t.text in ("require", "assert"):
            args = _split_args(toks, i + 1, close, match)
            lo, hi = args[0] if args else (i + 2, i + 2)
        else:
            lo, hi = i + 2, close
        hits.update(j for j in range(lo, hi) if toks[j].kind == STRING)
    for _, lo, hi in _comparison_operands(toks, match):
        hits.update(j for j in range(lo, hi) if toks[j].kind == STRING)
    return sorted(hits)


def detect_a4(tokens: Sequence[Token], config: ScanConfig) -> List[Finding]:
    toks = code_tokens(tokens)
    match = _match_brackets(toks)
    findings = []
    for j in branch_string_indices(toks, match):
        t = toks[j]
        rep = analyze_string(t.value, config.confusable_map)
        if not rep.has_non_ascii:
            continue
        evidence = {
            "literal": t.text,
            "value": t.value,
            "skeleton": rep.skeleton,
            "offending_positions": rep.offending_positions,
            "codepoints": [f"U+{ord(t.value[p]):04X}" for p in rep.offending_positions],
        }
        if rep.confusable_with_ascii:
            findings.append(Finding(
                "A4", "high", t.span,
                f"branch condition compares against homograph string {t.text}, "
                f"visually identical to \"{rep.skeleton}\"",
                evidence,
            ))
        else:
            evidence["unmapped"] = [f"U+{c:04X}" for c in rep.unmapped_non_ascii]
            findings.append(Finding(
                "A4", "medium", t.span,
                f"branch condition compares against non-ASCII string {t.text}",
                evidence,
            ))
    return findings


# -- A5 / A6 -----------------------------------------------------------------

_ELEMENTARY_SKIP = ("memory", "storage", "calldata", "payable", "indexed")


@dataclass
class LocalFunction:
    header: FunctionHeader
    token: Token

    @property
    def selector(self):
        return compute_selector(self.header)


def local_functions(tokens: Sequence[Token]) -> List[LocalFunction]:
    toks = code_tokens(tokens)
    match = _match_brackets(toks)
    contracts = {
        toks[i + 1].text
        for i, t in enumerate(toks[:-1])
        if t.is_word("contract", "interface", "library") and toks[i + 1].kind == IDENTIFIER
    }
    out = []
    for i, t in enumerate(toks):
        if not t.is_word("function") or i + 2 >= len(toks):
            continue
        name, paren = toks[i + 1], toks[i + 2]
        if name.kind != IDENTIFIER or not paren.is_punct("(") or (i + 2) not in match:
            continue
        types = []
        ok = True
        for lo, hi in _split_args(toks, i + 2, match[i + 2], match):
            words = [x for x in toks[lo:hi] if not x.is_word(*_ELEMENTARY_SKIP)]
            if not words:
                ok = False
                break
            base = "address" if words[0].text in contracts else words[0].text
            dims = ""
            k = 1
            while k < len(words) and words[k].is_punct("["):
                close = next((m for m in range(k, len(words)) if words[m].is_punct("]")), None)
                if close is None:
                    break
                dims += "[" + "".join(w.text for w in words[k + 1 : close]) + "]"
                k = close + 1
            try:
                types.append(canonical_type(base + dims))
            except HeaderError:
                ok = False
                break
        if ok:
            out.append(LocalFunction(FunctionHeader(name.text, tuple(types)), name))
    return out


def icc_sites(tokens: Sequence[Token]) -> Tuple[List[Token], List[Token]]:
    """(header string literals, raw 4-byte selector literals) at call sites."""
    toks = code_tokens(tokens)
    headers, raw = [], []
    for i, t in enumerate(toks):
        if t.kind == STRING and i >= 2 and toks[i - 1].is_punct("("):
            callee = toks[i - 2]
            if callee.is_word("encodeWithSignature"):
                headers.append(t)
            elif callee.is_word("keccak256") and i >= 4 and toks[i - 4].is_word("bytes4"):
                headers.append(t)
            elif (
                callee.is_word("bytes")
                and i >= 6
                and toks[i - 4].is_word("keccak256")
                and toks[i - 6].is_word("bytes4")
            ):
                headers.append(t)
        elif (
            t.kind == NUMBER
            and re.fullmatch(r"0[xX][0-9a-fA-F]{8}", t.text)
            and i >= 2
            and toks[i - 1].is_punct("(")
            and toks[i - 2].is_word("encodeWithSelector", "bytes4")
        ):
            raw.append(t)
    return headers, raw


def _selector_of_text(text: str) -> str:
    """Canonical selector when the text is a valid header, raw bytes otherwise."""
    try:
        return compute_selector(text).hex
    except HeaderError:
        return raw_selector(text).hex


def detect_a5_a6(tokens: Sequence[Token], config: ScanConfig) -> List[Finding]:
    locals_ = local_functions(tokens)
    by_selector: Dict[str, List[LocalFunction]] = {}
    for f in locals_:
        by_selector.setdefault(f.selector.hex, []).append(f)
    headers, raw = icc_sites(tokens)
    findings = []
    for t in headers:
        text = t.value
        rep = analyze_string(text, config.confusable_map)
        if not rep.has_non_ascii:
            try:
                FunctionHeader.parse(text)
            except HeaderError as e:
                findings.append(Finding(
                    "A5", "info", t.span,
                    f"call header {t.text} is not a valid function header ({e})",
                    {"literal": t.text, "header": text, "offending_token": e.token},
                ))
            continue
        literal_sel = raw_selector(text).hex
        evidence = {
            "literal": t.text,
            "header": text,
            "literal_selector": literal_sel,
            "codepoints": [f"U+{ord(text[p]):04X}" for p in rep.offending_positions],
        }
        if not rep.confusable_with_ascii:
            evidence["unmapped"] = [f"U+{c:04X}" for c in rep.unmapped_non_ascii]
            findings.append(Finding(
                "A5", "medium", t.span,
                f"call header {t.text} contains unmapped non-ASCII characters; "
                f"its selector {literal_sel} matches no ASCII function",
                evidence,
            ))
            continue
        skel = rep.skeleton
        skel_sel = _selector_of_text(skel)
        evidence.update({"skeleton": skel, "skeleton_selector": skel_sel})
        mined = [f for f in by_selector.get(literal_sel, []) if f.header.canonical != text]
        if mined:
            f = mined[0]
            evidence["mined_function"] = f.header.canonical
            evidence["mined_function_line"] = f.token.span.line
            evidence["skeleton_declared"] = any(g.header.canonical == skel for g in locals_)
            findings.append(Finding(
                "A6", "high", t.span,
                f"call header {t.text} looks like \"{skel}\" but its selector {literal_sel} "
                f"is answered by local function {f.header.canonical}",
                evidence,
            ))
        else:
            findings.append(Finding(
                "A5", "high", t.span,
                f"call header {t.text} looks like \"{skel}\" but hashes to {literal_sel} "
                f"instead of {skel_sel}; the call targets a non-existing function",
                evidence,
            ))
    for t in raw:
        sel = "0x" + t.text[2:].lower()
        names = sorted(f.header.canonical for f in by_selector.get(sel, []))
        findings.append(Finding(
            "A5", "info", t.span,
            f"call data uses opaque selector {t.text}; the header it stands for cannot be reviewed",
            {"literal": t.text, "selector": sel, "local_matches": names},
        ))
    return findings


# -- notes & dispatch --------------------------------------------------------


def non_ascii_notes(tokens: Sequence[Token], config: ScanConfig) -> List[Note]:
    """Non-ASCII text outside branch conditions and call headers."""
    toks = code_tokens(tokens)
    match = _match_brackets(toks)
    covered = {id(toks[j]) for j in branch_string_indices(toks, match)}
    covered.update(id(t) for t in icc_sites(tokens)[0])
    notes = []
    for t in tokens:
        if id(t) in covered or t.kind not in (STRING, COMMENT, OTHER):
            continue
        subject = t.value if t.kind == STRING else t.text
        if subject.isascii():
            continue
        rep = analyze_string(subject, config.confusable_map)
        where = {STRING: "string literal", COMMENT: "comment", OTHER: "identifier or symbol"}[t.kind]
        if rep.confusable_with_ascii:
            msg = f"{where} contains characters confusable with ASCII"
        else:
            msg = f"{where} contains non-ASCII characters"
        notes.append(Note(t.span, msg, {
            "literal": t.text,
            "skeleton": rep.skeleton,
            "unmapped": [f"U+{c:04X}" for c in rep.unmapped_non_ascii],
        }))
    return notes


DETECTORS = (
    (("A1", "A2"), detect_a1_a2),
    (("A3",), detect_a3),
    (("A4",), detect_a4),
    (("A5", "A6"), detect_a5_a6),
)


@dataclass
class ScanResult:
    findings: List[Finding]
    notes: List[Note]


def scan_source(source, config: Optional[ScanConfig] = None) -> ScanResult:
    """Findings and notes for one source text; raises ScanError on bad input."""
    config = config or ScanConfig()
    tokens = tokenize(source)
    findings: List[Finding] = []
    for classes, detector in DETECTORS:
        if config.enabled_classes.intersection(classes):
            findings.extend(detector(tokens, config))
    findings = [
        f for f in findings
        if f.attack_class in config.enabled_classes
        and severity_at_least(f.severity, config.severity_floor)
    ]
    findings.sort(key=Finding.sort_key)
    notes = non_ascii_notes(tokens, config) if config.severity_floor == "info" else []
    return ScanResult(findings, notes)


def scan(source, config: Optional[ScanConfig] = None) -> List[Finding]:
    return scan_source(source, config).findings


def count_by_class(findings: Iterable[Finding]) -> Dict[str, int]:
    counts = {c: 0 for c in CLASSES}
    for f in findings:
        counts[f.attack_class] += 1
    return counts
