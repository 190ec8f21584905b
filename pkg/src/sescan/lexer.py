"""Token scanner for Solidity source.

This is not a parser.  It splits source into tokens that carry their raw
text and byte-exact location, which is all the detectors need.  Anything
unrecognized becomes an ``other`` token instead of an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Union

IDENTIFIER = "identifier"
STRING = "string-literal"
NUMBER = "hex-number"
ADDRESS = "address-literal"
PUNCT = "punctuation"
KEYWORD = "keyword"
COMMENT = "comment"
OTHER = "other"

KEYWORDS = frozenset(
    """
    abstract anonymous as assembly break calldata catch constant constructor
    continue contract delete do else emit enum event external fallback false
    for function if immutable import indexed interface internal is library
    mapping memory modifier new override payable pragma private public pure
    receive return returns storage struct true try type unchecked using view
    virtual while
    """.split()
)

_PUNCT = sorted(
    """
    >>>= <<= >>= **= ... == != <= >= && || => ++ -- += -= *= /= %= &= |= ^=
    << >> ** -> ( ) { } [ ] ; , . = + - * / % ! < > & | ^ ~ ? :
    """.split(),
    key=len,
    reverse=True,
)

_MASTER = re.compile(
    "|".join(
        [
            r"(?P<ws>[ \t\r\n\f\v]+)",
            r"(?P<line_comment>//[^\n]*)",
            r"(?P<block_comment>/\*.*?(?:\*/|\Z))",
            r"(?P<string>(?:unicode|hex)?(?:\"(?:[^\"\\\n]|\\.)*\"|'(?:[^'\\\n]|\\.)*'))",
            r"(?P<address>0[xX][0-9a-fA-F]{40}(?![0-9a-zA-Z_$]))",
            r"(?P<number>0[xX][0-9a-fA-F_]+|(?:\d[\d_]*(?:\.\d[\d_]*)?|\.\d[\d_]*)(?:[eE]-?\d[\d_]*)?)",
            r"(?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)",
            r"(?P<punct>" + "|".join(re.escape(p) for p in _PUNCT) + ")",
            r"(?P<nonascii>[^\x00-\x7f]+)",
            r"(?P<other>.)",
        ]
    ),
    re.S,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "0": "\0", "\n": ""}


class ScanError(Exception):
    """The file could not be scanned at all (e.g. it is not UTF-8)."""


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    offset: int  # byte offset into the UTF-8 source
    length: int  # byte length

    @property
    def end(self) -> int:
        return self.offset + self.length


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span
    # string literals only: content with escapes decoded
    value: Optional[str] = None

    def is_punct(self, *ops: str) -> bool:
        return self.kind == PUNCT and self.text in ops

    def is_word(self, *words: str) -> bool:
        return self.kind in (IDENTIFIER, KEYWORD) and self.text in words


def decode_escapes(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\" or i + 1 >= len(body):
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt == "x" and re.fullmatch(r"[0-9a-fA-F]{2}", body[i + 2 : i + 4]):
            out.append(chr(int(body[i + 2 : i + 4], 16)))
            i += 4
        elif nxt == "u" and re.fullmatch(r"[0-9a-fA-F]{4}", body[i + 2 : i + 6]):
            out.append(chr(int(body[i + 2 : i + 6], 16)))
            i += 6
        else:
            out.append(_ESCAPES.get(nxt, nxt))
            i += 2
    return "".join(out)


def _string_value(text: str) -> str:
    if text.startswith("hex"):
        return text[4:-1]
    if text.startswith("unicode"):
        text = text[7:]
    return decode_escapes(text[1:-1])


def tokenize(source: Union[str, bytes]) -> List[Token]:
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ScanError(f"invalid UTF-8 at byte {e.start}") from None
    tokens: List[Token] = []
    line, line_start = 1, 0
    byte_pos, char_pos = 0, 0
    for m in _MASTER.finditer(source):
        start, end = m.span()
        if start != char_pos:
            byte_pos += len(source[char_pos:start].encode("utf-8"))
        text = m.group()
        nbytes = len(text.encode("utf-8"))
        group = m.lastgroup
        if group != "ws":
            kind = {
                "line_comment": COMMENT,
                "block_comment": COMMENT,
                "string": STRING,
                "address": ADDRESS,
                "number": NUMBER,
                "punct": PUNCT,
                "nonascii": OTHER,
                "other": OTHER,
            }.get(group)
            if kind is None:
                kind = KEYWORD if text in KEYWORDS else IDENTIFIER
            span = Span(line, start - line_start + 1, byte_pos, nbytes)
            value = _string_value(text) if kind == STRING else None
            tokens.append(Token(kind, text, span, value))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = start + text.rindex("\n") + 1
        byte_pos += nbytes
        char_pos = end
    return tokens
