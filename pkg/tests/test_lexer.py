import pytest
from hypothesis import given
from hypothesis import strategies as st

from sescan.lexer import (
    ADDRESS,
    COMMENT,
    IDENTIFIER,
    KEYWORD,
    NUMBER,
    OTHER,
    PUNCT,
    STRING,
    ScanError,
    decode_escapes,
    tokenize,
)


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)]


def test_transfer_call():
    assert kinds("a.transfer(1);") == [
        (IDENTIFIER, "a"),
        (PUNCT, "."),
        (IDENTIFIER, "transfer"),
        (PUNCT, "("),
        (NUMBER, "1"),
        (PUNCT, ")"),
        (PUNCT, ";"),
    ]


def test_address_literal():
    toks = tokenize("address x = 0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed;")
    addrs = [t for t in toks if t.kind == ADDRESS]
    assert len(addrs) == 1 and addrs[0].text == "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed"


def test_41_digit_hex_is_a_number():
    toks = tokenize("x = 0x" + "a" * 41 + ";")
    assert [t.kind for t in toks if t.text.startswith("0x")] == [NUMBER]


def test_address_in_string_is_string():
    toks = tokenize('s == "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed"')
    assert toks[-1].kind == STRING and toks[-1].value == "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed"


def test_raw_codepoints_kept():
    toks = tokenize('if (x == "tоken") {}')
    s = [t for t in toks if t.kind == STRING]
    assert len(s) == 1 and "о" in s[0].text and s[0].value == "tоken"


def test_escape_decoding_recorded_separately():
    (t,) = tokenize(r'"tоken\n"')
    assert t.text == r'"tоken\n"'
    assert t.value == "tоken\n"


def test_decode_escapes():
    assert decode_escapes(r"a\x41\'\\") == "aA'\\"


def test_unicode_and_hex_prefixes():
    toks = tokenize('unicode"ü" hex"00ff"')
    assert [t.kind for t in toks] == [STRING, STRING]
    assert toks[0].value == "ü" and toks[1].value == "00ff"


def test_comments_retained():
    toks = tokenize("x; // tail\n/* block\n over lines */ y")
    assert [t.kind for t in toks] == [IDENTIFIER, PUNCT, COMMENT, COMMENT, IDENTIFIER]
    assert toks[-1].span.line == 3


def test_keywords_and_operators():
    toks = tokenize("if (a == b && c != d) return;")
    assert toks[0].kind == KEYWORD and toks[-2].kind == KEYWORD
    assert [t.text for t in toks if t.kind == PUNCT] == ["(", "==", "&&", "!=", ")", ";"]


def test_unknown_becomes_other():
    toks = tokenize("x @ ☃ у")
    assert [t.kind for t in toks] == [IDENTIFIER, OTHER, OTHER, OTHER]


def test_unterminated_constructs():
    toks = tokenize('"abc\n/* never closed')
    assert toks[0].kind == OTHER and toks[-1].kind == COMMENT


def test_byte_spans_with_multibyte_text():
    src = 'a = "ф"; b'
    toks = tokenize(src)
    raw = src.encode()
    for t in toks:
        assert raw[t.span.offset : t.span.end].decode() == t.text
    assert toks[-1].span.offset == len('a = "ф"; '.encode())
    assert toks[-1].span.column == 10


def test_invalid_utf8():
    with pytest.raises(ScanError):
        tokenize(b"contract \xff {}")


def test_empty():
    assert tokenize("") == []


solidity_like = st.lists(
    st.sampled_from(list("abcxyz019_ (){}[];,.=!<>&|\"'/*\n\t+-") + ["0x", "ф", "о", "☃", "\\"]),
    max_size=60,
).map("".join)


@given(solidity_like)
def test_tokens_and_whitespace_reconstruct_source(src):
    raw = src.encode()
    pos = 0
    for t in tokenize(src):
        gap = raw[pos : t.span.offset]
        assert gap.strip() == b""
        assert raw[t.span.offset : t.span.end].decode() == t.text
        pos = t.span.end
    assert raw[pos:].strip() == b""


@given(solidity_like)
def test_lines_and_columns(src):
    lines = src.split("\n")
    for t in tokenize(src):
        line = lines[t.span.line - 1]
        first = t.text.split("\n", 1)[0]
        assert line[t.span.column - 1 :].startswith(first)
