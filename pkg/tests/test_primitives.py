import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sescan.primitives import (
    ALL_LOWER,
    ALL_UPPER,
    INVALID_CHECKSUM,
    MALFORMED,
    VALID_EIP55,
    Address,
    FunctionHeader,
    HeaderError,
    Selector,
    compute_selector,
    derive_create_address,
    eip55_classify,
    eip55_encode,
    keccak256,
    raw_selector,
    rlp_encode_address_nonce,
)

addresses = st.binary(min_size=20, max_size=20).map(Address)

# Published EIP-55 vectors (mixed case, all caps, all lower).
EIP55_VECTORS = [
    "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed",
    "0xfB6916095ca1df60bB79Ce92cE3Ea74c37c5d359",
    "0xdbF03B407c01E7cD3CBea99509d93f8DDDC8C6FB",
    "0xD1220A0cf47c7B9Be7A2E6BA89F429762e7b9aDb",
    "0x52908400098527886E0F7030069857D2E4169EE7",
    "0x8617E340B3D01FA5F11F306F4090FD50E238070D",
    "0xde709f2102306220921060314715629080e2fb77",
    "0x27b1fdb04752bbc536007a920d24acb045561c26",
]

FIXTURE_SENDER = Address.from_hex("0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0")
# computed with oracles.create_address; also the widely published value
FIXTURE_CREATE_0 = "0xcd234a471b72ba2f1ccf0a70fcaba648a5eecd8d"
FIXTURE_CREATE_1 = "0x343c43a37d37dff08ae8c4a11544c718abb4fcf8"


class TestKeccak:
    def test_empty(self):
        assert keccak256(b"").hex() == (
            "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"
        )
        assert oracles.keccak256(b"") == keccak256(b"")

    def test_oracle_permutations_agree(self):
        lanes = [(i * 0x0123456789ABCDEF) & oracles.MASK for i in range(25)]
        nested = oracles.keccak_f([[lanes[x + 5 * y] for y in range(5)] for x in range(5)])
        assert oracles.permute(lanes) == [nested[i % 5][i // 5] for i in range(25)]

    def test_deterministic(self):
        assert keccak256(b"abc") == keccak256(b"abc")

    def test_not_sha3(self):
        import hashlib

        assert keccak256(b"") != hashlib.sha3_256(b"").digest()

    def test_foo_prefix(self):
        assert keccak256(b"foo(uint256)")[:4].hex() == "2fbebd38"

    @pytest.mark.parametrize("n", [0, 1, 55, 135, 136, 137, 271, 272, 273, 512])
    def test_block_boundaries(self, n):
        data = bytes(range(256)) * 3
        assert keccak256(data[:n]) == oracles.keccak256(data[:n])

    @settings(max_examples=200)
    @given(st.binary(max_size=600))
    def test_matches_oracle(self, data):
        assert keccak256(data) == oracles.keccak256(data)


class TestSelector:
    def test_known_value(self):
        assert compute_selector("foo(uint256)").hex == "0x2fbebd38"

    def test_alias(self):
        assert compute_selector("foo(uint)") == compute_selector("foo(uint256)")

    def test_transfer(self):
        assert compute_selector("transfer(address,uint256)").hex == "0xa9059cbb"
        assert oracles.selector("transfer(address,uint256)").hex() == "a9059cbb"

    def test_whitespace_tolerated(self):
        h = FunctionHeader.parse(" transfer ( address , uint ) ")
        assert h.canonical == "transfer(address,uint256)"

    @pytest.mark.parametrize(
        "alias,canon",
        [("byte", "bytes1"), ("int", "int256"), ("uint[]", "uint256[]"), ("int[3][]", "int256[3][]")],
    )
    def test_aliases(self, alias, canon):
        assert FunctionHeader.parse(f"f({alias})").arg_types == (canon,)

    @pytest.mark.parametrize(
        "text,token",
        [
            ("foo(badtype)", "badtype"),
            ("foo(uint7)", "uint7"),
            ("foo(bytes33)", "bytes33"),
            ("1foo(uint256)", "1foo"),
            ("fоo(uint256)", "fоo"),
            ("foo(uint256[0])", "uint256[0]"),
        ],
    )
    def test_rejects(self, text, token):
        with pytest.raises(HeaderError) as e:
            compute_selector(text)
        assert e.value.token == token

    def test_tuple_rejected(self):
        with pytest.raises(HeaderError):
            FunctionHeader.parse("f((uint256,bool))")

    def test_arg_limit(self):
        FunctionHeader.parse("f(" + ",".join(["bool"] * 16) + ")")
        with pytest.raises(HeaderError):
            FunctionHeader.parse("f(" + ",".join(["bool"] * 17) + ")")

    def test_raw_selector_of_homograph(self):
        text = "fοο(uint256)"
        assert raw_selector(text).raw == oracles.selector(text)
        assert raw_selector(text).hex != "0x2fbebd38"

    @given(st.sampled_from(["bool", "address", "uint8", "int", "bytes32", "string", "bytes"]).flatmap(
        lambda t: st.lists(st.just(t), max_size=4)))
    def test_selector_is_hash_prefix(self, types):
        h = FunctionHeader("f", tuple(types))
        assert compute_selector(h).raw == keccak256(h.canonical.encode())[:4]

    def test_selector_from_hex(self):
        assert Selector.from_hex("2FBEBD38").hex == "0x2fbebd38"
        with pytest.raises(ValueError):
            Selector.from_hex("2fbebd3")


class TestEip55:
    @pytest.mark.parametrize("vector", EIP55_VECTORS)
    def test_vectors(self, vector):
        addr = Address.from_hex(vector)
        assert eip55_encode(addr).text == vector
        assert oracles.checksum(addr.raw) == vector

    def test_mixed_vector_valid(self):
        c = eip55_classify("0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed")
        assert c.case_class == VALID_EIP55
        assert c.address.hex == "0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed"

    def test_lower(self):
        assert eip55_classify("0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed").case_class == ALL_LOWER

    def test_upper(self):
        c = eip55_classify("0x5AAEB6053F3E94C9B9A09F33669435E7EF1BEAED")
        assert c.case_class == ALL_UPPER and not c.checksum_matches

    def test_single_case_vector_still_matches(self):
        c = eip55_classify("0x52908400098527886E0F7030069857D2E4169EE7")
        assert c.case_class == ALL_UPPER and c.checksum_matches

    def test_flipped(self):
        assert eip55_classify("0x5Aaeb6053F3E94C9b9A09f33669435E7Ef1BeAed").case_class == INVALID_CHECKSUM

    @pytest.mark.parametrize(
        "text", ["0x5aaeb6053f3e94c9b9a09f33669435e7ef1beae", "5aaeb6053f3e94c9b9a09f33669435e7ef1beaed", "0xzz", ""]
    )
    def test_malformed(self, text):
        c = eip55_classify(text)
        assert c.case_class == MALFORMED and c.address is None

    def test_numerals_only(self):
        addr = Address.from_hex("0x" + "1234567890" * 4)
        assert eip55_encode(addr).text == addr.hex

    @given(addresses)
    def test_idempotent(self, a):
        text = eip55_encode(a).text
        assert eip55_encode(Address.from_hex(text)).text == text

    @given(addresses)
    def test_round_trip(self, a):
        c = eip55_classify(eip55_encode(a).text)
        assert c.checksum_matches and c.address == a
        if c.case_class != VALID_EIP55:
            # only single-case encodings may be classified otherwise
            assert c.case_class in (ALL_LOWER, ALL_UPPER)

    @given(addresses)
    def test_lower_never_invalid(self, a):
        assert eip55_classify(a.hex).case_class == ALL_LOWER

    @given(addresses, st.integers(0, 39))
    def test_single_flip_rejected(self, a, pos):
        text = eip55_encode(a).text
        letters = [i for i in range(2, 42) if text[i].isalpha()]
        if not letters:
            return
        i = letters[pos % len(letters)]
        flipped = text[:i] + text[i].swapcase() + text[i + 1 :]
        assert eip55_classify(flipped).case_class in (INVALID_CHECKSUM, ALL_LOWER, ALL_UPPER)
        assert not eip55_classify(flipped).checksum_matches


class TestRlpAndCreate:
    def test_nonce_zero_layout(self):
        out = rlp_encode_address_nonce(FIXTURE_SENDER, 0)
        assert len(out) == 23
        assert out[0] == 0xD6 and out[1] == 0x94 and out[-1] == 0x80
        assert out[2:22] == FIXTURE_SENDER.raw

    def test_nonce_one(self):
        out = rlp_encode_address_nonce(FIXTURE_SENDER, 1)
        assert len(out) == 23 and out[-1] == 0x01

    def test_nonce_128(self):
        out = rlp_encode_address_nonce(Address(bytes(20)), 128)
        assert out[-2:] == b"\x81\x80"
        assert out == oracles.rlp([bytes(20), 128])

    @pytest.mark.parametrize("nonce", [0, 1, 127, 128, 255, 256, 2**32, 2**64 - 1])
    def test_matches_generic_rlp(self, nonce):
        assert rlp_encode_address_nonce(FIXTURE_SENDER, nonce) == oracles.rlp([FIXTURE_SENDER.raw, nonce])

    @pytest.mark.parametrize("nonce", [-1, 2**64])
    def test_nonce_range(self, nonce):
        with pytest.raises(ValueError):
            rlp_encode_address_nonce(FIXTURE_SENDER, nonce)

    def test_golden(self):
        assert derive_create_address(FIXTURE_SENDER, 0).hex == FIXTURE_CREATE_0
        assert derive_create_address(FIXTURE_SENDER, 1).hex == FIXTURE_CREATE_1
        assert oracles.create_address(FIXTURE_SENDER.raw, 0).hex() == FIXTURE_CREATE_0[2:]

    def test_deterministic_and_nonce_sensitive(self):
        a0 = derive_create_address(FIXTURE_SENDER, 0)
        assert a0 == derive_create_address(FIXTURE_SENDER, 0)
        assert a0 != derive_create_address(FIXTURE_SENDER, 1)

    def test_random_senders_against_oracle(self):
        rng = random.Random(7)
        for _ in range(5):
            sender = bytes(rng.getrandbits(8) for _ in range(20))
            for nonce in (0, 1, 127, 128, 200, 256, 65535, 65536):
                assert derive_create_address(Address(sender), nonce).raw == oracles.create_address(sender, nonce)


class TestAddress:
    def test_canonical_text(self):
        a = Address.from_hex("0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed")
        assert str(a) == "0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed"

    def test_length(self):
        with pytest.raises(ValueError):
            Address(b"\x00" * 19)
