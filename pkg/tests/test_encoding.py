from collections import Counter
import math

import pytest
from hypothesis import given, strategies as st

from gchowf.encoding import (
    StateEncoding,
    bits_to_bytes,
    bytes_to_bits,
    clog2,
    count_states,
    decode_state,
    encode_state,
    encoding_length,
    format_hex_record,
    parse_hex,
    parse_hex_records,
    sample_uniform_state,
    state_bits_from_bytes,
    state_to_bytes,
    validate_encoding,
)
from gchowf.errors import InvalidEncoding, RetriesExhausted
from gchowf.gch import GchState, enumerate_states
from gchowf.prng import PrngStream
from gchowf.verify import iter_valid_encodings_raw
from oracles import gch_census

MIXED_BITS = StateEncoding(9, "010100010", "001110100", ((5, 6), (7, 8), (7, 9))).bits


def layout(n, init, had, pairs):
    return StateEncoding(n, init, had, tuple(pairs)).bits


@pytest.mark.parametrize("k, expected", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (9, 4), (10, 4), (17, 5)])
def test_clog2(k, expected):
    assert clog2(k) == expected == math.ceil(math.log2(k))


def test_layout_length():
    assert len(MIXED_BITS) == encoding_length(9, 3) == 18 + 4 + 3 * 8


def test_mixed_layout_decodes():
    assert validate_encoding(MIXED_BITS, 9) == (True, None)
    assert str(decode_state(MIXED_BITS, 9)) == "0 1 + - G{5,6}:00 G{7,8,9}:010"


def test_all_zero_is_ground_state():
    enc = "0" * encoding_length(2, 0)
    assert str(decode_state(enc, 2)) == "0 0"
    assert encode_state(GchState.product("00")) == enc


def test_ghz_with_flipped_member():
    s = GchState.parse("G{1,2}:01")
    assert encode_state(s) == layout(2, "01", "10", [(1, 2)])


@pytest.mark.parametrize("n, enc, rule", [
    (2, layout(2, "00", "01", [(2, 1)]), "ControlNotSmallest"),
    (2, "0" * 3, "LengthMismatch"),
    (2, "0" * 7, "LengthMismatch"),
    (3, layout(3, "100", "100", [(1, 2)]), "ControlNotPlus"),
    (3, layout(3, "000", "000", [(1, 2)]), "ControlNotPlus"),
    (3, layout(3, "000", "110", [(1, 2)]), "TargetHasHadamard"),
    (3, layout(3, "000", "101", [(1, 2), (3, 2)]), "DuplicateTarget"),
    (3, layout(3, "000", "100", [(1, 3), (1, 2)]), "UnsortedPairs"),
    (3, layout(3, "000", "100", [(1, 1)]), "SelfLoop"),
    (3, layout(3, "000", "100", [(1, 4)]), "PositionOutOfRange"),
    (2, "0000" + "11", "CountOverflow"),
])
def test_validation_rules(n, enc, rule):
    assert validate_encoding(enc, n) == (False, rule)
    with pytest.raises(InvalidEncoding) as err:
        decode_state(enc, n)
    assert err.value.rule == rule


def test_validate_is_total():
    assert validate_encoding("01x", 2)[0] is False
    assert validate_encoding("", 0)[0] is False


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bijection(n):
    states = enumerate_states(n)
    encs = [encode_state(s) for s in states]
    assert len(set(encs)) == len(states)
    assert all(decode_state(e, n) == s for e, s in zip(encs, states))
    valid = list(iter_valid_encodings_raw(n)) if n < 4 else None
    if valid is not None:
        assert sorted(valid) == sorted(encs)
    assert count_states(n) == len(states) == len(gch_census(n))


def test_count_states_table():
    assert [count_states(n) for n in range(1, 6)] == [4, 18, 92, 532, 3440]


@given(st.binary(min_size=1, max_size=12))
def test_bits_bytes_round_trip(data):
    assert bits_to_bytes(bytes_to_bits(data)) == data


@given(seed=st.integers(0, 2**64 - 1), n=st.integers(1, 24))
def test_sampled_encodings_round_trip(seed, n):
    enc, state = sample_uniform_state(n, PrngStream.from_int(seed))
    assert validate_encoding(enc, n) == (True, None)
    assert decode_state(enc, n) == state
    assert encode_state(state) == enc
    assert state_bits_from_bytes(state_to_bytes(state), n) == enc


def test_packed_bytes_reject_padding_and_length():
    s = GchState.parse("G{1,2}:01 0 +")
    data = state_to_bytes(s)
    enc = encode_state(s)
    assert len(data) == (len(enc) + 7) // 8
    with pytest.raises(InvalidEncoding):
        state_bits_from_bytes(data + b"\0", 4)
    if len(enc) % 8:
        with pytest.raises(InvalidEncoding):
            state_bits_from_bytes(data[:-1] + bytes([data[-1] | 1]), 4)


def _sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("method", ["exact", "rejection"])
def test_uniform_n1(method):
    r = PrngStream.from_int(7)
    draws = 10_000
    counts = Counter(str(sample_uniform_state(1, r, method=method)[1]) for _ in range(draws))
    assert set(counts) == {"0", "1", "+", "-"}
    for c in counts.values():
        assert abs(c / draws - 0.25) <= 3 * _sigma(0.25, draws)


@pytest.mark.parametrize("method", ["exact", "rejection"])
def test_uniform_n2_hits_everything(method):
    r = PrngStream.from_int(8)
    seen = Counter(sample_uniform_state(2, r, method=method)[0] for _ in range(10_000))
    assert len(seen) == 18
    # chi-square against uniform, 17 dof; 99.9% critical value ~40.8
    exp = 10_000 / 18
    assert sum((c - exp) ** 2 / exp for c in seen.values()) < 40.8


def test_uniform_n3_chi_square():
    r = PrngStream.from_int(9)
    draws = 46_000
    seen = Counter(sample_uniform_state(3, r)[0] for _ in range(draws))
    assert len(seen) == 92
    exp = draws / 92
    # 91 dof; 99.9% critical value ~135.8
    assert sum((c - exp) ** 2 / exp for c in seen.values()) < 135.8


def test_rejection_gives_up():
    with pytest.raises(RetriesExhausted):
        sample_uniform_state(6, PrngStream.from_int(0), method="rejection", max_rejections=1)
    with pytest.raises(ValueError):
        sample_uniform_state(2, PrngStream.from_int(0), method="nope")


def test_hex_records():
    text = format_hex_record(4, b"\x12\xab")
    assert text == "n=4\n0x12ab"
    assert parse_hex_records(text.splitlines() + ["", "# c", "n=6", "0x00"]) == [(4, b"\x12\xab"), (6, b"\0")]
    for bad in ("12ab", "0x1"):
        with pytest.raises(ValueError):
            parse_hex(bad)
    with pytest.raises(ValueError):
        parse_hex_records(["0x00"])
