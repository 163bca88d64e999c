from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from subrecursive.beaver import ADVERSARIES
from subrecursive.codec import (
    C,
    C_APPLY,
    CODEWORDS,
    INVALID,
    candidate_count,
    candidate_mass,
    constants_text,
    decode_nat,
    decode_rho,
    encode_apply,
    encode_base,
    encode_nat,
    encode_rho,
    head_bits,
    index_of,
    is_valid,
    nat_bound,
    nat_length,
    nat_literal,
    nth_string,
    num,
    poly_program,
    try_decompose,
    valid_count,
    valid_programs,
)
from subrecursive.dyadic import Dyadic
from subrecursive.errors import DomainError, EncodingError

bits = st.text(alphabet="01", min_size=1, max_size=40)


def test_shortlex_starts_at_zero():
    assert [nth_string(k) for k in range(1, 8)] == ["0", "1", "00", "01", "10", "11", "000"]
    assert num("0") == 0
    assert num("00") == 2


@given(st.integers(min_value=1, max_value=10**12))
def test_index_of_inverts_nth_string(k):
    assert index_of(nth_string(k)) == k


def test_nth_string_rejects_zero():
    with pytest.raises(DomainError):
        nth_string(0)


def test_codeword_table_is_complete():
    assert sum(Fraction(1, 2 ** len(b)) for b in CODEWORDS.values()) == 1
    words = list(CODEWORDS.values())
    for a in words:
        for b in words:
            assert a == b or not b.startswith(a)


def test_nat_code_small_values():
    assert encode_nat(0) == "1"
    assert encode_nat(1) == "0100"
    assert encode_nat(5) == "01110"


@given(st.integers(min_value=0, max_value=10**9))
def test_nat_code_decodes(n):
    code = encode_nat(n)
    assert decode_nat(code) == n
    assert len(code) == nat_length(n)


def test_nat_code_length_bound():
    for n in list(range(2, 5000)) + list(range(5000, 10**6, 997)) + [2**k for k in range(2, 20)]:
        assert nat_length(n) <= nat_bound(n)


def test_one_bit_strings():
    assert is_valid("0")
    assert not is_valid("1")
    assert try_decompose("") is INVALID


@given(bits)
def test_decomposition_is_total(s):
    form = try_decompose(s)
    assert form is INVALID or is_valid(s)


def test_generation_matches_brute_force():
    for size in range(1, 17):
        brute = sorted("".join(b) for b in product("01", repeat=size) if is_valid("".join(b)))
        assert list(valid_programs(size)) == brute
        assert valid_count(size) <= candidate_count(size)


def test_valid_programs_are_prefix_free():
    programs = {p for size in range(1, 17) for p in valid_programs(size)}
    for p in programs:
        assert not any(p[:i] in programs for i in range(1, len(p)))


def test_candidate_mass_is_a_probability():
    assert candidate_mass(1, 30) <= Dyadic.one()
    assert candidate_mass(1, 30) > Dyadic(1, 1)


def test_apply_flattens():
    h = head_bits("PSM")
    nested = encode_apply(encode_apply(h, ["0"]), ["0"])
    assert nested == encode_apply(h, ["0", "0"])
    assert len(nested) == len(h) + 2 + 2 * C_APPLY
    assert C == C_APPLY == 5


def test_over_saturated_application_is_invalid():
    assert not is_valid("11000" * 3 + head_bits("PSM") + "000")
    with pytest.raises(EncodingError):
        encode_apply(nat_literal(2), ["0"])


def test_base_program_takes_integer_arguments():
    w = encode_apply(ADVERSARIES["echo"], [encode_nat(5)])
    assert is_valid(w)
    assert len(w) == C_APPLY + len(ADVERSARIES["echo"]) + len(encode_nat(5))


def test_jump_targets_must_land_inside():
    assert is_valid(encode_base(["PUSH1", ("JNZB", 0), "HALT"]))
    assert is_valid(encode_base([("JNZF", 0), "PUSH1", "HALT"]))
    with pytest.raises(EncodingError):
        encode_base(["PUSH1", ("JNZB", 1), "HALT"])
    with pytest.raises(EncodingError):
        encode_base([("JNZF", 1), "PUSH1", "HALT"])


def test_rho_blocks():
    assert encode_rho(Dyadic.zero()) == "1"
    assert encode_rho(Dyadic.parse("0.01")) == "00101"
    assert encode_rho(Dyadic(1, 1), 3) == "0001100"
    assert decode_rho("00101") == Dyadic(1, 2)
    assert decode_rho("0001100").exponent == 3
    with pytest.raises(EncodingError):
        encode_rho(Dyadic.one())


def test_poly_program_layout():
    assert poly_program(2, 1) == CODEWORDS["POLY"] + encode_nat(1) + encode_nat(1)
    with pytest.raises(EncodingError):
        poly_program(0, 1)


def test_constants_text_lists_table():
    lines = constants_text().splitlines()
    assert lines[0].startswith("#")
    assert "codeword HALT 0" in lines
    assert "constant C 5" in lines
    assert "constant C_PRIME 4" in lines
