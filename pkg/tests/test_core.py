"""Families, program values, evaluation budgets, equality and oracle sessions."""

import struct

import pytest

from wbc_arena.core import (
    Exhaustive,
    Native,
    OracleSession,
    Sampled,
    Table,
    deserialize_program,
    eval_family,
    eval_program,
    exact_equal,
    get_family,
    program_from_bits,
    program_to_bits,
    sample_key,
    serialize_program,
)
from wbc_arena.errors import (
    BudgetExceeded,
    DomainTooLarge,
    InputLengthMismatch,
    KeyRejected,
    MalformedProgram,
    UnknownId,
)
from wbc_arena.rng import RngStream


def test_native_wire_format_by_hand():
    # [DERIVED] tag | u32 len | "identity" | u32 payload len | u32 key bits | packed key
    expected = (bytes([0x01]) + struct.pack(">I", 8) + b"identity" + struct.pack(">I", 5)
                + struct.pack(">I", 3) + bytes([0b10100000]))
    assert serialize_program(Native("identity", "101")) == expected
    assert deserialize_program(expected) == Native("identity", "101")


def test_table_wire_format_by_hand():
    t = Table(2, 1, (("11", "1"), ("01", "0")))
    # [DERIVED] entries are sorted; each input and output padded to a byte
    expected = (bytes([0x02]) + struct.pack(">I", 0) + struct.pack(">I", 8 + 4)
                + struct.pack(">II", 2, 1) + bytes([0b01000000, 0, 0b11000000, 0b10000000]))
    assert serialize_program(t) == expected
    assert deserialize_program(expected) == t


def test_deserialize_rejects_garbage():
    for blob in (b"", b"\x07\x00\x00\x00\x00\x00\x00\x00\x00", b"\x01\x00\x00"):
        with pytest.raises(MalformedProgram):
            deserialize_program(blob)
    good = serialize_program(Native("identity", "101"))
    # non-zero padding bits make the encoding non-canonical
    with pytest.raises(MalformedProgram):
        deserialize_program(good[:-1] + bytes([0b10100001]))
    with pytest.raises(MalformedProgram):
        program_from_bits("0101")


def test_program_bits_round_trip():
    p = Table(3, 2, (("000", "11"), ("101", "01")), label="t")
    assert program_from_bits(program_to_bits(p)) == p


def test_table_rejects_bad_shapes():
    with pytest.raises(MalformedProgram):
        Table(2, 1, (("1", "0"),))
    with pytest.raises(MalformedProgram):
        Table(2, 1, (("10", "0"), ("10", "1")))


def test_eval_family_toys():
    assert eval_family(get_family("identity"), "0000", "1011") == "1011"  # [TRIVIAL]
    assert eval_family(get_family("xor"), "1100", "1010") == "0110"
    # [DERIVED] frozen keyed BLAKE2b value, regression guard
    assert eval_family(get_family("prf"), "1010101010101010", "0000000011111111") == "0101000001010111"


def test_eval_family_errors():
    with pytest.raises(InputLengthMismatch):
        eval_family(get_family("identity"), "0000", "101")
    with pytest.raises(KeyRejected):
        eval_family(get_family("identity"), "", "")


def test_unknown_family():
    with pytest.raises(UnknownId):
        get_family("nope")
    with pytest.raises(MalformedProgram):
        eval_program(Native("nope", "1"), "1", 10)


def test_eval_program_budget():
    out = eval_program(Native("identity", "0000"), "1010", 5)
    assert out.ok and out.output == "1010" and out.steps_used == 1
    # the reference PRF reports 1 step, so a 1-step budget suffices but nothing is free
    assert eval_program(Native("prf", "0000"), "1010", 1).ok
    with pytest.raises(ValueError):
        eval_program(Native("identity", "0"), "1", 0)


def test_eval_program_step_overrun_reports_budget_exceeded():
    # findq[prf] on a malformed Y uses 1 + base steps = 2
    from wbc_arena.schemes import findq_family, findq_key

    fam = findq_family("prf")
    key = findq_key("0101", "1111", "0000")
    out = eval_program(Native(fam.family_id, key), "00", 1)
    assert not out.ok and out.status == "BudgetExceeded"


def test_table_defaults_to_zeros():
    t = Table(2, 3, (("01", "111"),))
    assert eval_program(t, "01", 1).output == "111"
    assert eval_program(t, "10", 1).output == "000"
    with pytest.raises(InputLengthMismatch):
        eval_program(t, "1", 1)


def test_exact_equal_exhaustive():
    ident = Native("identity", "000")
    table = Table(3, 3, tuple((format(v, "03b"), format(v, "03b")) for v in range(8)))
    verdict = exact_equal(table, ident, 3)
    assert verdict.equal and verdict.authoritative
    broken = Table(3, 3, tuple((format(v, "03b"), format(v, "03b")) for v in range(7)))
    verdict = exact_equal(broken, ident, 3)
    # [DERIVED] only 111 is missing and it defaults to 000
    assert not verdict.equal and verdict.counterexample == "111"


def test_exact_equal_sampled_and_caps():
    ident = Native("identity", "0" * 24)
    v = exact_equal(ident, ident, 24, Sampled(16), rng=RngStream(0))
    assert v.equal and not v.authoritative
    with pytest.raises(DomainTooLarge):
        exact_equal(ident, ident, 21, Exhaustive())
    with pytest.raises(ValueError):
        exact_equal(ident, ident, 24, Sampled(4))


def test_sample_key_respects_min_k():
    from wbc_arena.errors import Unsamplable

    with pytest.raises(Unsamplable):
        sample_key(get_family("E"), 1, RngStream(0))


def test_oracle_session_records_and_budget():
    s = OracleSession([(get_family("identity"), "0000"), (get_family("xor"), "1111")], budget=3)
    assert s.query(1, "1010") == "1010"
    assert s.query(2, "1010") == "0101"
    # wrong-shaped inputs are answered with the empty string, and still cost a step
    assert s.query(2, "1") == ""
    assert [r.t for r in s.records] == [1, 2, 3]
    assert s.count(2) == 2
    with pytest.raises(BudgetExceeded):
        s.query(1, "0000")
    with pytest.raises(IndexError):
        OracleSession([(get_family("identity"), "0")]).query(2, "0")


def test_oracle_session_rejects_bad_keys():
    with pytest.raises(KeyRejected):
        OracleSession([(get_family("identity"), "abc")])


def test_session_charge_and_run_program():
    s = OracleSession([(get_family("identity"), "00")], budget=4)
    s.charge(2)
    out = s.run_program(Native("identity", "00"), "11")
    assert out.output == "11" and s.steps == 3
    with pytest.raises(BudgetExceeded):
        s.charge(2)
