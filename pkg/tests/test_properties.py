"""Hypothesis property tests for the invariants that hold for every input."""

from hypothesis import given, settings
from hypothesis import strategies as st

from wbc_arena.bits import bits_to_int, int_to_bits, pack_fields, unpack_fields, xor_bits
from wbc_arena.core import Native, OracleSession, Poly, Table, deserialize_program, get_family, serialize_program
from wbc_arena.schemes import EncKey, GroupCtx, decrypt, encrypt, obfuscate_key, public_encrypt
from wbc_arena.stats import wilson_interval

bitstrings = st.text(alphabet="01", max_size=80)
SMALL_PRIMES = [3, 5, 7, 13, 101, 251, 65521, 2147483647, 4294967291]


@st.composite
def tables(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(0, 5))
    inputs = draw(st.sets(st.integers(0, (1 << n) - 1), max_size=8))
    entries = tuple((int_to_bits(v, n), draw(st.text(alphabet="01", min_size=m, max_size=m))) for v in inputs)
    return Table(n, m, entries, draw(st.sampled_from(["", "t", "junk"])))


programs = st.one_of(
    st.builds(Native, st.sampled_from(["identity", "xor", "prf", "E"]), bitstrings),
    tables(),
)


@given(programs)
def test_serialization_round_trip(p):
    assert deserialize_program(serialize_program(p)) == p


@given(programs, programs)
def test_serialization_is_injective(p, q):
    if p != q:
        assert serialize_program(p) != serialize_program(q)


@given(st.lists(bitstrings, max_size=6))
def test_pack_unpack_round_trip(fields):
    assert unpack_fields(pack_fields(*fields)) == fields


@given(st.integers(0, 64).flatmap(lambda n: st.tuples(st.text(alphabet="01", min_size=n, max_size=n),
                                                      st.text(alphabet="01", min_size=n, max_size=n))))
def test_xor_is_an_involution(pair):
    a, b = pair
    assert xor_bits(xor_bits(a, b), b) == a


@given(st.integers(0, 2 ** 40), st.integers(41, 64))
def test_int_bits_round_trip(v, width):
    assert bits_to_int(int_to_bits(v, width)) == v


@settings(max_examples=200)
@given(st.sampled_from(SMALL_PRIMES), st.data())
def test_bilinearity(w, data):
    ctx = GroupCtx(w)
    a, b, x, y = (data.draw(st.integers(0, w - 1)) for _ in range(4))
    assert ctx.pairing(ctx.g1(a) ** x, ctx.g1(b) ** y) == ctx.pairing(ctx.g1(a), ctx.g1(b)) ** (x * y)


@settings(max_examples=200)
@given(st.sampled_from(SMALL_PRIMES[2:]), st.data())
def test_encryption_round_trip_and_public_form(w, data):
    ctx = GroupCtx(w)
    g = ctx.g1(data.draw(st.integers(1, w - 1)))
    key = EncKey(ctx, g, ctx.g1(data.draw(st.integers(1, w - 1))))
    m = data.draw(st.text(alphabet="01", min_size=ctx.l, max_size=ctx.l))
    alpha = data.draw(st.integers(0, w - 1))
    ct = encrypt(key, m, alpha)
    assert decrypt(key, *ct) == m
    assert public_encrypt(obfuscate_key(key), m, alpha) == ct
    assert EncKey.from_bits(key.to_bits()) == key


@given(st.integers(0, 500), st.integers(1, 500))
def test_wilson_bounds(s, n):
    s = min(s, n)
    low, high = wilson_interval(s, n)
    assert 0.0 <= low <= s / n <= high <= 1.0


@given(st.lists(st.integers(0, 9), max_size=5), st.integers(0, 50))
def test_poly_evaluation(coeffs, n):
    assert Poly(tuple(coeffs))(n) == sum(c * n ** i for i, c in enumerate(coeffs))


@given(st.lists(st.tuples(st.sampled_from([1, 2]), st.text(alphabet="01", max_size=6)), max_size=30))
def test_session_records_every_query(queries):
    s = OracleSession([(get_family("identity"), "0000"), (get_family("xor"), "1010")])
    for i, a in queries:
        s.query(i, a)
    assert len(s.records) == s.steps == len(queries)
    assert [(r.i, r.input) for r in s.records] == queries
    # wrong-length inputs get the empty answer, right-length ones a 4-bit answer
    assert all((len(r.output) == 4) == (len(r.input) == 4) for r in s.records)
