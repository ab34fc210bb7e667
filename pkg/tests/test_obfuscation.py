"""Obfuscator correctness reports, tau machinery and soundness-gap estimators."""

import pytest

from wbc_arena.adversaries import (
    ConstantDistinguisher,
    EqualityTesterDistinguisher,
    FreshKeySimulator,
    JunkProgramSimulator,
    ParseKeyGuesser,
    RandomGuesser,
    first_bit,
    parity,
)
from wbc_arena.core import Native, Table, get_family
from wbc_arena.errors import DomainTooLarge, KeyRejected
from wbc_arena.obfuscation import (
    check_correctness,
    check_tau_correctness,
    estimate_ind_gap,
    estimate_pvbbp_gap,
    estimate_pvbbp_max,
    obfuscate,
    table_obfuscator,
)
from wbc_arena.registry import get_obfuscator, obfuscator_ids
from wbc_arena.rng import RngStream
from wbc_arena.schemes import prob_pairing_family


def test_identity_obfuscator_is_correct():
    rep = check_correctness(get_obfuscator("identity"), get_family("prf"), 16, 200, RngStream(0))
    assert rep.failures == 0 and rep.passed  # [TRIVIAL]
    assert rep.to_dict()["pass"] is True


def test_table_obfuscator_on_small_family():
    rep = check_correctness(table_obfuscator(), get_family("xor"), 6, 100, RngStream(1), inputs_per_key=10)
    assert rep.failures == 0 and rep.passed
    prog = obfuscate(table_obfuscator(), get_family("xor"), "101", RngStream(0))
    assert isinstance(prog, Table) and len(prog.entries) == 8
    with pytest.raises(DomainTooLarge):
        obfuscate(table_obfuscator(), get_family("xor"), "0" * 13, RngStream(0))


def test_faulty_obfuscator_failure_rate_tracks_eps():
    rep = check_correctness(get_obfuscator("faulty-0.1"), get_family("prf"), 16, 4000, RngStream(2))
    # [DERIVED] Binomial(4000, 0.1): sd ~ 19, so 5 sd is about 95 failures
    assert abs(rep.failures - 400) < 95
    assert not rep.passed
    assert check_correctness(get_obfuscator("faulty-0"), get_family("prf"), 16, 200, RngStream(2)).passed


def test_pairing_obfuscator_passes_and_wrong_y_fails():
    ok = check_correctness(get_obfuscator("pairing"), get_family("E"), 31, 300, RngStream(3))
    assert ok.failures == 0 and ok.passed  # [PAPER]
    bad = check_correctness(get_obfuscator("wrong-y"), get_family("E"), 31, 300, RngStream(3))
    # [DERIVED] a wrong y gives a different mask except with negligible probability
    assert bad.failures == 300 and not bad.passed
    with pytest.raises(KeyRejected):
        obfuscate(get_obfuscator("pairing"), get_family("D"), "", RngStream(0))


def test_size_and_slowdown_ratios_reported():
    rep = check_correctness(get_obfuscator("pairing"), get_family("E"), 16, 20, RngStream(4))
    assert 0 < rep.max_size_ratio <= 1
    assert 0 < rep.max_slowdown_ratio <= 1


def test_rerandomizer_strict_fails_tau_passes():
    pe, tau, decider = prob_pairing_family(31)
    obf = get_obfuscator("rerandomize")
    strict = check_correctness(obf, pe, 31, 300, RngStream(5))
    assert strict.failure_rate >= 0.99
    loose = check_tau_correctness(obf, pe, decider, 31, 300, RngStream(5))
    assert loose.failures == 0 and loose.passed and loose.tau
    # the broken fixture fails even up to tau
    assert check_tau_correctness(get_obfuscator("wrong-y"), pe, decider, 31, 100, RngStream(5)).failures == 100


def test_tau_relation_laws():
    _, tau, decider = prob_pairing_family(8)
    rng = RngStream(6)
    keys = [decider.build(rng.bits(16))[0] for _ in range(60)]
    for a in keys[:20]:
        assert tau(a, a)
        for b in keys[20:40]:
            assert tau(a, b) == tau(b, a)
            for c in keys[40:]:
                if tau(a, b) and tau(b, c):
                    assert tau(a, c)


def test_registry_ids():
    assert "pairing" in obfuscator_ids()
    from wbc_arena.errors import UnknownId

    with pytest.raises(UnknownId):
        get_obfuscator("faulty-2")
    with pytest.raises(UnknownId):
        get_obfuscator("bogus")


def test_ind_gap_junk_program_is_caught():
    gap = estimate_ind_gap(get_obfuscator("pairing"), get_family("E"), EqualityTesterDistinguisher(20),
                           JunkProgramSimulator(), "", 16, 100, seed=7)
    assert gap.real.mean == 1.0 and gap.simulated.mean == 0.0 and gap.gap == 1.0


def test_ind_gap_constant_distinguisher_is_zero():
    gap = estimate_ind_gap(get_obfuscator("pairing"), get_family("E"), ConstantDistinguisher(),
                           FreshKeySimulator(), "", 16, 50, seed=7)
    assert gap.gap == 0.0  # [TRIVIAL]


def test_pvbbp_parse_key_against_identity():
    obf = get_obfuscator("identity")
    gap = estimate_pvbbp_gap(obf, get_family("prf"), ParseKeyGuesser(first_bit), RandomGuesser(),
                             first_bit, "", 16, 2000, seed=8)
    # [DERIVED] real guesser is always right; the simulator is right half the time
    assert gap.real.mean == 1.0
    assert abs(gap.gap - 0.5) < 0.05


def test_pvbbp_max_over_predicates():
    best, gaps = estimate_pvbbp_max(get_obfuscator("identity"), get_family("prf"), ParseKeyGuesser(parity),
                                    RandomGuesser(), {"first-bit": first_bit, "parity": parity}, ["", "1"],
                                    16, 400, seed=9)
    assert len(gaps) == 4
    assert best == max(g.gap for g in gaps.values())
    # the guesser computes parity, so the parity instances carry the max
    assert best == max(gaps[("parity", "")].gap, gaps[("parity", "1")].gap)


def test_soundness_is_reproducible():
    args = (get_obfuscator("pairing"), get_family("E"), EqualityTesterDistinguisher(5),
            FreshKeySimulator(), "", 16, 30)
    assert estimate_ind_gap(*args, seed=3) == estimate_ind_gap(*args, seed=3)


def test_native_program_check():
    prog = obfuscate(get_obfuscator("pairing"), get_family("E"), get_family("E").key_sampler(16, RngStream(0)),
                     RngStream(0))
    assert isinstance(prog, Native) and prog.family_id == "F"
