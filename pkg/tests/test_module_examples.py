"""Remaining worked examples for the core model, soundness roles, games and zoo."""

from wbc_arena.adversaries import (
    ConstantDistinguisher,
    EqualityTesterDistinguisher,
    ForwardingAdversary,
    FreshKeySimulator,
    GuessAdversary,
    JunkProgramSimulator,
    KeyExtractionAdversary,
    RandomGuesser,
    RoProbingDistinguisher,
    exhaustive_table_learner,
    first_bit,
    zoo_registry,
)
from wbc_arena.core import Native, Sampled, Table, eval_family, eval_program, exact_equal, get_family, sample_key
from wbc_arena.games import WHITEBOX, Runner, check_obfuscatable, collect_corpus, estimate_advantage
from wbc_arena.learnability import EXACT, estimate_learnability
from wbc_arena.obfuscation import estimate_ind_gap, estimate_pvbbp_gap, obfuscate
from wbc_arena.registry import get_obfuscator
from wbc_arena.rng import RngStream
from wbc_arena.specs_library import get_spec
from wbc_arena.stats import AdvantageEstimate


def test_identity_key_0x5a():
    assert eval_family(get_family("identity"), "01011010", "10110011") == "10110011"  # [TRIVIAL]


def test_table_absent_entry_defaults_to_zero():
    assert eval_program(Table(2, 1, (("00", "1"),)), "01", 1).output == "0"  # [TRIVIAL]


def test_native_delegates_to_family():
    fam = get_family("E")
    key = sample_key(fam, 16, RngStream(0))
    a = fam.sample_input(len(key), RngStream(1))
    assert eval_program(Native("E", key), a, 100).output == eval_family(fam, key, a)


def test_e_equals_f_under_sampled_equality():
    e = get_family("E")
    key = sample_key(e, 31, RngStream(2))
    prog = obfuscate(get_obfuscator("pairing"), e, key, RngStream(3))
    v = exact_equal(prog, Native("E", key), e.input_len_for(len(key)), Sampled(1000), rng=RngStream(4),
                    sampler=lambda r: e.sample_input(len(key), r))
    assert v.equal  # [PAPER]


def test_fair_coin_ci_width():
    est = AdvantageEstimate.from_counts(500, 1000)
    # [DERIVED] Wilson half-width at n = 1000, p = 0.5 is about 0.031
    assert abs(est.ci_width - 0.062) < 0.001


def test_fresh_key_simulator_is_caught():
    gap = estimate_ind_gap(get_obfuscator("identity"), get_family("prf"), EqualityTesterDistinguisher(20),
                           FreshKeySimulator(), "", 16, 200, seed=1)
    assert gap.gap > 0.95


def test_equality_tester_accept_rates():
    obf = get_obfuscator("pairing")
    e = get_family("E")
    junk = estimate_ind_gap(obf, e, EqualityTesterDistinguisher(20), JunkProgramSimulator(), "", 16, 100, seed=2)
    assert junk.real.mean == 1.0 and junk.simulated.mean == 0.0
    blind = estimate_ind_gap(obf, e, EqualityTesterDistinguisher(0), JunkProgramSimulator(), "", 16, 50, seed=2)
    assert blind.real.mean == blind.simulated.mean == 1.0
    assert estimate_ind_gap(obf, e, ConstantDistinguisher(False), JunkProgramSimulator(), "", 16, 20, 2).gap == 0


def test_random_guessers_have_no_gap():
    gap = estimate_pvbbp_gap(get_obfuscator("identity"), get_family("prf"), RandomGuesser(), RandomGuesser(),
                             first_bit, "", 16, 4000, seed=3)
    assert gap.gap < 0.05


def test_findq_base_oracle_is_obfuscatable():
    spec = get_spec("find-q")
    corpus = collect_corpus(spec, [GuessAdversary(), ForwardingAdversary()], 8, 20, seed=4)
    assert check_obfuscatable(spec, 1, corpus)


def test_pair_spec_blackbox_guess():
    spec = get_spec("find-q-pair")
    est = estimate_advantage(Runner(spec, GuessAdversary()), 4, 4000, 5)
    # [DERIVED] both 4-bit shares guessed: 2^-8, expected 15.6 wins
    assert est.wins <= 40


def test_cca2_identity_key_extraction_wins():
    spec = get_spec("ind-cca2")
    est = estimate_advantage(Runner(spec, KeyExtractionAdversary(), WHITEBOX, get_obfuscator("identity"), 1),
                             16, 50, 6)
    assert est.wins == 50


def test_ro_probing_budget_zero_is_a_coin():
    spec = get_spec("ro-distinguish")
    est = estimate_advantage(Runner(spec, RoProbingDistinguisher(0)), 8, 4000, 7)
    assert abs(est.mean - 0.5) < 0.04


def test_registry_size_and_tabulating_learner():
    assert len(zoo_registry()) >= 8
    rep = estimate_learnability(get_family("xor"), exhaustive_table_learner(), 8, 20, EXACT, seed=8)
    assert rep.success_rate == 1.0 and rep.equality_basis == "Exhaustive"
