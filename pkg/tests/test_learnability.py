"""Learner harness: exact and approximate trials, reports and composition."""

import math

import pytest

from wbc_arena.adversaries import constant_zero_learner, exhaustive_table_learner, identity_table_learner
from wbc_arena.core import Exhaustive, Poly, Sampled, Table, get_family
from wbc_arena.errors import BudgetExceeded, SizeBoundViolated
from wbc_arena.learnability import (
    APPROX,
    EXACT,
    Learner,
    approx_learning_trial,
    compose_learner,
    default_basis,
    estimate_learnability,
    exact_learning_trial,
    run_approx_learning_trial,
    run_exact_learning_trial,
)
from wbc_arena.rng import RngStream


def test_identity_family_exact_learning():
    assert run_exact_learning_trial(get_family("identity"), identity_table_learner(), 8, RngStream(0))  # [TRIVIAL]
    rep = estimate_learnability(get_family("identity"), identity_table_learner(), 8, 100, EXACT, seed=1)
    assert rep.success_rate == 1.0 and rep.equality_basis == "Exhaustive"


def test_identity_family_approx_learning():
    assert run_approx_learning_trial(get_family("identity"), identity_table_learner(), 8, RngStream(0))


def test_xor_is_learned_by_tabulation():
    rep = estimate_learnability(get_family("xor"), exhaustive_table_learner(), 6, 50, EXACT, seed=2)
    assert rep.success_rate == 1.0
    assert estimate_learnability(get_family("xor"), constant_zero_learner(), 6, 50, EXACT, seed=2).successes == 0


def test_ro_approx_constant_zero_k32():
    rep = estimate_learnability(get_family("ro"), constant_zero_learner(), 32, 2000, APPROX, seed=3)
    # [DERIVED] failure needs RO(q || a) = q at the one sampled a: probability 2^-32
    assert rep.success_rate >= 0.999


def test_ro_approx_constant_zero_k8_rate():
    rep = estimate_learnability(get_family("ro"), constant_zero_learner(), 8, 4000, APPROX, seed=4)
    # [DERIVED] success rate 1 - 2^-8; sd ~ 0.001, allow 5 sd
    assert abs(rep.success_rate - (1 - 2 ** -8)) < 0.006


def test_ro_exact_constant_zero_k8_census_rate():
    rep = estimate_learnability(get_family("ro"), constant_zero_learner(), 8, 600, EXACT, seed=5)
    assert rep.equality_basis == "Exhaustive"
    # [DERIVED] Q^q == 0 iff none of the 256 table entries hits q: (1 - 2^-8)^256
    p = (1 - 2 ** -8) ** 256
    sd = math.sqrt(p * (1 - p) / 600)
    assert abs(rep.success_rate - p) < 5 * sd


def test_pairing_family_constant_zero_fails_approx():
    rep = estimate_learnability(get_family("E"), constant_zero_learner(), 16, 200, APPROX, seed=6)
    # [DERIVED] g^alpha never encodes as the zero string (tag byte is nonzero)
    assert rep.successes == 0


def test_default_basis():
    assert default_basis(get_family("ro"), 8) == Exhaustive()
    assert default_basis(get_family("ro"), 32) == Sampled(256)


def test_size_bound_enforced():
    big = Learner("big", lambda ctx: Table(ctx.input_len, 1, tuple((format(v, "08b"), "1") for v in range(256))),
                  query_budget=0, output_size_poly=Poly((10,)))
    with pytest.raises(SizeBoundViolated):
        run_exact_learning_trial(get_family("ro"), big, 8, RngStream(0))


def test_query_budget_enforced():
    greedy = Learner("greedy", lambda ctx: [ctx.query("0" * 8) for _ in range(3)] and Table(8, 1),
                     query_budget=2, output_size_poly=Poly((256,)))
    with pytest.raises(BudgetExceeded):
        run_exact_learning_trial(get_family("ro"), greedy, 8, RngStream(0))


def test_query_accounting():
    rec = exact_learning_trial(get_family("xor"), exhaustive_table_learner(), 5, RngStream(0))
    assert rec.queries == 32
    assert approx_learning_trial(get_family("xor"), constant_zero_learner(), 5, RngStream(0)).queries == 0


def test_exact_implies_approx_on_each_trial():
    fam, lr = get_family("ro"), constant_zero_learner()
    for t in range(200):
        exact = exact_learning_trial(fam, lr, 6, RngStream(10, t))
        approx = approx_learning_trial(fam, lr, 6, RngStream(10, t))
        assert exact.key == approx.key and exact.program == approx.program
        if exact.success:
            assert approx.success


def test_reports_are_reproducible_and_export():
    a = estimate_learnability(get_family("ro"), constant_zero_learner(), 8, 50, EXACT, seed=11)
    b = estimate_learnability(get_family("ro"), constant_zero_learner(), 8, 50, EXACT, seed=11)
    assert a == b
    lines = a.to_csv().splitlines()
    assert lines[0] == "family_id,learner_id,k,mode,trials,successes,rate,basis"
    assert lines[1].startswith("ro,constant-zero,8,exact,50,")
    with pytest.raises(ValueError):
        estimate_learnability(get_family("ro"), constant_zero_learner(), 8, 0, EXACT, seed=1)
    with pytest.raises(ValueError):
        estimate_learnability(get_family("ro"), constant_zero_learner(), 8, 5, "fuzzy", seed=1)


def test_compose_learner_pairing_e_via_f():
    e, f = get_family("E"), get_family("F")
    inner = constant_zero_learner()
    composed = compose_learner(inner, f)
    for t in range(30):
        # E and F keys drawn from the same stream describe the same function
        on_e = approx_learning_trial(e, composed, 16, RngStream(12, t))
        on_f = approx_learning_trial(f, inner, 16, RngStream(12, t))
        assert on_e.success == on_f.success
        assert on_e.queries == on_f.queries
        assert on_e.program == on_f.program == Table(31, 15 + 72, (), "zero")


def test_compose_learner_forwards_verbatim():
    xor = get_family("xor")
    composed = compose_learner(exhaustive_table_learner(), xor, learner_id="lifted")
    assert composed.learner_id == "lifted"
    for t in range(20):
        a = exact_learning_trial(xor, composed, 5, RngStream(13, t))
        b = exact_learning_trial(xor, exhaustive_table_learner(), 5, RngStream(13, t))
        assert a.success == b.success is True
        assert a.queries == b.queries == 32
