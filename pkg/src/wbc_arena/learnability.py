"""Learner harness: exact and approximate learning trials at a fixed key length.

A learner gets ``1^|q|``, the family descriptor and budgeted oracle access to
``Q^q``, and emits a program ``X``.  Exact success is ``X = Q^q`` under the
configured equality basis; approximate success is ``X(a) = Q^q(a)`` for one
uniform input ``a``.  Both enforce the learner's size bound on ``|X|`` and its
slowdown bound on ``X``'s step count.

"Not learnable" can only ever mean "no registered learner succeeded"; reports
carry the equality basis so non-authoritative (sampled) verdicts stay visible.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Callable
from dataclasses import dataclass

from .core import (
    Basis,
    Exhaustive,
    Family,
    Native,
    OracleSession,
    Poly,
    ProgramValue,
    Sampled,
    EXHAUSTIVE_CAP_BITS,
    eval_program,
    exact_equal,
    program_size,
    run_family,
    sample_key,
)
from .errors import InputLengthMismatch, MalformedProgram, SizeBoundViolated
from .oracle import bind_random_oracle
from .rng import RngStream

EXACT = "exact"
APPROX = "approx"
DEFAULT_SAMPLED = Sampled(256)


class LearnContext:
    """The learner's view: ``1^|q|``, the family and budgeted oracle access."""

    def __init__(self, family: Family, key: str, rng: RngStream, query_budget: int):
        self.family = family
        self.key_len = len(key)
        self.rng = rng
        self.session = OracleSession([(family, key)], budget=query_budget)

    @property
    def input_len(self) -> int | None:
        return self.family.input_len_for(self.key_len)

    @property
    def output_len(self) -> int | None:
        return self.family.output_len_for(self.key_len)

    @property
    def query_budget(self) -> int | None:
        return self.session.budget

    def query(self, a: str) -> str:
        return self.session.query(1, a)

    @property
    def queries(self) -> int:
        return len(self.session.records)


@dataclass(frozen=True)
class Learner:
    learner_id: str
    algorithm: Callable[[LearnContext], ProgramValue]
    query_budget: int
    output_size_poly: Poly
    # X may take at most slowdown_poly(t) steps where t is Q^q's step count
    slowdown_poly: Poly = Poly((0, 4))
    description: str = ""

    def learn(self, ctx: LearnContext) -> ProgramValue:
        return self.algorithm(ctx)


@dataclass(frozen=True)
class TrialRecord:
    success: bool
    key: str
    program: ProgramValue
    queries: int
    basis: str = "pointwise"


@dataclass(frozen=True)
class LearnReport:
    family_id: str
    learner_id: str
    k: int
    mode: str
    trials: int
    successes: int
    equality_basis: str

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    CSV_COLUMNS = ("family_id", "learner_id", "k", "mode", "trials", "successes", "rate", "basis")

    def csv_row(self) -> list:
        return [self.family_id, self.learner_id, self.k, self.mode, self.trials, self.successes,
                f"{self.success_rate:.6f}", self.equality_basis]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.CSV_COLUMNS)
        w.writerow(self.csv_row())
        return buf.getvalue()


def default_basis(family: Family, k: int, key_len: int | None = None) -> Basis:
    n = family.input_len_for(key_len if key_len is not None else k)
    return Exhaustive() if n is not None and n <= EXHAUSTIVE_CAP_BITS else DEFAULT_SAMPLED


def _run_learner(family, learner, k, rng):
    key = sample_key(family, k, rng.derive("key"))
    ctx = LearnContext(family, key, rng.derive("learner"), learner.query_budget)
    program = learner.learn(ctx)
    size = program_size(program)
    if size > learner.output_size_poly(len(key)):
        raise SizeBoundViolated(f"{learner.learner_id} emitted {size} bytes, bound {learner.output_size_poly(len(key))}")
    return key, program, ctx.queries


def exact_learning_trial(family: Family, learner: Learner, k: int, rng: RngStream,
                         basis: Basis | None = None) -> TrialRecord:
    """One exact-learning trial; a fresh random oracle is bound for its duration."""
    with bind_random_oracle(rng.derive("oracle")):
        key, program, queries = _run_learner(family, learner, k, rng)
        n = family.input_len_for(len(key))
        basis = basis or default_basis(family, k, len(key))
        verdict = exact_equal(
            program, Native(family.family_id, key), n, basis,
            rng=rng.derive("equality"),
            budget=lambda t: max(1, learner.slowdown_poly(t)),
            sampler=lambda r: family.sample_input(len(key), r),
        )
    return TrialRecord(verdict.equal, key, program, queries, str(basis))


def approx_learning_trial(family: Family, learner: Learner, k: int, rng: RngStream) -> TrialRecord:
    with bind_random_oracle(rng.derive("oracle")):
        key, program, queries = _run_learner(family, learner, k, rng)
        a = family.sample_input(len(key), rng.derive("input"))
        ref, t = run_family(family, key, a)
        try:
            got = eval_program(program, a, max(1, learner.slowdown_poly(t)))
        except (MalformedProgram, InputLengthMismatch):
            return TrialRecord(False, key, program, queries)
    return TrialRecord(got.ok and got.output == ref, key, program, queries)


def run_exact_learning_trial(family: Family, learner: Learner, k: int, rng: RngStream,
                             basis: Basis | None = None) -> bool:
    return exact_learning_trial(family, learner, k, rng, basis).success


def run_approx_learning_trial(family: Family, learner: Learner, k: int, rng: RngStream) -> bool:
    return approx_learning_trial(family, learner, k, rng).success


def estimate_learnability(family: Family, learner: Learner, k: int, trials: int, mode: str,
                          seed: int, basis: Basis | None = None) -> LearnReport:
    """Trial ``t`` uses ``RngStream(seed, t)``, so reports reproduce exactly."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if mode not in (EXACT, APPROX):
        raise ValueError(f"mode must be {EXACT!r} or {APPROX!r}")
    wins = 0
    used_basis = "pointwise"
    for t in range(trials):
        rng = RngStream(seed, t)
        rec = (exact_learning_trial(family, learner, k, rng, basis) if mode == EXACT
               else approx_learning_trial(family, learner, k, rng))
        wins += rec.success
        used_basis = rec.basis
    return LearnReport(family.family_id, learner.learner_id, k, mode, trials, wins, used_basis)


def compose_learner(inner: Learner, inner_family: Family,
                    key_len_map: Callable[[int], int] = lambda n: n,
                    learner_id: str | None = None) -> Learner:
    """Turn a learner for ``Q2`` into one for ``Q1``.

    The composed learner runs ``inner`` against ``inner_family`` with
    ``1^key_len_map(|q1|)`` and answers each of its queries with its own
    ``Q1`` oracle, verbatim.  This is sound whenever every ``Q1^q1`` equals
    some ``Q2^q2`` with ``|q2| = key_len_map(|q1|)``.
    """

    def algorithm(ctx: LearnContext) -> ProgramValue:
        forwarded = _ForwardingContext(ctx, inner_family, key_len_map(ctx.key_len))
        return inner.learn(forwarded)

    return Learner(
        learner_id or f"compose({inner.learner_id})",
        algorithm,
        query_budget=inner.query_budget,
        output_size_poly=inner.output_size_poly,
        slowdown_poly=inner.slowdown_poly,
        description=f"{inner.learner_id} run through the outer oracle",
    )


class _ForwardingContext:
    def __init__(self, outer: LearnContext, family: Family, key_len: int):
        self._outer = outer
        self.family = family
        self.key_len = key_len
        self.rng = outer.rng

    @property
    def input_len(self) -> int | None:
        return self.family.input_len_for(self.key_len)

    @property
    def output_len(self) -> int | None:
        return self.family.output_len_for(self.key_len)

    @property
    def query_budget(self) -> int | None:
        return self._outer.query_budget

    def query(self, a: str) -> str:
        return self._outer.query(a)

    @property
    def queries(self) -> int:
        return self._outer.queries
