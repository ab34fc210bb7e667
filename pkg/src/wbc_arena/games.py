"""Experiment engine: black-box and white-box simulations, transcripts,
win predicates, obfuscatability checks and advantage/gap estimation.

One run of an experiment:

1. derive keys ``(q_1..q_n) = key_derive(k, r)`` from the experiment input ``r``;
2. (white-box) obfuscate the claimed families under fresh coins;
3. run the adversary with budgeted, recorded access to the stateless oracles;
4. output ``win(r, QuerySet, s)``.

Every oracle query costs one step and the adversary callback is charged one
step; a run that exhausts ``p_run(k)`` loses.  Each run binds its own random
oracle, so random-oracle families never share tables across trials.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Protocol

from .bits import bits_to_hex
from .core import (
    DEFAULT_BUDGET,
    EvalOutcome,
    Family,
    OracleSession,
    ProgramValue,
    QueryRecord,
    eval_program,
    program_to_bits,
)
from .errors import BudgetExceeded, EmptyCorpus, LengthMismatch, NotObfuscatable
from .obfuscation import Obfuscator, obfuscate
from .oracle import bind_random_oracle
from .rng import RngStream, derive_seed
from .stats import AdvantageEstimate

BLACKBOX = "blackbox"
WHITEBOX = "whitebox"
WHITEBOX_PAIR = "whitebox-pair"
MODES = (BLACKBOX, WHITEBOX, WHITEBOX_PAIR)

WinPredicate = Callable[[str, Sequence[QueryRecord], str], bool]


@dataclass(frozen=True)
class Specification:
    """An experiment definition following the fixed template.

    ``validators`` maps an obfuscatable oracle index to the oracle that accepts
    serialized programs for it (used by forwarding adversaries); ``aux``
    derives the extra adversary input some games hand out (e.g. ``(q0, q1)``).
    """

    spec_id: str
    families: tuple[Family, ...]
    key_derive: Callable[[int, str], tuple[str, ...]]
    p_in: Callable[[int], int]
    p_run: Callable[[int], int]
    win: WinPredicate
    output_len: Callable[[int], int]
    obfuscatable_claims: frozenset[int] = frozenset()
    aux: Callable[[int, str], str] | None = None
    validators: Mapping[int, int] = field(default_factory=dict)
    min_k: int = 1
    description: str = ""

    @property
    def n(self) -> int:
        return len(self.families)

    def index_of(self, family_id: str) -> int:
        for i, fam in enumerate(self.families, 1):
            if fam.family_id == family_id:
                return i
        raise KeyError(family_id)


@dataclass(frozen=True)
class Transcript:
    records: tuple[QueryRecord, ...]
    s: str
    steps_used: int
    aborted: bool = False

    def count(self, i: int) -> int:
        return sum(1 for rec in self.records if rec.i == i)

    def to_jsonl(self, result: int) -> str:
        lines = [json.dumps({"t": rec.t, "i": rec.i, "input_hex": bits_to_hex(rec.input),
                             "output_hex": bits_to_hex(rec.output)}) for rec in self.records]
        lines.append(json.dumps({"s_hex": bits_to_hex(self.s), "result": result, "steps": self.steps_used,
                                 "aborted": self.aborted}))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GameResult:
    result: int
    transcript: Transcript


class GameContext:
    """What the adversary sees: ``1^k``, the specification, any programs, aux input and oracles."""

    def __init__(self, k: int, spec: Specification, session: OracleSession, rng: RngStream,
                 programs: Mapping[int, ProgramValue], aux: str, key_lens: tuple[int, ...]):
        self.k = k
        self.spec = spec
        self.session = session
        self.rng = rng
        self.programs = dict(programs)
        self.aux = aux
        self.key_lens = key_lens

    @property
    def output_len(self) -> int:
        return self.spec.output_len(self.k)

    def input_len(self, i: int) -> int | None:
        return self.spec.families[i - 1].input_len_for(self.key_lens[i - 1])

    def sample_input(self, i: int) -> str:
        return self.spec.families[i - 1].sample_input(self.key_lens[i - 1], self.rng)

    def query(self, i: int, a: str) -> str:
        return self.session.query(i, a)

    def query_program(self, i: int, program: ProgramValue) -> str:
        return self.session.query(i, program_to_bits(program))

    def run_program(self, program: ProgramValue, a: str, budget: int = DEFAULT_BUDGET) -> EvalOutcome:
        """Local evaluation; covered by the per-callback charge."""
        return eval_program(program, a, budget)

    def charge(self, units: int = 1) -> None:
        self.session.charge(units)


class Adversary(Protocol):
    adversary_id: str

    def play(self, ctx: GameContext) -> str: ...


def _execute(spec: Specification, adversary: Adversary, k: int, r: str, coins: RngStream,
             obfuscated: Sequence[tuple[int, Obfuscator]]) -> GameResult:
    if len(r) != spec.p_in(k):
        raise LengthMismatch(f"{spec.spec_id} needs |r| = {spec.p_in(k)}, got {len(r)}")
    with bind_random_oracle(coins.derive("random-oracle")):
        keys = spec.key_derive(k, r)
        programs = {
            i: obfuscate(obf, spec.families[i - 1], keys[i - 1], coins.derive(("obfuscator", i)))
            for i, obf in obfuscated
        }
        session = OracleSession(list(zip(spec.families, keys)), budget=spec.p_run(k))
        aux = spec.aux(k, r) if spec.aux else ""
        ctx = GameContext(k, spec, session, coins.derive("adversary"), programs, aux,
                          tuple(len(q) for q in keys))
        try:
            session.charge(1)
            s = adversary.play(ctx)
            aborted = False
        except BudgetExceeded:
            s, aborted = "", True
    transcript = Transcript(tuple(session.records), s, session.steps, aborted)
    result = 0 if aborted else int(bool(spec.win(r, transcript.records, s)))
    return GameResult(result, transcript)


def run_blackbox(spec: Specification, adversary: Adversary, k: int, r: str, coins: RngStream) -> GameResult:
    return _execute(spec, adversary, k, r, coins, ())


def _claimed(spec: Specification, i: int) -> None:
    if not 1 <= i <= spec.n:
        raise IndexError(f"{spec.spec_id} has no oracle {i}")
    if i not in spec.obfuscatable_claims:
        raise NotObfuscatable(f"oracle {i} of {spec.spec_id} is not claimed obfuscatable")


def run_whitebox(spec: Specification, i: int, obfuscator: Obfuscator, adversary: Adversary,
                 k: int, r: str, coins: RngStream) -> GameResult:
    _claimed(spec, i)
    return _execute(spec, adversary, k, r, coins, ((i, obfuscator),))


def run_whitebox_pair(spec: Specification, i: int, j: int, obfuscator: Obfuscator, adversary: Adversary,
                      k: int, r: str, coins: RngStream) -> GameResult:
    if i == j:
        raise ValueError("pair white-box needs two distinct indices")
    _claimed(spec, i)
    _claimed(spec, j)
    return _execute(spec, adversary, k, r, coins, ((i, obfuscator), (j, obfuscator)))


@dataclass(frozen=True)
class Runner:
    """One of the three run modes bound to fixed (spec, adversary, obfuscator, indices)."""

    spec: Specification
    adversary: Adversary
    mode: str = BLACKBOX
    obfuscator: Obfuscator | None = None
    i: int | None = None
    j: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode != BLACKBOX and (self.obfuscator is None or self.i is None):
            raise ValueError("white-box modes need an obfuscator and an index")
        if self.mode == WHITEBOX_PAIR and self.j is None:
            raise ValueError("pair mode needs a second index")

    def __call__(self, k: int, r: str, coins: RngStream) -> GameResult:
        if self.mode == BLACKBOX:
            return run_blackbox(self.spec, self.adversary, k, r, coins)
        if self.mode == WHITEBOX:
            return run_whitebox(self.spec, self.i, self.obfuscator, self.adversary, k, r, coins)
        return run_whitebox_pair(self.spec, self.i, self.j, self.obfuscator, self.adversary, k, r, coins)


def trial_inputs(spec: Specification, k: int, seed: int, t: int) -> tuple[str, RngStream]:
    """``(r, coins)`` of trial ``t``."""
    stream = RngStream(seed, t)
    return stream.derive("r").bits(spec.p_in(k)), stream.derive("coins")


def estimate_advantage(runner: Runner, k: int, trials: int, seed: int) -> AdvantageEstimate:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    wins = 0
    for t in range(trials):
        r, coins = trial_inputs(runner.spec, k, seed, t)
        wins += runner(k, r, coins).result
    return AdvantageEstimate.from_counts(wins, trials)


# -- white-box gap ------------------------------------------------------------


def gap_seed(seed: int, adversary_id: str, mode: str) -> int:
    """Independent seeds for the black-box and white-box estimates of one adversary."""
    return derive_seed(seed, "gap", adversary_id, mode)


@dataclass(frozen=True)
class GapEntry:
    adversary_id: str
    blackbox: AdvantageEstimate
    whitebox: AdvantageEstimate

    @property
    def gap(self) -> float:
        return abs(self.whitebox.mean - self.blackbox.mean)


@dataclass(frozen=True)
class GapReport:
    """Zoo-relative white-box gap: the max is over the listed adversaries only."""

    spec_id: str
    obfuscator_id: str
    indices: tuple[int, ...]
    k: int
    entries: tuple[GapEntry, ...]
    threshold: float
    zoo_version: str = ""

    @property
    def per_adversary_gaps(self) -> dict[str, float]:
        return {e.adversary_id: e.gap for e in self.entries}

    @property
    def max_gap(self) -> float:
        return max(e.gap for e in self.entries)

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.threshold


def whitebox_gap(spec: Specification, i: int, obfuscator: Obfuscator, zoo: Sequence[Adversary], k: int,
                 trials: int, seed: int, threshold: float = 0.05, j: int | None = None,
                 blackbox_trials: int | None = None, zoo_version: str = "") -> GapReport:
    """``|Advwb_A - Adv_A|`` for every ``A`` in ``zoo`` and the max over the zoo.

    ``trials`` is the white-box trial count; ``blackbox_trials`` defaults to it.
    """
    if not zoo:
        raise ValueError("the adversary zoo is empty")
    mode = WHITEBOX if j is None else WHITEBOX_PAIR
    entries = []
    for adv in zoo:
        bb = estimate_advantage(Runner(spec, adv), k, blackbox_trials or trials,
                                gap_seed(seed, adv.adversary_id, BLACKBOX))
        wb = estimate_advantage(Runner(spec, adv, mode, obfuscator, i, j), k, trials,
                                gap_seed(seed, adv.adversary_id, mode))
        entries.append(GapEntry(adv.adversary_id, bb, wb))
    indices = (i,) if j is None else (i, j)
    return GapReport(spec.spec_id, obfuscator.obfuscator_id, indices, k, tuple(entries), threshold, zoo_version)


# -- obfuscatable check -------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    r: str
    transcript: Transcript


def collect_corpus(spec: Specification, adversaries: Sequence[Adversary], k: int, runs_per_adversary: int,
                   seed: int) -> list[CorpusEntry]:
    """Black-box transcripts from several adversaries, for :func:`check_obfuscatable`."""
    corpus = []
    for adv in adversaries:
        sub = derive_seed(seed, "corpus", adv.adversary_id)
        for t in range(runs_per_adversary):
            r, coins = trial_inputs(spec, k, sub, t)
            corpus.append(CorpusEntry(r, run_blackbox(spec, adv, k, r, coins).transcript))
    return corpus


def strip_oracle(records: Sequence[QueryRecord], i: int) -> tuple[QueryRecord, ...]:
    """``QuerySet_i``: the records whose oracle index differs from ``i``."""
    return tuple(rec for rec in records if rec.i != i)


def obfuscatable_counterexample(spec: Specification, i: int, corpus: Sequence[CorpusEntry]) -> CorpusEntry | None:
    if not corpus:
        raise EmptyCorpus("obfuscatability needs at least one transcript")
    for entry in corpus:
        recs, s = entry.transcript.records, entry.transcript.s
        if bool(spec.win(entry.r, recs, s)) != bool(spec.win(entry.r, strip_oracle(recs, i), s)):
            return entry
    return None


def check_obfuscatable(spec: Specification, i: int, corpus: Sequence[CorpusEntry]) -> bool:
    """True iff deleting oracle ``i``'s records never changes ``win`` on the corpus."""
    return obfuscatable_counterexample(spec, i, corpus) is None


def replay_transcript(spec: Specification, k: int, r: str, coins: RngStream,
                      transcript: Transcript) -> list[str]:
    """Re-ask every recorded query against freshly derived keys (same oracle coins)."""
    with bind_random_oracle(coins.derive("random-oracle")):
        keys = spec.key_derive(k, r)
        session = OracleSession(list(zip(spec.families, keys)))
        return [session.query(rec.i, rec.input) for rec in transcript.records]


# -- export -------------------------------------------------------------------

ADVANTAGE_COLUMNS = ("spec_id", "family_id", "obfuscator_id", "adversary_id", "mode", "k",
                     "trials", "wins", "mean", "ci_low", "ci_high")


def advantage_row(spec_id: str, family_id: str, obfuscator_id: str, adversary_id: str, mode: str, k: int,
                  est: AdvantageEstimate) -> list:
    return [spec_id, family_id, obfuscator_id, adversary_id, mode, k, est.trials, est.wins,
            f"{est.mean:.6f}", f"{est.ci_low:.6f}", f"{est.ci_high:.6f}"]


def gap_rows(report: GapReport, family_id: str) -> list[list]:
    mode = WHITEBOX if len(report.indices) == 1 else WHITEBOX_PAIR
    rows = []
    for e in report.entries:
        rows.append(advantage_row(report.spec_id, family_id, report.obfuscator_id, e.adversary_id,
                                  BLACKBOX, report.k, e.blackbox))
        rows.append(advantage_row(report.spec_id, family_id, report.obfuscator_id, e.adversary_id,
                                  mode, report.k, e.whitebox))
    return rows


def write_csv(rows: Sequence[Sequence], columns: Sequence[str] = ADVANTAGE_COLUMNS,
              preamble: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in preamble:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()
