"""Obfuscators, their correctness checkers and instance-level soundness games.

Correctness is measured, never assumed: :func:`check_correctness` compares an
obfuscated program against the original family on sampled ``(q, a)`` pairs
and records size and slowdown ratios against the obfuscator's declared
polynomials.  Probabilistic families get the same treatment with outputs
compared up to the key-randomness equivalence (:func:`check_tau_correctness`).

The soundness estimators measure one fixed (adversary, simulator, predicate,
aux) instance.  They are witnesses, not verdicts over all adversaries.
"""

from __future__ import annotations

import hashlib
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Protocol

from .bits import bits_to_bytes, bits_to_int, int_to_bits, pack_fields, unpack_fields
from .core import (
    DEFAULT_BUDGET,
    Family,
    Native,
    OracleSession,
    Poly,
    ProgramValue,
    Table,
    eval_program,
    get_family,
    program_size,
    register_family,
    run_family,
    sample_key,
)
from .errors import BudgetExceeded, DomainTooLarge, InputLengthMismatch, MalformedProgram, UnknownId
from .oracle import bind_random_oracle
from .rng import RngStream
from .stats import AdvantageEstimate

TABLE_OBFUSCATOR_MAX_BITS = 12


@dataclass(frozen=True)
class Obfuscator:
    obfuscator_id: str
    transform: Callable[[Family, str, RngStream], ProgramValue]
    size_poly: Poly
    slowdown_poly: Poly
    description: str = ""


def obfuscate(obf: Obfuscator, family: Family, key: str, rng: RngStream) -> ProgramValue:
    return obf.transform(family, key, rng)


def identity_obfuscator() -> Obfuscator:
    """Outputs a plain description of ``Q^q``: the key travels in the clear."""
    return Obfuscator(
        "identity",
        lambda family, key, rng: Native(family.family_id, key),
        size_poly=Poly((64, 1)),
        slowdown_poly=Poly((0, 1)),
        description="Native(Q, q); exact functionality by construction",
    )


def table_obfuscator() -> Obfuscator:
    def transform(family: Family, key: str, rng: RngStream) -> Table:
        n = family.input_len_for(len(key))
        if n is None or n > TABLE_OBFUSCATOR_MAX_BITS:
            raise DomainTooLarge(f"table obfuscation needs at most 2^{TABLE_OBFUSCATOR_MAX_BITS} inputs")
        entries = {}
        for v in range(1 << n):
            a = int_to_bits(v, n)
            entries[a] = run_family(family, key, a)[0]
        out_len = len(next(iter(entries.values())))
        return Table.from_mapping(n, out_len, entries, label=f"table[{family.family_id}]")

    return Obfuscator(
        "table",
        transform,
        size_poly=Poly((1024, 0, 0, 16)),
        slowdown_poly=Poly((0, 1)),
        description="exhaustive tabulation for input spaces up to 2^12",
    )


# A deliberately lossy wrapper: flips the first output bit on a pseudo-random
# fraction eps of inputs.  Used as a broken-obfuscator fixture.

FAULTY_ID = "faulty"
_EPS_BITS = 32


def _fault_point(seed: str, a: str) -> float:
    h = hashlib.blake2b(bits_to_bytes(seed) + b"|" + bits_to_bytes(a) + len(a).to_bytes(4, "big"),
                        digest_size=8, person=b"wbc-faulty")
    return int.from_bytes(h.digest(), "big") / 2.0**64


def _faulty_parse(key: str) -> tuple[Family, str, str, float]:
    fid, inner_key, seed, eps = unpack_fields(key, 4)
    return get_family(bytes(bits_to_bytes(fid)).decode()), inner_key, seed, bits_to_int(eps) / 2.0**_EPS_BITS


def _faulty_eval(key: str, a: str) -> tuple[str, int]:
    inner, inner_key, seed, eps = _faulty_parse(key)
    out, steps = run_family(inner, inner_key, a)
    if out and _fault_point(seed, a) < eps:
        out = ("1" if out[0] == "0" else "0") + out[1:]
    return out, steps + 1


def _faulty_member(key: str) -> bool:
    try:
        inner, inner_key, seed, eps = _faulty_parse(key)
    except (ValueError, UnknownId, UnicodeDecodeError):
        return False
    return len(seed) == 64 and inner.key_membership(inner_key)


FAULTY_FAMILY = register_family(Family(
    FAULTY_ID,
    evaluator=_faulty_eval,
    key_sampler=lambda k, rng: (_ for _ in ()).throw(NotImplementedError("faulty keys come from the obfuscator")),
    key_membership=_faulty_member,
    input_len=None,
    step_bound=Poly((1, 1, 1)),
    description="wraps another family and flips the first output bit on a fraction eps of inputs",
))


def faulty_obfuscator(eps: float) -> Obfuscator:
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    eps_fixed = min(int(round(eps * 2**_EPS_BITS)), 2**_EPS_BITS - 1)

    def transform(family: Family, key: str, rng: RngStream) -> Native:
        fid = "".join(format(b, "08b") for b in family.family_id.encode())
        return Native(FAULTY_ID, pack_fields(fid, key, rng.bits(64), int_to_bits(eps_fixed, _EPS_BITS)))

    return Obfuscator(
        f"faulty-{eps:g}",
        transform,
        size_poly=Poly((256, 1)),
        slowdown_poly=Poly((1, 1)),
        description=f"correct except on a pseudo-random {eps:g} fraction of inputs",
    )


# -- correctness --------------------------------------------------------------


@dataclass(frozen=True)
class CorrectnessReport:
    obfuscator_id: str
    family_id: str
    k: int
    samples: int
    failures: int
    max_size_ratio: float
    max_slowdown_ratio: float
    threshold: float = 0.0
    tau: bool = False

    @property
    def failure_rate(self) -> float:
        return self.failures / self.samples

    @property
    def passed(self) -> bool:
        return (self.failure_rate <= self.threshold
                and self.max_size_ratio <= 1 and self.max_slowdown_ratio <= 1)

    def to_dict(self) -> dict:
        return {
            "obfuscator_id": self.obfuscator_id,
            "family_id": self.family_id,
            "k": self.k,
            "samples": self.samples,
            "failures": self.failures,
            "max_size_ratio": self.max_size_ratio,
            "max_slowdown_ratio": self.max_slowdown_ratio,
            "pass": self.passed,
        }


def _check(obf, family, k, samples, rng, draw_key, compare, inputs_per_key, threshold, tau):
    if samples < 1:
        raise ValueError("samples must be >= 1")
    key_rng, obf_rng, in_rng = rng.derive("keys"), rng.derive("obfuscator"), rng.derive("inputs")
    failures = 0
    max_size = max_slow = 0.0
    key = program = ctx = None
    for j in range(samples):
        with bind_random_oracle(rng.derive(("oracle", j // inputs_per_key))):
            if j % inputs_per_key == 0:
                key, ctx = draw_key(key_rng)
                program = obfuscate(obf, family, key, obf_rng)
                max_size = max(max_size, program_size(program) / obf.size_poly(len(key)))
            a = family.sample_input(len(key), in_rng)
            ref, t = run_family(family, key, a)
            try:
                got = eval_program(program, a, DEFAULT_BUDGET)
            except (MalformedProgram, InputLengthMismatch):
                failures += 1
                continue
            max_slow = max(max_slow, got.steps_used / obf.slowdown_poly(t))
            if not got.ok or not compare(ctx, key, a, got.output, ref):
                failures += 1
    return CorrectnessReport(obf.obfuscator_id, family.family_id, k, samples, failures,
                             max_size, max_slow, threshold, tau)


def check_correctness(
    obf: Obfuscator,
    family: Family,
    k: int,
    samples: int,
    rng: RngStream,
    inputs_per_key: int = 1,
    threshold: float = 0.0,
) -> CorrectnessReport:
    """Strict functionality: ``O(Q,q)(a) == Q^q(a)`` on sampled ``(q, a)``."""
    return _check(obf, family, k, samples, rng,
                  draw_key=lambda r: (sample_key(family, k, r), None),
                  compare=lambda ctx, key, a, got, ref: got == ref,
                  inputs_per_key=inputs_per_key, threshold=threshold, tau=False)


# -- probabilistic families ---------------------------------------------------


@dataclass(frozen=True)
class TauRelation:
    """Keys are equivalent iff they agree outside their randomness bits."""

    family_id: str
    canonical_part: Callable[[str], str]

    def __call__(self, q1: str, q2: str) -> bool:
        return self.canonical_part(q1) == self.canonical_part(q2)


@dataclass(frozen=True)
class TauDecider:
    """``builder(r) -> (q, Z)`` with ``Z(a || z) = 1`` iff ``z`` is tau-equal to ``Q^q(a)``."""

    family_id: str
    r_len: Poly
    builder: Callable[[str], tuple[str, ProgramValue]]
    size_poly: Poly

    def build(self, r: str) -> tuple[str, ProgramValue]:
        return self.builder(r)


def tau_equal_output(decider_program: ProgramValue, a: str, z: str) -> bool:
    out = eval_program(decider_program, a + z, DEFAULT_BUDGET)
    return out.ok and out.output == "1"


def check_tau_correctness(
    obf: Obfuscator,
    family: Family,
    decider: TauDecider,
    k: int,
    samples: int,
    rng: RngStream,
    inputs_per_key: int = 1,
    threshold: float = 0.0,
) -> CorrectnessReport:
    """Functionality up to tau: outputs are compared by the decider program ``Z``."""

    def draw_key(r: RngStream):
        q, z_prog = decider.build(r.bits(decider.r_len(k)))
        if program_size(z_prog) > decider.size_poly(k):
            raise RuntimeError("decider program exceeds its declared size bound")
        return q, z_prog

    return _check(obf, family, k, samples, rng, draw_key=draw_key,
                  compare=lambda z_prog, key, a, got, ref: tau_equal_output(z_prog, a, got),
                  inputs_per_key=inputs_per_key, threshold=threshold, tau=True)


# -- soundness games ----------------------------------------------------------


class SoundnessContext:
    """What an adversary, simulator or distinguisher sees in a soundness game."""

    def __init__(self, k: int, family: Family, key: str, program: ProgramValue | None,
                 aux: str, rng: RngStream, query_budget: int):
        self.k = k
        self.family = family
        self.key_len = len(key)
        self.program = program
        self.aux = aux
        self.rng = rng
        self.session = OracleSession([(family, key)], budget=query_budget)

    @property
    def input_len(self) -> int | None:
        return self.family.input_len_for(self.key_len)

    def query(self, a: str) -> str:
        return self.session.query(1, a)

    def sample_input(self) -> str:
        return self.family.sample_input(self.key_len, self.rng)


class PredicateGuesser(Protocol):
    adversary_id: str

    def guess(self, ctx: SoundnessContext) -> str: ...


class Distinguisher(Protocol):
    adversary_id: str

    def distinguish(self, ctx: SoundnessContext) -> bool: ...


class Simulator(Protocol):
    adversary_id: str

    def simulate(self, ctx: SoundnessContext) -> ProgramValue: ...


@dataclass(frozen=True)
class SoundnessGap:
    real: AdvantageEstimate
    simulated: AdvantageEstimate
    aborted: int

    @property
    def gap(self) -> float:
        return abs(self.real.mean - self.simulated.mean)


def _soundness_trials(obf, family, k, trials, seed, play_real, play_sim, query_budget):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    real = sim = aborted = 0
    for t in range(trials):
        trial = RngStream(seed, t)
        with bind_random_oracle(trial.derive("oracle")):
            key = sample_key(family, k, trial.derive("key"))
            program = obfuscate(obf, family, key, trial.derive("obfuscator"))
            for which, play in (("real", play_real), ("sim", play_sim)):
                try:
                    won = play(key, program, trial.derive(which), query_budget)
                except BudgetExceeded:
                    aborted += 1
                    won = False
                if won and which == "real":
                    real += 1
                elif won:
                    sim += 1
    return SoundnessGap(AdvantageEstimate.from_counts(real, trials),
                        AdvantageEstimate.from_counts(sim, trials), aborted)


def estimate_pvbbp_gap(
    obf: Obfuscator,
    family: Family,
    adversary: PredicateGuesser,
    simulator: PredicateGuesser,
    predicate: Callable[[str], str],
    aux: str,
    k: int,
    trials: int,
    seed: int,
    query_budget: int = 4096,
) -> SoundnessGap:
    """``|Pr[A(O(Q,q), z) = pi(q)] - Pr[S(z) = pi(q)]|`` for one fixed instance."""

    def play_real(key, program, rng, budget):
        ctx = SoundnessContext(k, family, key, program, aux, rng, budget)
        return adversary.guess(ctx) == predicate(key)

    def play_sim(key, program, rng, budget):
        ctx = SoundnessContext(k, family, key, None, aux, rng, budget)
        return simulator.guess(ctx) == predicate(key)

    return _soundness_trials(obf, family, k, trials, seed, play_real, play_sim, query_budget)


def estimate_pvbbp_max(
    obf: Obfuscator,
    family: Family,
    adversary: PredicateGuesser,
    simulator: PredicateGuesser,
    predicates: dict[str, Callable[[str], str]],
    auxes: Sequence[str],
    k: int,
    trials: int,
    seed: int,
) -> tuple[float, dict[tuple[str, str], SoundnessGap]]:
    """Max of the instance gap over a finite list of predicates and aux strings."""
    gaps = {
        (name, z): estimate_pvbbp_gap(obf, family, adversary, simulator, pi, z, k, trials, seed)
        for name, pi in predicates.items()
        for z in auxes
    }
    return max(g.gap for g in gaps.values()), gaps


def estimate_ind_gap(
    obf: Obfuscator,
    family: Family,
    distinguisher: Distinguisher,
    simulator: Simulator,
    aux: str,
    k: int,
    trials: int,
    seed: int,
    query_budget: int = 4096,
) -> SoundnessGap:
    """Acceptance of ``A`` on ``O(Q,q)`` versus on the simulator's output."""

    def play_real(key, program, rng, budget):
        return distinguisher.distinguish(SoundnessContext(k, family, key, program, aux, rng, budget))

    def play_sim(key, program, rng, budget):
        fake = simulator.simulate(SoundnessContext(k, family, key, None, aux, rng.derive("S"), budget))
        return distinguisher.distinguish(SoundnessContext(k, family, key, fake, aux, rng.derive("A"), budget))

    return _soundness_trials(obf, family, k, trials, seed, play_real, play_sim, query_budget)
