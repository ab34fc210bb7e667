"""The registered zoo of adversaries, learners, simulators and distinguishers.

The zoo is the finite stand-in for "every efficient adversary": gap and
learnability verdicts are only ever claims about the entries listed here,
and reports name :data:`ZOO_VERSION` so the scope stays explicit.

White-box adversaries always degrade to guessing when they get no program
(or a program they cannot use); they never raise.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

from .bits import int_to_bits, zeros
from .core import DEFAULT_BUDGET, Native, Poly, ProgramValue, Table, eval_program, sample_key
from .errors import KeyRejected, InvalidElement, LengthMismatch, UnknownId, WbcError
from .games import GameContext
from .learnability import LearnContext, Learner
from .obfuscation import SoundnessContext
from .schemes import EncKey, decrypt, split_ciphertext

ZOO_VERSION = "zoo-1"
TABLE_LEARNER_MAX_BITS = 12


# -- game adversaries ---------------------------------------------------------


@dataclass(frozen=True)
class GuessAdversary:
    """Outputs uniform bits and makes no queries."""

    output_len: int | None = None
    adversary_id: str = "guess"

    def play(self, ctx: GameContext) -> str:
        return ctx.rng.bits(self.output_len if self.output_len is not None else ctx.output_len)


@dataclass(frozen=True)
class ForwardingAdversary:
    """Hands each received program to the oracle that validates it, once.

    The validators' answers are concatenated in oracle order; shares it has
    no program for are guessed.
    """

    adversary_id: str = "forwarding"

    def play(self, ctx: GameContext) -> str:
        validators = sorted(ctx.spec.validators.items())
        if not validators:
            return ctx.rng.bits(ctx.output_len)
        share_len = ctx.output_len // len(validators)
        shares = []
        for i, v in validators:
            program = ctx.programs.get(i)
            shares.append(ctx.query_program(v, program) if program is not None else ctx.rng.bits(share_len))
        return "".join(shares)


def _challenge_index(ctx: GameContext) -> int | None:
    try:
        return ctx.spec.index_of("C")
    except KeyError:
        return None


@dataclass(frozen=True)
class KeyExtractionAdversary:
    """Reads the encryption key out of a ``Native(expected_family, key)`` program,
    asks the challenge oracle for ``(0^l, 1^l)`` and decrypts the answer."""

    expected_family: str = "E"
    adversary_id: str = "key-extraction"

    def play(self, ctx: GameContext) -> str:
        c_index = _challenge_index(ctx)
        key = self._extract(ctx)
        if key is None or c_index is None:
            return ctx.rng.bits(ctx.output_len)
        l = key.ctx.l
        m0, m1 = zeros(l), "1" * l
        ct = ctx.query(c_index, m0 + m1)
        try:
            m = decrypt(key, *split_ciphertext(key.ctx, ct))
        except (InvalidElement, LengthMismatch):
            return ctx.rng.bit()
        return "0" if m == m0 else "1"

    def _extract(self, ctx: GameContext) -> EncKey | None:
        for program in ctx.programs.values():
            if isinstance(program, Native) and program.family_id == self.expected_family:
                try:
                    return EncKey.from_bits(program.key)
                except (KeyRejected, InvalidElement):
                    return None
        return None


@dataclass(frozen=True)
class EqualityTesterAdversary:
    """Checks each received program against its oracle on ``n_probes`` inputs,
    then guesses; functional equality alone says nothing about ``b``."""

    n_probes: int = 20
    adversary_id: str = "equality-tester"

    def play(self, ctx: GameContext) -> str:
        for i, program in sorted(ctx.programs.items()):
            for _ in range(self.n_probes):
                a = ctx.sample_input(i)
                if not _agrees(ctx.run_program, program, a, ctx.query(i, a)):
                    break
        return ctx.rng.bits(ctx.output_len)


def _agrees(run, program, a, expected) -> bool:
    try:
        out = run(program, a)
    except WbcError:
        return False
    return out.ok and out.output == expected


@dataclass(frozen=True)
class EncryptionHeavyProbe:
    """Hammers oracle 1 with ``n`` queries, asks one challenge, then guesses."""

    n: int = 50
    adversary_id: str = "e-heavy-probe"

    def play(self, ctx: GameContext) -> str:
        for _ in range(self.n):
            ctx.query(1, ctx.sample_input(1))
        c_index = _challenge_index(ctx)
        if c_index is not None:
            ctx.query(c_index, ctx.rng.bits(ctx.input_len(c_index)))
        return ctx.rng.bits(ctx.output_len)


@dataclass(frozen=True)
class DecryptChallengeProbe:
    """Asks the challenge, then decrypts it with D: always right about ``b``,
    always disqualified.  Deleting D's records turns its loss into a win."""

    adversary_id: str = "decrypt-challenge"

    def play(self, ctx: GameContext) -> str:
        c_index = _challenge_index(ctx)
        try:
            d_index = ctx.spec.index_of("D")
        except KeyError:
            d_index = None
        if c_index is None or d_index is None:
            return ctx.rng.bits(ctx.output_len)
        l = ctx.input_len(c_index) // 2
        m0 = zeros(l)
        ct = ctx.query(c_index, m0 + "1" * l)
        return "0" if ctx.query(d_index, ct) == m0 else "1"


@dataclass(frozen=True)
class RoProbingDistinguisher:
    """Queries up to ``query_budget`` inputs hoping for a 1-output, then guesses.

    With no random-oracle handle a hit does not say which of ``q0, q1`` is
    behind the oracle, so the final bit is a coin flip either way.  When the
    budget covers the whole input space the inputs are enumerated in order.
    """

    query_budget: int = 1000
    adversary_id: str = "ro-probing"

    def play(self, ctx: GameContext) -> str:
        n = ctx.input_len(1)
        if self.query_budget >= 1 << n:
            probes = (int_to_bits(v, n) for v in range(1 << n))
        else:
            probes = (ctx.rng.bits(n) for _ in range(self.query_budget))
        for a in probes:
            if ctx.query(1, a) == "1":
                break
        return ctx.rng.bit()


# -- soundness-game roles -----------------------------------------------------


@dataclass(frozen=True)
class EqualityTesterDistinguisher:
    """Accepts iff the candidate agrees with the oracle on ``n_probes`` random inputs."""

    n_probes: int = 20
    adversary_id: str = "equality-tester"

    def distinguish(self, ctx: SoundnessContext) -> bool:
        for _ in range(self.n_probes):
            a = ctx.sample_input()
            if not _agrees(lambda p, x: eval_program(p, x, DEFAULT_BUDGET), ctx.program, a, ctx.query(a)):
                return False
        return True


@dataclass(frozen=True)
class ConstantDistinguisher:
    accept: bool = True
    adversary_id: str = "constant"

    def distinguish(self, ctx: SoundnessContext) -> bool:
        return self.accept


@dataclass(frozen=True)
class JunkProgramSimulator:
    """Emits the all-zero table of the right shape."""

    adversary_id: str = "junk-program"

    def simulate(self, ctx: SoundnessContext) -> ProgramValue:
        n = ctx.input_len
        out = ctx.family.output_len_for(ctx.key_len)
        if out is None:
            out = len(ctx.query(ctx.sample_input()))
        return Table(n, out, (), "junk")


@dataclass(frozen=True)
class FreshKeySimulator:
    """Replays the identity obfuscator on an independently sampled key."""

    adversary_id: str = "fresh-key"

    def simulate(self, ctx: SoundnessContext) -> ProgramValue:
        return Native(ctx.family.family_id, sample_key(ctx.family, ctx.k, ctx.rng))


@dataclass(frozen=True)
class ParseKeyGuesser:
    """Applies the predicate to the key inside a ``Native`` program; guesses otherwise."""

    predicate: Callable[[str], str]
    adversary_id: str = "parse-key"

    def guess(self, ctx: SoundnessContext) -> str:
        p = ctx.program
        if isinstance(p, Native) and p.family_id == ctx.family.family_id:
            return self.predicate(p.key)
        return ctx.rng.bit()


@dataclass(frozen=True)
class RandomGuesser:
    adversary_id: str = "random-guess"

    def guess(self, ctx: SoundnessContext) -> str:
        return ctx.rng.bit()


def first_bit(key: str) -> str:
    return key[0]


def parity(key: str) -> str:
    return str(key.count("1") % 2)


PREDICATES: dict[str, Callable[[str], str]] = {"first-bit": first_bit, "parity": parity}


# -- learners -----------------------------------------------------------------


def _out_len(ctx: LearnContext) -> int:
    n = ctx.output_len
    return n if n is not None else len(ctx.query(zeros(ctx.input_len)))


def _constant_zero(ctx: LearnContext) -> ProgramValue:
    return Table(ctx.input_len, _out_len(ctx), (), "zero")


def _identity_table(ctx: LearnContext) -> ProgramValue:
    n = ctx.input_len
    if n <= TABLE_LEARNER_MAX_BITS:
        return Table(n, n, tuple((int_to_bits(v, n),) * 2 for v in range(1 << n)), "identity")
    return Native("identity", zeros(n))


def _exhaustive_table(ctx: LearnContext) -> ProgramValue:
    n = ctx.input_len
    budget = ctx.query_budget
    if n > TABLE_LEARNER_MAX_BITS or (budget is not None and budget < 1 << n):
        return _constant_zero(ctx)
    entries, out_len = [], None
    for v in range(1 << n):
        a = int_to_bits(v, n)
        out = ctx.query(a)
        out_len = len(out)
        if out.strip("0"):
            entries.append((a, out))
    return Table(n, out_len, tuple(entries), "tabulated")


TABLE_SIZE = Poly((1024, 0, 0, 16))


def constant_zero_learner() -> Learner:
    return Learner("constant-zero", _constant_zero, query_budget=1, output_size_poly=Poly((256, 1)),
                   description="the all-zero table; no queries beyond learning the output length")


def identity_table_learner() -> Learner:
    return Learner("identity-table", _identity_table, query_budget=0, output_size_poly=TABLE_SIZE,
                   description="the identity map as a table (or Native identity beyond 2^12 inputs)")


def exhaustive_table_learner(query_budget: int = 1 << TABLE_LEARNER_MAX_BITS) -> Learner:
    return Learner("exhaustive-table", _exhaustive_table, query_budget=query_budget, output_size_poly=TABLE_SIZE,
                   description="queries every input (up to 2^12) and tabulates the answers")


def learners() -> list[Learner]:
    return [constant_zero_learner(), identity_table_learner(), exhaustive_table_learner()]


# -- registry -----------------------------------------------------------------

ADVERSARY = "Adversary"
LEARNER = "Learner"
SIMULATOR = "Simulator"
DISTINGUISHER = "Distinguisher"
PREDICATE_GUESSER = "PredicateGuesser"


@dataclass(frozen=True)
class ZooEntry:
    id: str
    kind: str
    factory: Callable[[], object] = field(repr=False, compare=False)
    compatible_specs: tuple[str, ...] = ()
    description: str = ""
    query_budget: int | None = None

    def build(self):
        return self.factory()

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "compatible_specs": list(self.compatible_specs),
                "description": self.description, "query_budget": self.query_budget}


_ALL_SPECS = ("ind-cpa", "ind-cca2", "find-q", "find-q-pair", "ro-distinguish")
_ENC_SPECS = ("ind-cpa", "ind-cca2")

_ZOO: tuple[ZooEntry, ...] = (
    ZooEntry("guess", ADVERSARY, GuessAdversary, _ALL_SPECS, "uniform output, no queries", 0),
    ZooEntry("forwarding", ADVERSARY, ForwardingAdversary, ("find-q", "find-q-pair"),
             "submits each received program to its validator once", 2),
    ZooEntry("key-extraction", ADVERSARY, KeyExtractionAdversary, _ENC_SPECS,
             "parses Native(E, key) and decrypts the challenge", 1),
    ZooEntry("equality-tester", ADVERSARY, EqualityTesterAdversary, _ALL_SPECS,
             "probes received programs against their oracles, then guesses", 40),
    ZooEntry("e-heavy-probe", ADVERSARY, EncryptionHeavyProbe, _ENC_SPECS,
             "50 encryption queries, one challenge, then a guess", 51),
    ZooEntry("decrypt-challenge", ADVERSARY, DecryptChallengeProbe, ("ind-cca2",),
             "decrypts the challenge with D (disqualified by the win rule)", 2),
    ZooEntry("ro-probing", ADVERSARY, RoProbingDistinguisher, ("ro-distinguish",),
             "random probes of Q^{q_b} looking for a 1-output", 1000),
    ZooEntry("equality-tester-distinguisher", DISTINGUISHER, EqualityTesterDistinguisher, (),
             "accepts a candidate program iff it matches the oracle on 20 inputs", 20),
    ZooEntry("junk-program", SIMULATOR, JunkProgramSimulator, (), "all-zero table of the right shape", 1),
    ZooEntry("fresh-key", SIMULATOR, FreshKeySimulator, (), "Native program under a fresh key", 0),
    ZooEntry("parse-key", PREDICATE_GUESSER, lambda: ParseKeyGuesser(first_bit), (),
             "reads the first key bit from a Native program", 0),
    ZooEntry("random-guess", PREDICATE_GUESSER, RandomGuesser, (), "uniform bit", 0),
    ZooEntry("constant-zero", LEARNER, constant_zero_learner, (), "all-zero table", 1),
    ZooEntry("identity-table", LEARNER, identity_table_learner, (), "identity table", 0),
    ZooEntry("exhaustive-table", LEARNER, exhaustive_table_learner, (), "full tabulation up to 2^12 inputs",
             1 << TABLE_LEARNER_MAX_BITS),
)


def zoo_registry() -> list[ZooEntry]:
    return list(_ZOO)


def get_entry(entry_id: str, kind: str | None = None) -> ZooEntry:
    for entry in _ZOO:
        if entry.id == entry_id and (kind is None or entry.kind == kind):
            return entry
    raise UnknownId("zoo", entry_id)


def get_adversary(adversary_id: str):
    return get_entry(adversary_id, ADVERSARY).build()


def get_learner(learner_id: str) -> Learner:
    return get_entry(learner_id, LEARNER).build()
