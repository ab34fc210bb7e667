"""Keyed program families, executable program values and step-accounted evaluation.

A :class:`Family` is a keyed deterministic program ``Q``; ``Q^q`` is the
program with key ``q`` on its key tape.  A :class:`ProgramValue` is the
serialisable currency passed around by obfuscators, learners and adversaries:
either a ``Native`` reference to a registered family plus an embedded key, or
an explicit lookup ``Table``.

Step accounting is abstract.  Every evaluator reports how many units it used,
and an oracle query costs exactly one unit for the caller.
"""

from __future__ import annotations

import struct
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Union

from .bits import bits_to_bytes, bytes_to_bits, int_to_bits, is_bits
from .errors import (
    BudgetExceeded,
    WbcError,
    DomainTooLarge,
    InputLengthMismatch,
    KeyRejected,
    MalformedProgram,
    UnknownId,
    Unsamplable,
)
from .rng import RngStream

EXHAUSTIVE_CAP_BITS = 20
DEFAULT_BUDGET = 1 << 20

TAG_NATIVE = 0x01
TAG_TABLE = 0x02


@dataclass(frozen=True)
class Poly:
    """Polynomial with non-negative integer coefficients, lowest degree first."""

    coeffs: tuple[int, ...]

    def __call__(self, n: int) -> int:
        total = 0
        for c in reversed(self.coeffs):
            total = total * n + c
        return total

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def scale(self, c: int) -> "Poly":
        return Poly(tuple(c * x for x in self.coeffs))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else f"{c}n" if i == 1 else f"{c}n^{i}")
        return " + ".join(terms) or "0"


def const(c: int) -> Poly:
    return Poly((c,))


IDENTITY_POLY = Poly((0, 1))


@dataclass(frozen=True)
class Family:
    """A keyed deterministic program family.

    ``evaluator(key, input)`` returns ``(output, steps)``.  ``input_len`` maps
    the key length ``|q|`` to the input length (usually a :class:`Poly`);
    ``None`` marks a family whose inputs are variable-length encodings such as
    serialized programs.
    """

    family_id: str
    evaluator: Callable[[str, str], tuple[str, int]]
    key_sampler: Callable[[int, RngStream], str]
    key_membership: Callable[[str], bool]
    input_len: Callable[[int], int] | None
    step_bound: Callable[[int], int]
    output_len: Callable[[int], int] | None = None
    input_sampler: Callable[[int, RngStream], str] | None = None
    min_k: int = 1
    description: str = ""

    def input_len_for(self, key_len: int) -> int | None:
        return None if self.input_len is None else self.input_len(key_len)

    def output_len_for(self, key_len: int) -> int | None:
        return None if self.output_len is None else self.output_len(key_len)

    def sample_input(self, key_len: int, rng: RngStream) -> str:
        if self.input_sampler is not None:
            return self.input_sampler(key_len, rng)
        n = self.input_len_for(key_len)
        if n is None:
            raise Unsamplable(f"{self.family_id} has no input sampler")
        return rng.bits(n)


_FAMILIES: dict[str, Family] = {}


def register_family(family: Family) -> Family:
    """Make ``family`` resolvable from ``Native`` programs.  Re-registration replaces."""
    _FAMILIES[family.family_id] = family
    return family


def get_family(family_id: str) -> Family:
    try:
        return _FAMILIES[family_id]
    except KeyError:
        raise UnknownId("family", family_id) from None


def registered_families() -> list[str]:
    return sorted(_FAMILIES)


class EvalOutcome(NamedTuple):
    ok: bool
    output: str | None
    steps_used: int

    @property
    def status(self) -> str:
        return "Ok" if self.ok else "BudgetExceeded"


def run_family(family: Family, key: str, a: str) -> tuple[str, int]:
    if not family.key_membership(key):
        raise KeyRejected(f"key rejected by {family.family_id}")
    n = family.input_len_for(len(key))
    if n is not None and len(a) != n:
        raise InputLengthMismatch(f"{family.family_id} expects {n}-bit inputs, got {len(a)}")
    if not is_bits(a):
        raise InputLengthMismatch("input is not a bitstring")
    out, steps = family.evaluator(key, a)
    bound = family.step_bound(len(key))
    if steps > bound:
        raise RuntimeError(f"{family.family_id} used {steps} steps, declared bound {bound}")
    return out, steps


def eval_family(family: Family, key: str, a: str) -> str:
    """``Q^q(a)``."""
    return run_family(family, key, a)[0]


def sample_key(family: Family, k: int, rng: RngStream) -> str:
    if k < family.min_k:
        raise Unsamplable(f"{family.family_id} has no keys at k={k}")
    key = family.key_sampler(k, rng)
    if not family.key_membership(key):
        raise RuntimeError(f"{family.family_id} sampler produced an invalid key")
    return key


# -- program values -----------------------------------------------------------


@dataclass(frozen=True)
class Native:
    family_id: str
    key: str

    @property
    def declared_input_len(self) -> int | None:
        try:
            return get_family(self.family_id).input_len_for(len(self.key))
        except UnknownId:
            return None


@dataclass(frozen=True)
class Table:
    """Explicit input -> output map; absent inputs map to ``0^out_len``."""

    in_len: int
    out_len: int
    entries: tuple[tuple[str, str], ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.in_len < 1 or self.out_len < 0:
            raise MalformedProgram("table lengths out of range")
        entries = tuple(sorted(self.entries))
        for i, (a, b) in enumerate(entries):
            if len(a) != self.in_len or len(b) != self.out_len or not (is_bits(a) and is_bits(b)):
                raise MalformedProgram("table entry has the wrong shape")
            if i and entries[i - 1][0] == a:
                raise MalformedProgram("duplicate table input")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mapping(cls, in_len: int, out_len: int, mapping: dict[str, str], label: str = "") -> "Table":
        return cls(in_len, out_len, tuple(mapping.items()), label)

    @cached_property
    def _lookup(self) -> dict[str, str]:
        return dict(self.entries)

    @property
    def declared_input_len(self) -> int:
        return self.in_len

    def __call__(self, a: str) -> str:
        return self._lookup.get(a, "0" * self.out_len)


ProgramValue = Union[Native, Table]


def _u32(n: int) -> bytes:
    return struct.pack(">I", n)


def serialize_program(p: ProgramValue) -> bytes:
    """Canonical wire form: tag | u32 id length | id | u32 payload length | payload."""
    if isinstance(p, Native):
        tag, ident = TAG_NATIVE, p.family_id
        payload = _u32(len(p.key)) + bits_to_bytes(p.key)
    elif isinstance(p, Table):
        tag, ident = TAG_TABLE, p.label
        payload = _u32(p.in_len) + _u32(p.out_len) + b"".join(
            bits_to_bytes(a) + bits_to_bytes(b) for a, b in p.entries
        )
    else:
        raise TypeError(f"not a program value: {p!r}")
    ident_b = ident.encode()
    return bytes([tag]) + _u32(len(ident_b)) + ident_b + _u32(len(payload)) + payload


def _read_bits(data: bytes, nbits: int) -> str:
    bits = bytes_to_bits(data)
    if len(bits) - nbits >= 8 or len(bits) < nbits or bits[nbits:].strip("0"):
        raise MalformedProgram("non-canonical bit padding")
    return bits[:nbits]


def deserialize_program(data: bytes) -> ProgramValue:
    try:
        tag = data[0]
        (id_len,) = struct.unpack_from(">I", data, 1)
        ident = data[5:5 + id_len].decode()
        pos = 5 + id_len
        (pay_len,) = struct.unpack_from(">I", data, pos)
        payload = data[pos + 4:]
    except (IndexError, struct.error, UnicodeDecodeError) as exc:
        raise MalformedProgram(f"truncated program header: {exc}") from None
    if len(payload) != pay_len or len(ident.encode()) != id_len:
        raise MalformedProgram("payload length mismatch")
    if tag == TAG_NATIVE:
        if pay_len < 4:
            raise MalformedProgram("missing key length")
        (nbits,) = struct.unpack_from(">I", payload, 0)
        if len(payload) - 4 != (nbits + 7) // 8:
            raise MalformedProgram("key length mismatch")
        return Native(ident, _read_bits(payload[4:], nbits))
    if tag == TAG_TABLE:
        if pay_len < 8:
            raise MalformedProgram("missing table shape")
        in_len, out_len = struct.unpack_from(">II", payload, 0)
        ib, ob = (in_len + 7) // 8, (out_len + 7) // 8
        body = payload[8:]
        if in_len < 1 or len(body) % (ib + ob):
            raise MalformedProgram("table body is not a whole number of entries")
        entries = []
        for pos in range(0, len(body), ib + ob):
            a = _read_bits(body[pos:pos + ib], in_len)
            b = _read_bits(body[pos + ib:pos + ib + ob], out_len)
            if entries and entries[-1][0] >= a:
                raise MalformedProgram("table entries not strictly increasing")
            entries.append((a, b))
        return Table(in_len, out_len, tuple(entries), ident)
    raise MalformedProgram(f"unknown program tag {tag:#x}")


def program_to_bits(p: ProgramValue) -> str:
    return bytes_to_bits(serialize_program(p))


def program_from_bits(s: str) -> ProgramValue:
    if len(s) % 8 or not is_bits(s):
        raise MalformedProgram("program encoding is not a whole number of bytes")
    return deserialize_program(bits_to_bytes(s))


def program_size(p: ProgramValue) -> int:
    return len(serialize_program(p))


def eval_program(program: ProgramValue, a: str, budget: int) -> EvalOutcome:
    """Run ``program`` on ``a`` for at most ``budget`` steps."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    if isinstance(program, Table):
        if program.in_len != len(a) or not is_bits(a):
            raise InputLengthMismatch(f"table expects {program.in_len}-bit inputs")
        return EvalOutcome(True, program(a), 1)
    if not isinstance(program, Native):
        raise MalformedProgram(f"not a program value: {program!r}")
    try:
        family = get_family(program.family_id)
    except UnknownId as exc:
        raise MalformedProgram(str(exc)) from None
    try:
        out, steps = run_family(family, program.key, a)
    except KeyRejected as exc:
        raise MalformedProgram(str(exc)) from None
    if steps > budget:
        return EvalOutcome(False, None, budget)
    return EvalOutcome(True, out, steps)


# -- equality -----------------------------------------------------------------


@dataclass(frozen=True)
class Exhaustive:
    def __str__(self) -> str:
        return "Exhaustive"


@dataclass(frozen=True)
class Sampled:
    n: int

    def __str__(self) -> str:
        return f"Sampled({self.n})"


Basis = Union[Exhaustive, Sampled]


@dataclass(frozen=True)
class EqualityVerdict:
    equal: bool
    basis: Basis
    counterexample: str | None = None

    @property
    def authoritative(self) -> bool:
        return isinstance(self.basis, Exhaustive)


def _agree(p1, p2, a, budget) -> bool:
    try:
        ref = eval_program(p2, a, DEFAULT_BUDGET)
        b = budget(ref.steps_used) if callable(budget) else budget
        got = eval_program(p1, a, b)
    except WbcError:
        return False
    return got.ok and ref.ok and got.output == ref.output


def exact_equal(
    p1: ProgramValue,
    p2: ProgramValue,
    input_len: int,
    mode: Basis = Exhaustive(),
    rng: RngStream | None = None,
    budget: int | Callable[[int], int] = DEFAULT_BUDGET,
    sampler: Callable[[RngStream], str] | None = None,
) -> EqualityVerdict:
    """Decide ``p1 = p2`` on ``input_len``-bit inputs.

    ``p2`` is the reference.  A callable ``budget`` receives the reference's
    step count and returns the budget for ``p1`` (used to enforce learner
    slowdown bounds).  ``Sampled`` verdicts only mean no disagreement was found.
    """
    if isinstance(mode, Exhaustive):
        if input_len > EXHAUSTIVE_CAP_BITS:
            raise DomainTooLarge(f"2^{input_len} inputs exceeds the exhaustive cap 2^{EXHAUSTIVE_CAP_BITS}")
        for v in range(1 << input_len):
            a = int_to_bits(v, input_len)
            if not _agree(p1, p2, a, budget):
                return EqualityVerdict(False, mode, a)
        return EqualityVerdict(True, mode)
    if rng is None:
        raise ValueError("sampled equality needs an rng")
    for _ in range(mode.n):
        a = sampler(rng) if sampler else rng.bits(input_len)
        if not _agree(p1, p2, a, budget):
            return EqualityVerdict(False, mode, a)
    return EqualityVerdict(True, mode)


# -- oracle access ------------------------------------------------------------


class QueryRecord(NamedTuple):
    t: int
    i: int
    input: str
    output: str


@dataclass
class OracleSession:
    """Budgeted, recorded access to ``n`` stateless oracles ``Q_i^{q_i}`` (1-based).

    Every query costs one step; ``charge`` bills local computation.  Inputs of
    the wrong shape (or that the family rejects) are answered with the empty
    string.
    """

    oracles: Sequence[tuple[Family, str]]
    budget: int | None = None
    records: list[QueryRecord] = field(default_factory=list)
    steps: int = 0

    def __post_init__(self):
        self._table = []
        for family, key in self.oracles:
            if not family.key_membership(key):
                raise KeyRejected(f"key rejected by {family.family_id}")
            self._table.append((family.evaluator, family.input_len_for(len(key)), key))

    @property
    def n(self) -> int:
        return len(self._table)

    def charge(self, units: int = 1) -> None:
        if self.budget is not None and self.steps + units > self.budget:
            self.steps = self.budget
            raise BudgetExceeded(f"run-time budget of {self.budget} steps exhausted")
        self.steps += units

    def query(self, i: int, a: str) -> str:
        if not 1 <= i <= len(self._table):
            raise IndexError(f"no oracle {i}")
        # hot path: charge() inlined
        if self.budget is not None and self.steps >= self.budget:
            raise BudgetExceeded(f"run-time budget of {self.budget} steps exhausted")
        self.steps += 1
        evaluator, n, key = self._table[i - 1]
        if (n is not None and len(a) != n) or a.strip("01"):
            out = ""
        else:
            try:
                out = evaluator(key, a)[0]
            except WbcError:
                out = ""
        records = self.records
        records.append(QueryRecord(len(records) + 1, i, a, out))
        return out

    def count(self, i: int) -> int:
        return sum(1 for r in self.records if r.i == i)

    def run_program(self, program: ProgramValue, a: str, budget: int = DEFAULT_BUDGET) -> EvalOutcome:
        """Evaluate ``program`` locally, billing its steps to this session."""
        outcome = eval_program(program, a, budget)
        self.charge(outcome.steps_used)
        return outcome
