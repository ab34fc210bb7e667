"""Concrete families: a generic-group pairing scheme, its public-key
obfuscation, the random-oracle point family and the find-q' gadget.

Group elements are exponents modulo a prime ``w`` relative to fixed base
generators ``g0`` of G1 and ``h0 = e(g0, g0)`` of G2.  The engine knows every
discrete log; adversaries only ever see the 72-bit encodings.

Key and input layouts (all bitstrings):

* ``EncKey``: length-prefixed ``<pairing id, G1 id, G2 id, w, g, H id, x>``;
  ``ObfKey`` is the same with ``y`` (a G2 element) in place of ``x``.
* E / F input: ``m || alpha`` with ``|m| = l`` and ``|alpha| = |w|`` bits;
  output ``c1 || enc(c2)``.
* D input: ``c1 || enc(c2)``; output ``m``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

from .bits import (
    bits_to_int,
    bits_to_bytes,
    int_to_bits,
    pack_fields,
    unpack_fields,
    xor_bits,
    zeros,
)
from .core import (
    Family,
    Native,
    Poly,
    ProgramValue,
    const,
    eval_program,
    program_from_bits,
    register_family,
    run_family,
)
from .errors import InvalidElement, KeyRejected, LengthMismatch, MalformedProgram, WbcError
from .obfuscation import Obfuscator, TauDecider, TauRelation
from .oracle import current_random_oracle
from .rng import RngStream, derive_seed

TAG_G1 = 0x11
TAG_G2 = 0x12
ELEMENT_BITS = 72

PAIRING_ID = "generic-symmetric"
HASH_ID = "blake2b-H"
_H_KEY = b"wbc-arena-H"


# -- primes -------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with fixed bases; deterministic below 3.3 * 10^24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def largest_prime_bits(k: int) -> int:
    """Largest prime with exactly ``k`` bits."""
    if k < 2:
        raise ValueError("need at least 2 bits for a prime")
    n = (1 << k) - 1
    while n >= 1 << (k - 1):
        if is_probable_prime(n):
            return n
        n -= 1
    raise ValueError(f"no {k}-bit prime")


# -- generic group ------------------------------------------------------------


@dataclass(frozen=True)
class Element:
    """``g0^e`` in G1 (tag 0x11) or ``h0^e`` in G2 (tag 0x12)."""

    group: int
    e: int
    w: int

    def __mul__(self, other: "Element") -> "Element":
        if other.group != self.group or other.w != self.w:
            raise InvalidElement("elements from different groups")
        return Element(self.group, (self.e + other.e) % self.w, self.w)

    def __pow__(self, n: int) -> "Element":
        return Element(self.group, self.e * n % self.w, self.w)

    def is_identity(self) -> bool:
        return self.e == 0

    def encode(self) -> bytes:
        return bytes([self.group]) + self.e.to_bytes(8, "big")

    def to_bits(self) -> str:
        return int_to_bits(self.group, 8) + int_to_bits(self.e, 64)


@dataclass(frozen=True)
class GroupCtx:
    w: int

    def __post_init__(self):
        if self.w >= 1 << 64 or not is_probable_prime(self.w):
            raise ValueError(f"group order must be a prime below 2^64, got {self.w}")

    @classmethod
    def for_bits(cls, k: int) -> "GroupCtx":
        return _ctx_for_bits(k)

    @property
    def w_bits(self) -> int:
        return self.w.bit_length()

    @property
    def l(self) -> int:
        """Message length ``floor(log2 w)``."""
        return self.w.bit_length() - 1

    def g1(self, e: int) -> Element:
        return Element(TAG_G1, e % self.w, self.w)

    def g2(self, e: int) -> Element:
        return Element(TAG_G2, e % self.w, self.w)

    def pairing(self, a: Element, b: Element) -> Element:
        """``e(g0^a, g0^b) = h0^(ab)``."""
        for el in (a, b):
            if el.group != TAG_G1 or el.w != self.w:
                raise InvalidElement("pairing takes two G1 elements of this context")
        return Element(TAG_G2, a.e * b.e % self.w, self.w)

    def decode(self, s: str, group: int) -> Element:
        if len(s) != ELEMENT_BITS:
            raise InvalidElement(f"element encodings are {ELEMENT_BITS} bits")
        tag, e = bits_to_int(s[:8]), bits_to_int(s[8:])
        if tag != group or e >= self.w:
            raise InvalidElement("not an element of the expected group")
        return Element(tag, e, self.w)

    def hash_g2(self, z: Element) -> str:
        """H: G2 -> {0,1}^l, keyed BLAKE2b over the element encoding."""
        if z.group != TAG_G2:
            raise InvalidElement("H is defined on G2")
        digest = hashlib.blake2b(z.encode(), digest_size=16, key=_H_KEY).digest()
        return int_to_bits(int.from_bytes(digest, "big") >> (128 - self.l), self.l)

    def random_nonidentity(self, rng: RngStream) -> int:
        return 1 + rng.randbelow(self.w - 1)


@lru_cache(maxsize=None)
def _ctx_for_bits(k: int) -> GroupCtx:
    return GroupCtx(largest_prime_bits(k))


# -- keys ---------------------------------------------------------------------


def _ascii(s: str) -> str:
    return "".join(format(b, "08b") for b in s.encode())


_HEADER = (_ascii(PAIRING_ID), _ascii("G1"), _ascii("G2"))
# bits of a packed key beyond the w field
KEY_OVERHEAD = len(pack_fields(*_HEADER, "", zeros(ELEMENT_BITS), _ascii(HASH_ID), zeros(ELEMENT_BITS)))


def w_bits_for_key_len(key_len: int) -> int:
    return key_len - KEY_OVERHEAD


@dataclass(frozen=True)
class EncKey:
    ctx: GroupCtx
    g: Element
    x: Element

    def to_bits(self) -> str:
        return pack_fields(*_HEADER, int_to_bits(self.ctx.w, self.ctx.w_bits), self.g.to_bits(),
                           _ascii(HASH_ID), self.x.to_bits())

    @classmethod
    def from_bits(cls, key: str) -> "EncKey":
        ctx, g, last = _parse_key(key)
        return cls(ctx, g, ctx.decode(last, TAG_G1))


@dataclass(frozen=True)
class ObfKey:
    ctx: GroupCtx
    g: Element
    y: Element

    def to_bits(self) -> str:
        return pack_fields(*_HEADER, int_to_bits(self.ctx.w, self.ctx.w_bits), self.g.to_bits(),
                           _ascii(HASH_ID), self.y.to_bits())

    @classmethod
    def from_bits(cls, key: str) -> "ObfKey":
        ctx, g, last = _parse_key(key)
        return cls(ctx, g, ctx.decode(last, TAG_G2))


@lru_cache(maxsize=4096)
def _parse_key(key: str) -> tuple[GroupCtx, Element, str]:
    try:
        fields = unpack_fields(key, 7)
    except ValueError as exc:
        raise KeyRejected(f"unparseable key: {exc}") from None
    if tuple(fields[:3]) != _HEADER or fields[5] != _ascii(HASH_ID):
        raise KeyRejected("unknown pairing, group or hash identifier")
    w_field = fields[3]
    if not w_field or w_field[0] != "1":
        raise KeyRejected("w must be encoded without leading zeros")
    try:
        ctx = GroupCtx(bits_to_int(w_field))
        g = ctx.decode(fields[4], TAG_G1)
    except (ValueError, InvalidElement) as exc:
        raise KeyRejected(str(exc)) from None
    if g.is_identity():
        raise KeyRejected("g must generate G1")
    return ctx, g, fields[6]


def generate_key(ctx: GroupCtx, rng: RngStream) -> EncKey:
    """G: uniform generator ``g`` and uniform non-identity ``x``."""
    return EncKey(ctx, ctx.g1(ctx.random_nonidentity(rng)), ctx.g1(ctx.random_nonidentity(rng)))


def key_from_seed(k: int, gamma: str) -> EncKey:
    """``G(1^k, gamma)``: deterministic key generation from a k-bit string."""
    return generate_key(GroupCtx.for_bits(k), RngStream(derive_seed(bits_to_int(gamma), "G", k, len(gamma))))


def obfuscate_key(key: EncKey) -> ObfKey:
    """``y = e(x, g)``; ``x`` itself is dropped."""
    return ObfKey(key.ctx, key.g, key.ctx.pairing(key.x, key.g))


# -- the scheme ---------------------------------------------------------------


def _check_message(ctx: GroupCtx, m: str, alpha: int) -> None:
    if len(m) != ctx.l:
        raise LengthMismatch(f"messages are {ctx.l} bits, got {len(m)}")
    if not 0 <= alpha < ctx.w:
        raise InvalidElement(f"alpha must lie in Z_{ctx.w}")


def encrypt(key: EncKey, m: str, alpha: int) -> tuple[str, Element]:
    """``(H(e(x^alpha, g)) xor m, g^alpha)``."""
    ctx = key.ctx
    _check_message(ctx, m, alpha)
    mask = ctx.hash_g2(ctx.pairing(key.x ** alpha, key.g))
    return xor_bits(mask, m), key.g ** alpha


def decrypt(key: EncKey, c1: str, c2: Element) -> str:
    """``H(e(c2, x)) xor c1``."""
    ctx = key.ctx
    if len(c1) != ctx.l:
        raise LengthMismatch(f"c1 must be {ctx.l} bits")
    return xor_bits(ctx.hash_g2(ctx.pairing(c2, key.x)), c1)


def public_encrypt(key: ObfKey, m: str, alpha: int) -> tuple[str, Element]:
    """``(H(y^alpha) xor m, g^alpha)``."""
    ctx = key.ctx
    _check_message(ctx, m, alpha)
    return xor_bits(ctx.hash_g2(key.y ** alpha), m), key.g ** alpha


def ciphertext_bits(c1: str, c2: Element) -> str:
    return c1 + c2.to_bits()


def split_ciphertext(ctx: GroupCtx, c: str) -> tuple[str, Element]:
    if len(c) != ctx.l + ELEMENT_BITS:
        raise LengthMismatch(f"ciphertexts are {ctx.l + ELEMENT_BITS} bits")
    return c[:ctx.l], ctx.decode(c[ctx.l:], TAG_G1)


def split_plain_input(ctx: GroupCtx, a: str) -> tuple[str, int]:
    return a[:ctx.l], bits_to_int(a[ctx.l:])


def plain_input(ctx: GroupCtx, m: str, alpha: int) -> str:
    return m + int_to_bits(alpha, ctx.w_bits)


# -- families -----------------------------------------------------------------


def _member(parser):
    def member(key: str) -> bool:
        try:
            parser(key)
        except (KeyRejected, InvalidElement):
            return False
        return True
    return member


def _enc_in_len(key_len: int) -> int:
    kb = w_bits_for_key_len(key_len)
    return 2 * kb - 1


def _cipher_len(key_len: int) -> int:
    return w_bits_for_key_len(key_len) - 1 + ELEMENT_BITS


def _msg_len(key_len: int) -> int:
    return w_bits_for_key_len(key_len) - 1


def _plain_sampler(key_len: int, rng: RngStream) -> str:
    ctx = GroupCtx.for_bits(w_bits_for_key_len(key_len))
    return plain_input(ctx, rng.bits(ctx.l), rng.randbelow(ctx.w))


def _sample_enc_key(k: int, rng: RngStream) -> str:
    return generate_key(GroupCtx.for_bits(k), rng).to_bits()


def _e_eval(key: str, a: str) -> tuple[str, int]:
    ek = EncKey.from_bits(key)
    m, alpha = split_plain_input(ek.ctx, a)
    return ciphertext_bits(*encrypt(ek, m, alpha)), 3


def _d_eval(key: str, c: str) -> tuple[str, int]:
    ek = EncKey.from_bits(key)
    return decrypt(ek, *split_ciphertext(ek.ctx, c)), 2


def _f_eval(key: str, a: str) -> tuple[str, int]:
    ok = ObfKey.from_bits(key)
    m, alpha = split_plain_input(ok.ctx, a)
    return ciphertext_bits(*public_encrypt(ok, m, alpha)), 2


def _ciphertext_sampler(key_len: int, rng: RngStream) -> str:
    ctx = GroupCtx.for_bits(w_bits_for_key_len(key_len))
    return rng.bits(ctx.l) + ctx.g1(rng.randbelow(ctx.w)).to_bits()


E_FAMILY = register_family(Family(
    "E", _e_eval, _sample_enc_key, _member(EncKey.from_bits),
    input_len=_enc_in_len, step_bound=const(3), output_len=_cipher_len,
    input_sampler=_plain_sampler, min_k=2,
    description="pairing-based symmetric encryption E^key(m, alpha)",
))
D_FAMILY = register_family(Family(
    "D", _d_eval, _sample_enc_key, _member(EncKey.from_bits),
    input_len=_cipher_len, step_bound=const(2), output_len=_msg_len,
    input_sampler=_ciphertext_sampler, min_k=2,
    description="decryption D^key(c1, c2)",
))


def _sample_obf_key(k: int, rng: RngStream) -> str:
    return obfuscate_key(generate_key(GroupCtx.for_bits(k), rng)).to_bits()


F_FAMILY = register_family(Family(
    "F", _f_eval, _sample_obf_key, _member(ObfKey.from_bits),
    input_len=_enc_in_len, step_bound=const(2), output_len=_cipher_len,
    input_sampler=_plain_sampler, min_k=2,
    description="public-key form F^key'(m, alpha) = (H(y^alpha) xor m, g^alpha)",
))


# challenge oracle: key <b, key, beta>, input <m0, m1>

def _c_parse(key: str) -> tuple[str, EncKey, int]:
    try:
        b, inner, beta = unpack_fields(key, 3)
    except ValueError as exc:
        raise KeyRejected(str(exc)) from None
    if b not in ("0", "1"):
        raise KeyRejected("challenge bit must be one bit")
    ek = EncKey.from_bits(inner)
    if len(beta) != ek.ctx.w_bits:
        raise KeyRejected("beta has the wrong length")
    return b, ek, bits_to_int(beta) % ek.ctx.w


def _c_eval(key: str, a: str) -> tuple[str, int]:
    b, ek, beta = _c_parse(key)
    l = ek.ctx.l
    m = a[:l] if b == "0" else a[l:]
    return ciphertext_bits(*encrypt(ek, m, beta)), 3


def challenge_key(b: str, key: EncKey, beta: str) -> str:
    return pack_fields(b, key.to_bits(), beta)


def _c_key_len_to_w_bits(key_len: int) -> int:
    # <b, key, beta>: 3 prefixes + 1 + |key| + w_bits, with |key| = overhead + w_bits
    return (key_len - 3 * 32 - 1 - KEY_OVERHEAD) // 2


C_FAMILY = register_family(Family(
    "C", _c_eval,
    key_sampler=lambda k, rng: challenge_key(rng.bit(), generate_key(GroupCtx.for_bits(k), rng), rng.bits(k)),
    key_membership=_member(_c_parse),
    input_len=lambda n: 2 * (_c_key_len_to_w_bits(n) - 1),
    step_bound=const(3),
    output_len=lambda n: _c_key_len_to_w_bits(n) - 1 + ELEMENT_BITS,
    min_k=2,
    description="challenge oracle C^<b,key,beta>(m0, m1) = E(key, beta, m_b)",
))


# -- probabilistic variant: randomness on the key tape ------------------------


def _pe_parse(key: str) -> tuple[str, int]:
    try:
        inner, alpha = unpack_fields(key, 2)
    except ValueError as exc:
        raise KeyRejected(str(exc)) from None
    return inner, bits_to_int(alpha) if alpha else -1


def _pe_eval(key: str, m: str) -> tuple[str, int]:
    inner, alpha = _pe_parse(key)
    return _e_eval(inner, m + int_to_bits(alpha, len(m) + 1))


def _pf_eval(key: str, m: str) -> tuple[str, int]:
    inner, alpha = _pe_parse(key)
    return _f_eval(inner, m + int_to_bits(alpha, len(m) + 1))


def _prob_member(parser):
    def member(key: str) -> bool:
        try:
            inner, alpha = _pe_parse(key)
            ctx = parser(inner).ctx
        except (KeyRejected, InvalidElement):
            return False
        return len(unpack_fields(key, 2)[1]) == ctx.w_bits and 0 <= alpha < ctx.w
    return member


def _prob_msg_len(key_len: int) -> int:
    # <key, alpha>: 2 prefixes + overhead + 2 * w_bits
    return (key_len - 2 * 32 - KEY_OVERHEAD) // 2 - 1


def prob_key(key: EncKey | ObfKey, alpha: int) -> str:
    return pack_fields(key.to_bits(), int_to_bits(alpha, key.ctx.w_bits))


PE_FAMILY = register_family(Family(
    "PE", _pe_eval,
    key_sampler=lambda k, rng: prob_key(generate_key(GroupCtx.for_bits(k), rng), rng.randbelow(largest_prime_bits(k))),
    key_membership=_prob_member(EncKey.from_bits),
    input_len=_prob_msg_len, step_bound=const(3),
    output_len=lambda n: _prob_msg_len(n) + ELEMENT_BITS, min_k=2,
    description="E with its randomness alpha moved onto the key tape",
))
PF_FAMILY = register_family(Family(
    "PF", _pf_eval,
    key_sampler=lambda k, rng: prob_key(obfuscate_key(generate_key(GroupCtx.for_bits(k), rng)),
                                        rng.randbelow(largest_prime_bits(k))),
    key_membership=_prob_member(ObfKey.from_bits),
    input_len=_prob_msg_len, step_bound=const(2),
    output_len=lambda n: _prob_msg_len(n) + ELEMENT_BITS, min_k=2,
    description="F with alpha on the key tape",
))


def _pz_eval(key: str, a: str) -> tuple[str, int]:
    # a = m || c1 || enc(c2); accepts iff c decrypts to m
    ek = EncKey.from_bits(key)
    l = ek.ctx.l
    m, c = a[:l], a[l:]
    try:
        ok = decrypt(ek, *split_ciphertext(ek.ctx, c)) == m
    except (InvalidElement, LengthMismatch):
        ok = False
    return ("1" if ok else "0"), 3


PZ_FAMILY = register_family(Family(
    "PZ", _pz_eval, _sample_enc_key, _member(EncKey.from_bits),
    input_len=lambda n: 2 * _msg_len(n) + ELEMENT_BITS, step_bound=const(3), output_len=const(1), min_k=2,
    description="decrypt-and-compare decider Z(m, c) for the probabilistic variant",
))


def pe_canonical_part(key: str) -> str:
    return _pe_parse(key)[0]


def prob_pairing_family(k: int) -> tuple[Family, TauRelation, TauDecider]:
    """``(PE, tau, decider)``; ``r`` of ``2k`` bits splits into ``<gamma, alpha>``."""

    def builder(r: str) -> tuple[str, ProgramValue]:
        gamma, alpha_bits = r[:k], r[k:]
        key = key_from_seed(k, gamma)
        alpha = bits_to_int(alpha_bits) % key.ctx.w
        return prob_key(key, alpha), Native("PZ", key.to_bits())

    tau = TauRelation("PE", pe_canonical_part)
    decider = TauDecider("PE", r_len=Poly((0, 2)), builder=builder, size_poly=Poly((64, 0, 1)))
    return PE_FAMILY, tau, decider


# -- obfuscators --------------------------------------------------------------


def pairing_obfuscator() -> Obfuscator:
    """(E, key) -> Native(F, key') with ``y = e(x, g)``."""

    def transform(family: Family, key: str, rng: RngStream) -> Native:
        if family.family_id != "E":
            raise KeyRejected("the pairing obfuscator takes the E family")
        return Native("F", obfuscate_key(EncKey.from_bits(key)).to_bits())

    return Obfuscator("pairing", transform, size_poly=Poly((64, 1)), slowdown_poly=Poly((0, 1)),
                      description="publishes y = e(x, g) in place of x")


def wrong_y_obfuscator() -> Obfuscator:
    """Broken fixture: like the pairing obfuscator but with a random ``y``."""

    def transform(family: Family, key: str, rng: RngStream) -> Native:
        if family.family_id == "E":
            ek = EncKey.from_bits(key)
            bad = ObfKey(ek.ctx, ek.g, ek.ctx.g2(_other_exponent(ek, rng)))
            return Native("F", bad.to_bits())
        if family.family_id == "PE":
            inner, alpha = _pe_parse(key)
            ek = EncKey.from_bits(inner)
            bad = ObfKey(ek.ctx, ek.g, ek.ctx.g2(_other_exponent(ek, rng)))
            return Native("PF", prob_key(bad, alpha))
        raise KeyRejected("wrong-y takes E or PE")

    return Obfuscator("wrong-y", transform, size_poly=Poly((64, 1)), slowdown_poly=Poly((0, 1)),
                      description="publishes a y unrelated to x")


def _other_exponent(ek: EncKey, rng: RngStream) -> int:
    right = ek.x.e * ek.g.e % ek.ctx.w
    e = right
    while e == right:
        e = rng.randbelow(ek.ctx.w)
    return e


def rerandomizing_obfuscator() -> Obfuscator:
    """(PE, <key, alpha>) -> Native(PF, <key', fresh alpha>)."""

    def transform(family: Family, key: str, rng: RngStream) -> Native:
        if family.family_id != "PE":
            raise KeyRejected("the re-randomizing obfuscator takes the PE family")
        inner, _ = _pe_parse(key)
        ek = EncKey.from_bits(inner)
        return Native("PF", prob_key(obfuscate_key(ek), rng.randbelow(ek.ctx.w)))

    return Obfuscator("rerandomize", transform, size_poly=Poly((64, 1)), slowdown_poly=Poly((0, 1)),
                      description="public-key form with fresh in-key randomness")


# -- toy families -------------------------------------------------------------


def _plain_member(key: str) -> bool:
    return len(key) >= 1 and not key.strip("01")


def _identity_eval(key: str, a: str) -> tuple[str, int]:
    return a, 1


def _xor_eval(key: str, a: str) -> tuple[str, int]:
    return xor_bits(key, a), 1


def _prf_eval(key: str, a: str) -> tuple[str, int]:
    n = len(key)
    h = hashlib.blake2b(bits_to_bytes(a) + len(a).to_bytes(4, "big"), digest_size=64,
                        key=bits_to_bytes(key)[:64], person=b"wbc-prf")
    h.update(n.to_bytes(4, "big"))
    v = int.from_bytes(h.digest(), "big") >> (512 - n) if n <= 512 else 0
    return int_to_bits(v, n), 1


def _bits_sampler(k: int, rng: RngStream) -> str:
    return rng.bits(k)


IDENTITY_FAMILY = register_family(Family(
    "identity", _identity_eval, _bits_sampler, _plain_member,
    input_len=Poly((0, 1)), step_bound=const(1), output_len=Poly((0, 1)),
    description="Q^q(a) = a, key ignored",
))
XOR_FAMILY = register_family(Family(
    "xor", _xor_eval, _bits_sampler, _plain_member,
    input_len=Poly((0, 1)), step_bound=const(1), output_len=Poly((0, 1)),
    description="Q^q(a) = q xor a",
))
PRF_FAMILY = register_family(Family(
    "prf", _prf_eval, _bits_sampler, lambda q: _plain_member(q) and len(q) <= 512,
    input_len=Poly((0, 1)), step_bound=const(1), output_len=Poly((0, 1)),
    description="keyed BLAKE2b truncated to |q| bits",
))


# -- random-oracle point family -----------------------------------------------


def _ro_eval(key: str, a: str) -> tuple[str, int]:
    return ("1" if current_random_oracle().query("ro", key + a, len(key)) == key else "0"), 1


RO_FAMILY = register_family(Family(
    "ro", _ro_eval, _bits_sampler, _plain_member,
    input_len=Poly((0, 1)), step_bound=const(1), output_len=const(1),
    description="Q^q(X) = 1 iff RO(q || X) = q",
))


def ro_family() -> Family:
    return RO_FAMILY


# -- find-q' gadget -----------------------------------------------------------


def findq_key(q: str, q_prime: str, a: str) -> str:
    return pack_fields(q, q_prime, a)


@lru_cache(maxsize=None)
def findq_family(base_id: str, budget_factor: int = 4) -> Family:
    """Q1 with key ``<q, q', a>``: given a serialized program Y, outputs ``q'``
    iff ``Y(a) = Q^q(a)`` within ``budget_factor`` times Q's step bound,
    else ``0^|q'|``."""
    from .core import get_family

    base = get_family(base_id)

    def parse(key: str) -> tuple[str, str, str]:
        try:
            q, q_prime, a = unpack_fields(key, 3)
        except ValueError as exc:
            raise KeyRejected(str(exc)) from None
        if not base.key_membership(q) or len(q_prime) != len(q) or len(a) != base.input_len_for(len(q)):
            raise KeyRejected("findq keys need q in K_Q, |q'| = |q| and a in I_Q")
        return q, q_prime, a

    def evaluate(key: str, y_bits: str) -> tuple[str, int]:
        q, q_prime, a = parse(key)
        ref, ref_steps = run_family(base, q, a)
        budget = budget_factor * base.step_bound(len(q))
        try:
            got = eval_program(program_from_bits(y_bits), a, budget)
        except WbcError:
            return zeros(len(q_prime)), 1 + ref_steps
        agree = got.ok and got.output == ref
        return (q_prime if agree else zeros(len(q_prime))), 1 + ref_steps + got.steps_used

    def member(key: str) -> bool:
        try:
            parse(key)
        except KeyRejected:
            return False
        return True

    def sample(k: int, rng: RngStream) -> str:
        from .core import sample_key
        q = sample_key(base, k, rng)
        return findq_key(q, rng.bits(len(q)), base.sample_input(len(q), rng))

    step_poly = base.step_bound
    return register_family(Family(
        f"findq[{base_id}]", evaluate, sample, member,
        input_len=None,
        step_bound=lambda n: 1 + (budget_factor + 1) * step_poly(n),
        output_len=None,
        min_k=base.min_k,
        description=f"releases q' for a program agreeing with {base_id} at the hidden point",
    ))


__all__ = [
    "Element", "GroupCtx", "EncKey", "ObfKey", "generate_key", "key_from_seed", "obfuscate_key",
    "encrypt", "decrypt", "public_encrypt", "ciphertext_bits", "split_ciphertext", "plain_input",
    "split_plain_input", "challenge_key", "prob_key", "prob_pairing_family", "pairing_obfuscator",
    "wrong_y_obfuscator", "rerandomizing_obfuscator", "ro_family", "findq_family", "findq_key",
    "is_probable_prime", "largest_prime_bits",
]
