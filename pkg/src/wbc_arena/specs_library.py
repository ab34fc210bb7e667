"""Ready-made specifications: ind-cpa, ind-cca2, find-q', the two-family
find-q' variant and the random-oracle distinguishing game.

Experiment inputs ``r`` are parsed as fixed-width fields in the order given
in each builder's docstring.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

from .core import Family, Poly, QueryRecord, const, get_family
from .errors import UnknownId
from .games import Specification
from .schemes import C_FAMILY, D_FAMILY, E_FAMILY, RO_FAMILY, challenge_key, findq_family, findq_key, key_from_seed

DEFAULT_P_RUN = Poly((8192,))


def k_from_r(spec: Specification, r: str) -> int:
    """Invert ``p_in`` (monotone) to recover ``k`` from ``|r|``."""
    k = 1
    while spec.p_in(k) < len(r):
        k += 1
    if spec.p_in(k) != len(r):
        raise ValueError(f"|r| = {len(r)} is not p_in(k) for any k")
    return k


def _count(records: Sequence[QueryRecord], i: int) -> int:
    return sum(1 for rec in records if rec.i == i)


# -- ind-cca2 / ind-cpa ---------------------------------------------------------

E_INDEX, D_INDEX, C_INDEX = 1, 2, 3


def _cca2_keys(k: int, r: str) -> tuple[str, str, str]:
    gamma, beta, b = r[:k], r[k:2 * k], r[2 * k:]
    key = key_from_seed(k, gamma)
    kb = key.to_bits()
    return kb, kb, challenge_key(b, key, beta)


def cca2_win(r: str, records: Sequence[QueryRecord], s: str) -> bool:
    """At most one C query, no D query on C's output after it, and ``s = b``."""
    c_recs = [rec for rec in records if rec.i == C_INDEX]
    if len(c_recs) > 1:
        return False
    if c_recs:
        t_c, challenge = c_recs[0].t, c_recs[0].output
        if any(rec.i == D_INDEX and rec.t > t_c and rec.input == challenge for rec in records):
            return False
    return s == r[-1]


def cpa_win(r: str, records: Sequence[QueryRecord], s: str) -> bool:
    return _count(records, D_INDEX) == 0 and cca2_win(r, records, s)


def build_ind_cca2(spec_id: str = "ind-cca2", win=cca2_win) -> Specification:
    """Oracles ``(E, D, C)``; ``r = <gamma, beta, b>`` with ``|r| = 2k + 1``."""
    return Specification(
        spec_id=spec_id,
        families=(E_FAMILY, D_FAMILY, C_FAMILY),
        key_derive=_cca2_keys,
        p_in=Poly((1, 2)),
        p_run=DEFAULT_P_RUN,
        win=win,
        output_len=const(1),
        obfuscatable_claims=frozenset({E_INDEX}),
        min_k=3,
        description="IND-CCA2 of the pairing scheme; key = G(1^k, gamma)",
    )


def build_ind_cpa() -> Specification:
    """ind-cca2 with the extra conjunct "no queries to D"."""
    return build_ind_cca2("ind-cpa", cpa_win)


# -- find-q' --------------------------------------------------------------------


def _plain_base(base_id: str) -> Family:
    base = get_family(base_id)
    if base.input_len is None:
        raise ValueError(f"{base_id} has no fixed input length")
    probe = "0" * 8
    if not base.key_membership(probe):
        raise ValueError(f"find-q' bases need every k-bit string to be a key; {base_id} rejects 0^8")
    return base


def build_findq(base_id: str = "prf", budget_factor: int = 4) -> Specification:
    """Oracles ``(Q, Q1)``; ``r = <q, q', a>`` with ``|q'| = |q| = k``, ``a`` in ``I_Q``."""
    base = _plain_base(base_id)
    q1 = findq_family(base_id, budget_factor)
    n = base.input_len

    def keys(k: int, r: str) -> tuple[str, str]:
        q, q_prime, a = r[:k], r[k:2 * k], r[2 * k:]
        return q, findq_key(q, q_prime, a)

    spec: Specification

    def win(r: str, records: Sequence[QueryRecord], s: str) -> bool:
        k = k_from_r(spec, r)
        return s == r[k:2 * k] and _count(records, 2) <= 1

    spec = Specification(
        spec_id="find-q",
        families=(base, q1),
        key_derive=keys,
        p_in=lambda k: 2 * k + n(k),
        p_run=DEFAULT_P_RUN,
        win=win,
        output_len=Poly((0, 1)),
        obfuscatable_claims=frozenset({1}),
        validators={1: 2},
        description=f"find-q' over {base_id}: recover q' with at most one validator query",
    )
    return spec


def build_findq_pair(base_a: str = "prf", base_b: str = "prf", budget_factor: int = 4) -> Specification:
    """Oracles ``(Q_A, Q_B, V_A, V_B)``.

    ``r = <q_a, q_b, s1, s2, a1, a2>``.  ``V_A`` releases ``s1`` for a program
    agreeing with ``Q_A^{q_a}`` at ``a1``; ``V_B`` likewise releases ``s2``.
    The adversary wins by outputting ``s1 || s2`` with at most one query to
    each validator, so it needs working programs for both families.
    """
    fa, fb = _plain_base(base_a), _plain_base(base_b)
    va, vb = findq_family(base_a, budget_factor), findq_family(base_b, budget_factor)
    na, nb = fa.input_len, fb.input_len

    def keys(k: int, r: str) -> tuple[str, str, str, str]:
        q_a, q_b, s1, s2 = (r[j * k:(j + 1) * k] for j in range(4))
        a1 = r[4 * k:4 * k + na(k)]
        a2 = r[4 * k + na(k):]
        return q_a, q_b, findq_key(q_a, s1, a1), findq_key(q_b, s2, a2)

    spec: Specification

    def win(r: str, records: Sequence[QueryRecord], s: str) -> bool:
        k = k_from_r(spec, r)
        return s == r[2 * k:4 * k] and _count(records, 3) <= 1 and _count(records, 4) <= 1

    spec = Specification(
        spec_id="find-q-pair",
        families=(fa, fb, va, vb),
        key_derive=keys,
        p_in=lambda k: 4 * k + na(k) + nb(k),
        p_run=DEFAULT_P_RUN,
        win=win,
        output_len=Poly((0, 2)),
        obfuscatable_claims=frozenset({1, 2}),
        validators={1: 3, 2: 4},
        description=f"two-share find-q' over ({base_a}, {base_b})",
    )
    return spec


# -- random-oracle distinguishing game ------------------------------------------


def build_ro_distinguish() -> Specification:
    """One oracle ``Q^{q_b}``; ``r = <q0, q1, b>``; the adversary also gets ``q0 || q1``."""

    def keys(k: int, r: str) -> tuple[str]:
        return (r[k:2 * k] if r[-1] == "1" else r[:k],)

    return Specification(
        spec_id="ro-distinguish",
        families=(RO_FAMILY,),
        key_derive=keys,
        p_in=Poly((1, 2)),
        p_run=DEFAULT_P_RUN,
        win=lambda r, records, s: s == r[-1],
        output_len=const(1),
        obfuscatable_claims=frozenset({1}),
        aux=lambda k, r: r[:2 * k],
        description="given q0, q1 and oracle Q^{q_b}, guess b",
    )


SPEC_BUILDERS: dict[str, Callable[[], Specification]] = {
    "ind-cpa": build_ind_cpa,
    "ind-cca2": build_ind_cca2,
    "find-q": build_findq,
    "find-q-pair": build_findq_pair,
    "ro-distinguish": build_ro_distinguish,
}

_CACHE: dict[str, Specification] = {}


def get_spec(spec_id: str) -> Specification:
    if spec_id not in SPEC_BUILDERS:
        raise UnknownId("spec", spec_id)
    if spec_id not in _CACHE:
        _CACHE[spec_id] = SPEC_BUILDERS[spec_id]()
    return _CACHE[spec_id]


def spec_ids() -> list[str]:
    return list(SPEC_BUILDERS)
