"""The four headline demos, as plain functions returning rows and a summary.

Each demo returns ``(summary_lines, csv_rows)``; rows use the fixed
advantage columns from :mod:`wbc_arena.games`.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import schemes
from .adversaries import (
    ZOO_VERSION,
    EqualityTesterAdversary,
    EqualityTesterDistinguisher,
    ForwardingAdversary,
    GuessAdversary,
    JunkProgramSimulator,
    KeyExtractionAdversary,
    RoProbingDistinguisher,
    learners,
)
from .games import (
    BLACKBOX,
    WHITEBOX,
    WHITEBOX_PAIR,
    Runner,
    advantage_row,
    estimate_advantage,
    gap_rows,
    gap_seed,
    whitebox_gap,
)
from .learnability import APPROX, EXACT, estimate_learnability
from .obfuscation import estimate_ind_gap
from .registry import get_obfuscator
from .rng import derive_seed
from .specs_library import get_spec
from .stats import AdvantageEstimate


@dataclass(frozen=True)
class Scale:
    """Trial counts; the defaults are the full acceptance-scale runs."""

    blackbox: int = 10_000
    whitebox: int = 200
    gap: int = 10_000
    learn_approx: int = 10_000
    learn_exact: int = 1_000

    @classmethod
    def uniform(cls, n: int) -> "Scale":
        return cls(n, n, n, n, n)


def _fmt(est: AdvantageEstimate) -> str:
    return f"{est.mean:.4f} [{est.ci_low:.4f}, {est.ci_high:.4f}] ({est.wins}/{est.trials})"


def demo_find_q_prime(seed: int, scale: Scale = Scale(), k: int = 16):
    spec = get_spec("find-q")
    obf = get_obfuscator("identity")
    report = whitebox_gap(spec, 1, obf, [ForwardingAdversary(), GuessAdversary()], k, scale.whitebox, seed,
                          threshold=0.05, blackbox_trials=scale.blackbox, zoo_version=ZOO_VERSION)
    rows = gap_rows(report, spec.families[0].family_id)
    rows.append(_gap_row(spec.spec_id, spec.families[0].family_id, obf.obfuscator_id, "zoo-max", k, report.max_gap))
    lines = [f"find-q' over {spec.families[0].family_id} at k={k} with the identity obfuscator"]
    for e in report.entries:
        lines.append(f"  {e.adversary_id:<12} black-box {_fmt(e.blackbox)}  white-box {_fmt(e.whitebox)}  gap {e.gap:.4f}")
    lines.append(f"  zoo max gap {report.max_gap:.4f} ({ZOO_VERSION})")
    return lines, rows


def demo_wbp_pairing(seed: int, scale: Scale = Scale(), k: int = 31):
    spec = get_spec("ind-cpa")
    zoo = [GuessAdversary(), KeyExtractionAdversary(), EqualityTesterAdversary()]
    rows, lines = [], [f"ind-cpa of the pairing scheme at |w| = {k} bits"]
    for obf_id, advs in (("pairing", zoo), ("identity", [KeyExtractionAdversary()])):
        obf = get_obfuscator(obf_id)
        report = whitebox_gap(spec, 1, obf, advs, k, scale.gap, derive_seed(seed, obf_id), zoo_version=ZOO_VERSION)
        rows += gap_rows(report, "E")
        rows.append(_gap_row(spec.spec_id, "E", obf_id, "zoo-max", k, report.max_gap))
        lines.append(f"  obfuscator {obf_id}:")
        for e in report.entries:
            lines.append(f"    {e.adversary_id:<16} gap {e.gap:.4f}  (bb {e.blackbox.mean:.4f}, wb {e.whitebox.mean:.4f})")
        lines.append(f"    zoo max gap {report.max_gap:.4f}")
    ind = estimate_ind_gap(get_obfuscator("pairing"), schemes.E_FAMILY, EqualityTesterDistinguisher(20),
                           JunkProgramSimulator(), "", k, max(1, scale.gap // 10), derive_seed(seed, "ind"))
    lines.append(f"  IND soundness witness (junk simulator, 20-probe tester): gap {ind.gap:.4f}")
    rows.append(_gap_row("ind-soundness", "E", "pairing", "equality-tester|junk-program", k, ind.gap))
    return lines, rows


def demo_uwbp_ro(seed: int, scale: Scale = Scale(), k: int = 32, query_budget: int = 1000):
    spec = get_spec("ro-distinguish")
    adv = RoProbingDistinguisher(query_budget)
    est = estimate_advantage(Runner(spec, adv), k, scale.gap, gap_seed(seed, adv.adversary_id, BLACKBOX))
    rows = [advantage_row(spec.spec_id, "ro", "none", adv.adversary_id, BLACKBOX, k, est)]
    lines = [f"random-oracle distinguishing game at k={k}, {query_budget} probes",
             f"  win rate {_fmt(est)}; |mean - 1/2| = {abs(est.mean - 0.5):.4f}"]
    for lr in learners():
        for mode, n in ((APPROX, scale.learn_approx), (EXACT, scale.learn_exact)):
            if lr.learner_id != "constant-zero" and mode == APPROX:
                continue
            rep = estimate_learnability(schemes.RO_FAMILY, lr, k, n, mode, derive_seed(seed, lr.learner_id, mode))
            lines.append(f"  learner {lr.learner_id:<16} {mode:<6} success {rep.success_rate:.4f} "
                         f"({rep.successes}/{rep.trials}, basis {rep.equality_basis})")
            rows.append(["learn", "ro", "none", lr.learner_id, mode, k, rep.trials, rep.successes,
                         f"{rep.success_rate:.6f}", "", ""])
    return lines, rows


def demo_pair_obfuscation(seed: int, scale: Scale = Scale(), k: int = 16):
    spec = get_spec("find-q-pair")
    obf = get_obfuscator("identity")
    fwd = ForwardingAdversary()
    pair = estimate_advantage(Runner(spec, fwd, WHITEBOX_PAIR, obf, 1, 2), k, scale.whitebox,
                              gap_seed(seed, fwd.adversary_id, WHITEBOX_PAIR))
    rows = [advantage_row(spec.spec_id, "prf", obf.obfuscator_id, fwd.adversary_id, WHITEBOX_PAIR, k, pair)]
    lines = [f"two-share find-q' at k={k} with the identity obfuscator",
             f"  pair white-box forwarding {_fmt(pair)}"]
    for i in (1, 2):
        single = estimate_advantage(Runner(spec, fwd, WHITEBOX, obf, i), k, scale.blackbox,
                                    derive_seed(seed, "single", i))
        rows.append(advantage_row(spec.spec_id, "prf", obf.obfuscator_id, fwd.adversary_id, f"{WHITEBOX}[{i}]", k, single))
        lines.append(f"  single white-box (index {i}) forwarding {_fmt(single)}")
    bb = estimate_advantage(Runner(spec, GuessAdversary()), k, scale.blackbox, gap_seed(seed, "guess", BLACKBOX))
    rows.append(advantage_row(spec.spec_id, "prf", "none", "guess", BLACKBOX, k, bb))
    lines.append(f"  black-box guess {_fmt(bb)}")
    return lines, rows


def _gap_row(spec_id, family_id, obfuscator_id, adversary_id, k, gap):
    return [spec_id, family_id, obfuscator_id, adversary_id, "gap", k, "", "", f"{gap:.6f}", "", ""]


DEMOS = {
    "find-q-prime": demo_find_q_prime,
    "wbp-pairing": demo_wbp_pairing,
    "uwbp-ro": demo_uwbp_ro,
    "pair-obfuscation": demo_pair_obfuscation,
}
