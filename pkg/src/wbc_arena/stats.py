"""Confidence intervals and uniformity tests used by the estimators."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from statistics import NormalDist

from scipy import stats as _sps

Z95 = NormalDist().inv_cdf(0.975)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # clamp rounding noise so that low <= p <= high holds exactly
    return min(max(0.0, centre - half), p), max(min(1.0, centre + half), p)


def chi_square_uniform(samples: Iterable[Hashable], categories: Iterable[Hashable]) -> float:
    """p-value of Pearson's chi-square test against the uniform law on ``categories``."""
    cats = list(categories)
    counts = Counter(samples)
    unknown = set(counts) - set(cats)
    if unknown:
        raise ValueError(f"samples outside the category set: {sorted(unknown)[:3]}")
    observed = [counts.get(c, 0) for c in cats]
    return float(_sps.chisquare(observed).pvalue)


@dataclass(frozen=True)
class AdvantageEstimate:
    """Monte Carlo estimate of a success probability with a Wilson 95% interval."""

    trials: int
    wins: int
    mean: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, wins: int, trials: int) -> "AdvantageEstimate":
        low, high = wilson_interval(wins, trials)
        return cls(trials, wins, wins / trials, low, high)

    @property
    def ci_width(self) -> float:
        return self.ci_high - self.ci_low
