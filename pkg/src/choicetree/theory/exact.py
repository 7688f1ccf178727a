"""Exact finite-n law of the degree sequence by dynamic programming.

The state is the degree multiset (sorted, largest first). The law of the
multiset does not depend on vertex labels, so it evolves as a Markov chain on
partitions of 2m into m + 1 positive parts. Probabilities are exact fractions.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from ..tree_model import ModelConfig

DEFAULT_CAP = 12

Multiset = tuple[int, ...]


@dataclass
class ExactDistribution:
    n_target: int
    config: ModelConfig
    multisets: dict[Multiset, Fraction] = field(default_factory=dict)

    @property
    def max_law(self) -> dict[int, Fraction]:
        """Law of the maximum degree."""
        law: dict[int, Fraction] = defaultdict(Fraction)
        for degs, p in self.multisets.items():
            law[degs[0]] += p
        return dict(sorted(law.items()))

    def total(self) -> Fraction:
        return sum(self.multisets.values(), Fraction(0))


def target_class_probabilities(degs: Multiset, config: ModelConfig) -> dict[int, Fraction]:
    """Probability that the attachment target has degree k, for each k present."""
    m = sum(degs) // 2
    counts = Counter(degs)
    if config.attachment == "preferential":
        weight = {k: Fraction(k * c, 2 * m) for k, c in counts.items()}
    else:
        weight = {k: Fraction(c, m + 1) for k, c in counts.items()}
    ks = sorted(counts)
    if config.choice_rule == "none" or config.d == 1:
        return weight
    d = config.d
    probs = {}
    if config.choice_rule == "max":
        # best draw has degree k iff every draw has degree <= k and not all < k
        below = Fraction(0)
        for k in ks:
            at_most = below + weight[k]
            probs[k] = at_most**d - below**d
            below = at_most
    else:
        above = Fraction(0)
        for k in reversed(ks):
            at_least = above + weight[k]
            probs[k] = at_least**d - above**d
            above = at_least
    return probs


def exact_distribution(n_target: int, config: ModelConfig, cap: int = DEFAULT_CAP) -> ExactDistribution:
    """Exact law of the degree multiset of the tree with ``n_target`` edges."""
    if n_target < 1:
        raise ValueError(f"n_target must be at least 1, got {n_target}")
    if n_target > cap:
        raise ValueError(f"n_target {n_target} exceeds the enumeration cap {cap}")
    states: dict[Multiset, Fraction] = {(1, 1): Fraction(1)}
    for _ in range(1, n_target):
        nxt: dict[Multiset, Fraction] = defaultdict(Fraction)
        for degs, p in states.items():
            for k, pk in target_class_probabilities(degs, config).items():
                if not pk:
                    continue
                grown = list(degs)
                grown[grown.index(k)] = k + 1
                grown.append(1)
                nxt[tuple(sorted(grown, reverse=True))] += p * pk
        states = dict(nxt)
    return ExactDistribution(n_target=n_target, config=config, multisets=states)
