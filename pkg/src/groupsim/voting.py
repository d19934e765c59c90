"""Group decision rules and the closed-form / brute-force accuracy oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

TIE_TOLERANCE = 1e-12
WEIGHT_EPS = 1e-6
MAX_ENUMERATION = 20


@dataclass(frozen=True)
class Majority:
    pass


@dataclass(frozen=True)
class AbilityWeighted:
    """Vote weight equals the agent's base ability."""


@dataclass(frozen=True)
class OptimalWeighted:
    """Log-odds weights from the true accuracy or from the agent's running estimate."""

    source: Literal["true", "empirical"] = "true"

    def __post_init__(self):
        if self.source not in ("true", "empirical"):
            raise ValueError(f"source must be 'true' or 'empirical', got {self.source!r}")


@dataclass(frozen=True)
class Imitation:
    """Sequential answering where each agent partly copies earlier answers.

    Shapes answer generation only; the resulting ballots are counted by
    simple majority.
    """

    chi: float = 0.0
    order: Literal["random", "best_first"] = "random"

    def __post_init__(self):
        if not 0.0 <= self.chi <= 1.0:
            raise ValueError(f"imitation rate must lie in [0, 1], got {self.chi}")
        if self.order not in ("random", "best_first"):
            raise ValueError(f"order must be 'random' or 'best_first', got {self.order!r}")


DecisionRule = Union[Majority, AbilityWeighted, OptimalWeighted, Imitation]


@dataclass(frozen=True)
class BallotEntry:
    agent: int
    correct: bool
    weight: float = 1.0


@dataclass(frozen=True)
class GroupVoteOutcome:
    correct: bool
    tie_broken: bool
    margin: float


def decide(rule: DecisionRule, ballots: Sequence[BallotEntry], rng) -> GroupVoteOutcome:
    """Combine ballots into the group answer.

    ``margin`` is the weighted vote for the correct side minus the weighted
    vote for the wrong side. A margin within ``TIE_TOLERANCE`` of zero is a
    tie and is settled by one fair-coin draw from ``rng``; nothing is drawn
    otherwise.
    """
    if not ballots:
        raise ValueError("cannot decide on an empty ballot")
    unit = isinstance(rule, (Majority, Imitation))
    margin = 0.0
    for b in ballots:
        w = 1.0 if unit else b.weight
        margin += w if b.correct else -w
    if margin > TIE_TOLERANCE:
        return GroupVoteOutcome(True, False, margin)
    if margin < -TIE_TOLERANCE:
        return GroupVoteOutcome(False, False, margin)
    return GroupVoteOutcome(rng.random() < 0.5, True, margin)


def optimal_weight(p: float) -> float:
    """``log(p / (1 - p))`` with ``p`` clamped to ``[1e-6, 1 - 1e-6]``.

    Negative for worse-than-random agents, which amounts to inverting their vote.
    """
    p = min(max(p, WEIGHT_EPS), 1.0 - WEIGHT_EPS)
    return math.log(p / (1.0 - p))


def vote_weight(rule: DecisionRule, base_ability: float, true_p: float, estimated_p: float) -> float:
    if isinstance(rule, AbilityWeighted):
        return base_ability
    if isinstance(rule, OptimalWeighted):
        return optimal_weight(true_p if rule.source == "true" else estimated_p)
    return 1.0


def analytic_majority_accuracy(n: int, p: float) -> float:
    """Accuracy of ``n`` independent agents of accuracy ``p`` under majority voting.

    Even groups include the coin-flip term for the exact split.
    """
    if n < 1:
        raise ValueError("need at least one agent")
    q = 1.0 - p
    total = sum(math.comb(n, k) * p**k * q ** (n - k) for k in range(n // 2 + 1, n + 1))
    if n % 2 == 0:
        h = n // 2
        total += 0.5 * math.comb(n, h) * p**h * q**h
    return total


def majority_accuracy_bounds(accuracies: Sequence[float]) -> tuple[float, float]:
    """Lower and upper bound on majority-vote accuracy for heterogeneous agents.

    ``accuracies`` must be sorted ascending. With ``k = n//2 + 1``::

        upper = min(1, min_m  (1/m) * sum(p[0 : n-k+m]))
        lower = max(0, max_m  (1/m) * sum(p[k-m : n]) - (n-k)/m)

    for ``m = 1..k``.
    """
    p = list(accuracies)
    n = len(p)
    if n < 1:
        raise ValueError("need at least one accuracy")
    if any(a > b for a, b in zip(p, p[1:])):
        raise ValueError("accuracies must be sorted ascending")
    k = n // 2 + 1
    upper = 1.0
    lower = 0.0
    for m in range(1, k + 1):
        upper = min(upper, sum(p[: n - k + m]) / m)
        lower = max(lower, sum(p[k - m:]) / m - (n - k) / m)
    return lower, upper


def enumerate_group_accuracy(accuracies: Sequence[float], weights: Sequence[float]) -> float:
    """Exact weighted-vote accuracy by summing over all 2**n correctness patterns.

    Ties (|margin| <= TIE_TOLERANCE) count one half.
    """
    p = np.asarray(accuracies, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = p.size
    if w.size != n:
        raise ValueError("accuracies and weights differ in length")
    if n > MAX_ENUMERATION:
        raise ValueError(f"enumeration limited to {MAX_ENUMERATION} agents, got {n}")
    if n == 0:
        raise ValueError("need at least one agent")
    codes = np.arange(2**n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    prob = np.prod(np.where(bits, p, 1.0 - p), axis=1)
    margin = np.where(bits, w, -w).sum(axis=1)
    score = np.where(margin > TIE_TOLERANCE, 1.0, np.where(margin < -TIE_TOLERANCE, 0.0, 0.5))
    return float(np.dot(prob, score))


def answer_order(accuracies: Sequence[float], order: str, rng) -> list[int]:
    """Answering order for one round.

    ``best_first`` sorts by descending accuracy (ties by index) and draws
    nothing. ``random`` draws one uniform key per agent and sorts by key.
    """
    n = len(accuracies)
    if order == "best_first":
        return sorted(range(n), key=lambda i: (-accuracies[i], i))
    keys = [rng.random() for _ in range(n)]
    return sorted(range(n), key=lambda i: (keys[i], i))


def imitate(accuracies: Sequence[float], chi: float, order: Sequence[int], uniforms: Sequence[float]) -> list[bool]:
    """Sequential imitation given the answering order and one uniform per agent.

    The agent at position ``l >= 1`` is correct with probability
    ``(1 - chi) * p + chi * (share of the l earlier answers that were correct)``.
    """
    correct = [False] * len(accuracies)
    n_right = 0
    for pos, i in enumerate(order):
        prob = accuracies[i] if pos == 0 else (1.0 - chi) * accuracies[i] + chi * n_right / pos
        c = uniforms[i] < prob
        correct[i] = c
        n_right += c
    return correct


def generate_imitation_answers(accuracies: Sequence[float], chi: float, order: str, rng) -> list[BallotEntry]:
    if not accuracies:
        raise ValueError("need at least one agent")
    if not 0.0 <= chi <= 1.0:
        raise ValueError(f"imitation rate must lie in [0, 1], got {chi}")
    uniforms = [rng.random() for _ in accuracies]
    seq = answer_order(accuracies, order, rng)
    correct = imitate(accuracies, chi, seq, uniforms)
    return [BallotEntry(i, c, 1.0) for i, c in enumerate(correct)]
