"""Item-response functions: ability and difficulty to answer accuracy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class MonotoneLogistic:
    """``1/2 + 1/(1 + exp(2*lam/alpha))``; 1.0 at zero difficulty, 0.5 in the limit."""


@dataclass(frozen=True)
class ThreeParamLogistic:
    """Classic 3PL item curve ``c + (1-c)/(1 + exp(-a(alpha - b)))``.

    Difficulty is carried by ``b``; the ``lam`` argument of :func:`accuracy`
    is ignored.
    """

    a: float = 1.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.c < 1.0:
            raise ValueError(f"pseudo-guessing c must lie in [0, 1), got {self.c}")


@dataclass(frozen=True)
class SinglePeaked:
    """Accuracy peaks at ``lam == alpha`` and falls off on both sides."""

    plateau: float = 0.9


ResponseModel = Union[MonotoneLogistic, ThreeParamLogistic, SinglePeaked]


def _inv_one_plus_exp(x: float) -> float:
    # 1 / (1 + e^x) without overflow for large x
    if x > 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(x))


def accuracy(model: ResponseModel, alpha: float, lam: float) -> float:
    """Probability that an agent of ability ``alpha`` answers a binary
    problem of difficulty ``lam`` correctly."""
    if not alpha > 0:
        raise ValueError(f"ability must be positive, got {alpha}")
    if isinstance(model, MonotoneLogistic):
        return 0.5 + _inv_one_plus_exp(2.0 * lam / alpha)
    if isinstance(model, ThreeParamLogistic):
        return model.c + (1.0 - model.c) * _inv_one_plus_exp(-model.a * (alpha - model.b))
    if isinstance(model, SinglePeaked):
        z = (lam - alpha) / alpha
        return 0.5 + model.plateau * _inv_one_plus_exp(2.0 * z * z)
    raise TypeError(f"unknown response model {model!r}")


@dataclass(frozen=True)
class AbilityProfile:
    """Base ability plus per-problem overrides (one row of the specialization matrix).

    A specialist is written as an override, e.g. ``AbilityProfile(8, {0: 24})``.
    """

    base: float
    overrides: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.base > 0:
            raise ValueError(f"base ability must be positive, got {self.base}")
        for j, a in self.overrides.items():
            if not a > 0:
                raise ValueError(f"override ability for problem {j} must be positive, got {a}")

    def ability_for(self, j: int) -> float:
        return self.overrides.get(j, self.base)

    def is_appropriate(self, j: int) -> bool:
        return j in self.overrides


def effective_accuracy(model: ResponseModel, profile: AbilityProfile, j: int, lam: float) -> float:
    return accuracy(model, profile.ability_for(j), lam)


def sample_answer(rng, p_correct: float) -> bool:
    """One Bernoulli draw; consumes exactly one uniform from ``rng``."""
    return rng.random() < p_correct
