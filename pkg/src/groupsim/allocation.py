"""Response-threshold task allocation.

Agents sit on at most one problem at a time. Each round an assigned agent
quits with probability ``p_switch``; unassigned agents then scan the
problems in a random order and take problem ``j`` with the sigmoid
probability ``S_j^2 / (S_j^2 + theta_ij^2)``. Stimuli ``S_j`` and thresholds
``theta_ij`` adapt from round to round, driven by group and individual
running accuracies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

PSI_FLOOR = 0.05


@dataclass(frozen=True)
class AllocationParams:
    theta_min: float = 1.0
    theta_max: float = 100.0
    delta: float = 4.0
    beta: Optional[float] = None  # None means m/2, resolved per scenario
    beta_prime: float = 4.0
    p_switch: float = 0.5
    xi_learn: float = 2.0
    phi_forget: float = 0.5
    zeta: float = 0.98
    omega_group: float = 0.33
    omega_individual: float = 2.0 / 101.0

    def __post_init__(self):
        if not 0 < self.theta_min < self.theta_max:
            raise ValueError("need 0 < theta_min < theta_max")
        if not 0 < self.zeta < 1:
            raise ValueError("zeta must lie in (0, 1)")
        for name in ("omega_group", "omega_individual"):
            w = getattr(self, name)
            if not 0 < w <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        if not 0 <= self.p_switch <= 1:
            raise ValueError("p_switch must lie in [0, 1]")

    def beta_for(self, m: int) -> float:
        return m / 2.0 if self.beta is None else self.beta


# -- stimulus rules ---------------------------------------------------------

@dataclass(frozen=True)
class Standard:
    """``S <- S + delta - beta * n_j/n`` (no decay)."""


@dataclass(frozen=True)
class FullPerformance:
    """``S <- zeta*S + delta - beta*n_j/n - beta' * psi_j**psi_exponent``."""

    psi_exponent: float = 1.0


@dataclass(frozen=True)
class SimplifiedPerformance:
    """``S <- zeta*S + delta - beta' * psi_j``."""


@dataclass(frozen=True)
class DifficultyScaled:
    """Full rule with tiered delta and beta.

    High-tier problems get ``delta * f_high`` and ``beta * f_low``; low-tier
    problems get ``delta * f_low`` and ``beta * f_high``. ``tiers`` holds one
    of ``"low" | "mid" | "high"`` per problem; empty means take the tiers from
    the scenario's problem list.
    """

    f_low: float = 1.0
    f_high: float = 1.0
    tiers: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.f_low <= 1.0 <= self.f_high:
            raise ValueError("need f_low <= 1 <= f_high")
        for t in self.tiers:
            if t not in ("low", "mid", "high"):
                raise ValueError(f"unknown tier {t!r}")


@dataclass(frozen=True)
class GroupPerformanceScaled:
    """``S <- zeta*S + delta/psi_j - beta*(n_j/n)*psi_j - beta'*psi_j``."""


@dataclass(frozen=True)
class GeneralizedMeanScaled:
    """``S <- zeta*S + delta/G_j - beta*(n_j/n)*G_j - beta'*psi_j`` where ``G_j``
    is the power mean over agents of their individual running accuracy on j."""

    exponent: float = 1.0


StimulusRule = Union[
    Standard, FullPerformance, SimplifiedPerformance, DifficultyScaled,
    GroupPerformanceScaled, GeneralizedMeanScaled,
]


# -- threshold rules --------------------------------------------------------

@dataclass(frozen=True)
class StaticSpecialized:
    theta_approp: float = 25.0
    theta_no_approp: float = 75.0


@dataclass(frozen=True)
class StandardDynamic:
    pass


@dataclass(frozen=True)
class PerformanceDynamic:
    pass


@dataclass(frozen=True)
class Mailman:
    """Current problem drops by ``xi0``, neighbouring difficulties by ``xi1``."""

    xi0: float = 2.0
    xi1: float = 1.0
    neighbor_tolerance: float = 0.10

    def __post_init__(self):
        if not self.xi0 > self.xi1 >= 0:
            raise ValueError("need xi0 > xi1 >= 0")


ThresholdRule = Union[StaticSpecialized, StandardDynamic, PerformanceDynamic, Mailman]


# -- transition models ------------------------------------------------------

@dataclass(frozen=True)
class Sigmoid:
    pass


@dataclass(frozen=True)
class NoisySigmoid:
    """Sigmoid times a log-normal factor with ``mu = 0`` and ``sigma = 1/alpha``."""


@dataclass(frozen=True)
class MailmanSigmoid:
    """``S^2 / (S^2 + mu*theta^2 + nu*d^2)`` with ``d = |alpha_i - lam_j|``."""

    mu: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        if self.mu < 0 or self.nu < 0:
            raise ValueError("mailman coefficients must be non-negative")


TransitionModel = Union[Sigmoid, NoisySigmoid, MailmanSigmoid]


# -- state ------------------------------------------------------------------

@dataclass
class AllocationState:
    stimuli: list[float]
    thresholds: list[list[float]]
    assignment: list[Optional[int]]
    psi_group: list[float]
    psi_individual: list[list[float]]
    theta_min: float = 1.0
    theta_max: float = 100.0

    @classmethod
    def initial(cls, n: int, m: int, params: AllocationParams, rule: ThresholdRule = StandardDynamic(),
                appropriate: Sequence[set] = ()) -> "AllocationState":
        if isinstance(rule, StaticSpecialized):
            apps = list(appropriate) or [set()] * n
            thresholds = [[rule.theta_approp if j in apps[i] else rule.theta_no_approp for j in range(m)]
                          for i in range(n)]
        else:
            mid = 0.5 * (params.theta_min + params.theta_max)
            thresholds = [[mid] * m for _ in range(n)]
        return cls(
            stimuli=[0.0] * m,
            thresholds=thresholds,
            assignment=[None] * n,
            psi_group=[0.5] * m,
            psi_individual=[[0.5] * m for _ in range(n)],
            theta_min=params.theta_min,
            theta_max=params.theta_max,
        )

    @property
    def n_agents(self) -> int:
        return len(self.assignment)

    @property
    def n_problems(self) -> int:
        return len(self.stimuli)

    def counts(self) -> list[int]:
        n_j = [0] * self.n_problems
        for a in self.assignment:
            if a is not None:
                n_j[a] += 1
        return n_j

    def _clamp(self, x: float) -> float:
        return self.theta_min if x < self.theta_min else self.theta_max if x > self.theta_max else x


# -- operations -------------------------------------------------------------

def transition_probability(model: TransitionModel, s: float, theta: float, alpha: float = 1.0,
                           distance: float = 0.0, rng=None) -> float:
    if s <= 0.0:
        return 0.0
    s2 = s * s
    if isinstance(model, MailmanSigmoid):
        denom = s2 + model.mu * theta * theta + model.nu * distance * distance
        return s2 / denom
    prob = s2 / (s2 + theta * theta)
    if isinstance(model, NoisySigmoid):
        prob *= math.exp(rng.normal() / alpha)
        return min(prob, 1.0)
    return prob


def attempt_allocation(state: AllocationState, i: int, model: TransitionModel, rng,
                       alpha: float = 1.0, distances: Optional[Sequence[float]] = None) -> Optional[int]:
    """Scan all problems in a fresh random order; take the first one accepted.

    Returns the chosen problem (also written into ``state``) or ``None``.
    """
    theta_i = state.thresholds[i]
    stimuli = state.stimuli
    for j in rng.shuffled(range(state.n_problems)):
        d = distances[j] if distances is not None else 0.0
        if rng.random() < transition_probability(model, stimuli[j], theta_i[j], alpha, d, rng):
            state.assignment[i] = j
            return j
    return None


def maybe_quit(state: AllocationState, i: int, p_switch: float, rng) -> bool:
    if rng.random() < p_switch:
        state.assignment[i] = None
        return True
    return False


def generalized_mean(values: Sequence[float], p: float) -> float:
    """Normalized power mean ``(mean(x**p))**(1/p)``; min/max at -inf/+inf,
    geometric mean at 0."""
    xs = list(values)
    if not xs:
        raise ValueError("generalized mean of an empty list")
    if any(not x > 0 for x in xs):
        raise ValueError("generalized mean needs positive entries")
    if p == math.inf:
        return max(xs)
    if p == -math.inf:
        return min(xs)
    if abs(p) < 1e-6:  # x**(1/p) loses all precision here; the limit is exact to O(p)
        return math.exp(sum(math.log(x) for x in xs) / len(xs))
    return (sum(x**p for x in xs) / len(xs)) ** (1.0 / p)


def update_stimuli(state: AllocationState, rule: StimulusRule, params: AllocationParams,
                   tiers: Sequence[str] = ()) -> None:
    n = state.n_agents
    m = state.n_problems
    n_j = state.counts()
    beta = params.beta_for(m)
    delta, bp, zeta = params.delta, params.beta_prime, params.zeta
    S = state.stimuli
    psi = state.psi_group
    for j in range(m):
        share = n_j[j] / n if n else 0.0
        if isinstance(rule, Standard):
            s = S[j] + delta - beta * share
        elif isinstance(rule, FullPerformance):
            s = zeta * S[j] + delta - beta * share - bp * psi[j] ** rule.psi_exponent
        elif isinstance(rule, SimplifiedPerformance):
            s = zeta * S[j] + delta - bp * psi[j]
        elif isinstance(rule, DifficultyScaled):
            tier_list = rule.tiers or tiers
            tier = tier_list[j] if tier_list else "mid"
            d_j = delta * (rule.f_high if tier == "high" else rule.f_low if tier == "low" else 1.0)
            b_j = beta * (rule.f_high if tier == "low" else rule.f_low if tier == "high" else 1.0)
            s = zeta * S[j] + d_j - b_j * share - bp * psi[j]
        elif isinstance(rule, GroupPerformanceScaled):
            g = max(psi[j], PSI_FLOOR)
            s = zeta * S[j] + delta / g - beta * share * g - bp * psi[j]
        elif isinstance(rule, GeneralizedMeanScaled):
            col = [max(row[j], PSI_FLOOR) for row in state.psi_individual]
            g = generalized_mean(col, rule.exponent)
            s = zeta * S[j] + delta / g - beta * share * g - bp * psi[j]
        else:
            raise TypeError(f"unknown stimulus rule {rule!r}")
        S[j] = s if s > 0.0 else 0.0


def neighbors(lambdas: Sequence[float], tolerance: float = 0.10) -> list[set[int]]:
    """Problems whose difficulties differ by at most ``tolerance`` relative to the larger one."""
    out = []
    for j, lj in enumerate(lambdas):
        out.append({k for k, lk in enumerate(lambdas)
                    if k != j and abs(lj - lk) <= tolerance * max(lj, lk)})
    return out


def mailman_threshold_update(state: AllocationState, i: int, j: int, nbrs: set, xi0: float,
                             xi1: float, phi: float) -> None:
    row = state.thresholds[i]
    for k in range(len(row)):
        if k == j:
            row[k] = state._clamp(row[k] - xi0)
        elif k in nbrs:
            row[k] = state._clamp(row[k] - xi1)
        else:
            row[k] = state._clamp(row[k] + phi)


def update_thresholds(state: AllocationState, rule: ThresholdRule, params: AllocationParams,
                      problem_neighbors: Optional[Sequence[set]] = None) -> None:
    if isinstance(rule, StaticSpecialized):
        return
    xi, phi = params.xi_learn, params.phi_forget
    clamp = state._clamp
    for i, j in enumerate(state.assignment):
        if j is None:
            continue
        row = state.thresholds[i]
        if isinstance(rule, StandardDynamic):
            for k in range(len(row)):
                row[k] = clamp(row[k] - xi) if k == j else clamp(row[k] + phi)
        elif isinstance(rule, PerformanceDynamic):
            psi = state.psi_individual[i]
            for k in range(len(row)):
                if k == j:
                    row[k] = clamp(row[k] - xi * psi[k] ** 2)
                else:
                    row[k] = clamp(row[k] + phi / max(psi[k], PSI_FLOOR) ** 2)
        elif isinstance(rule, Mailman):
            nb = problem_neighbors[j] if problem_neighbors is not None else set()
            mailman_threshold_update(state, i, j, nb, rule.xi0, rule.xi1, phi)
        else:
            raise TypeError(f"unknown threshold rule {rule!r}")


def update_group_ema(state: AllocationState, j: int, x: float, omega: float) -> None:
    state.psi_group[j] = omega * x + (1.0 - omega) * state.psi_group[j]


def update_individual_ema(state: AllocationState, i: int, j: int, x: float, omega: float) -> None:
    row = state.psi_individual[i]
    row[j] = omega * x + (1.0 - omega) * row[j]
