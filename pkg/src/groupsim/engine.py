"""Round-loop simulator tying response, voting and allocation together.

One round, in order:

1. dynamic events scheduled for this round
2. quit draws for assigned agents, then allocation attempts for every
   unassigned agent (agent index order)
3. answers (agent index order) and one vote per problem (problem order);
   a problem nobody works on scores 0
4. running-accuracy updates, group then individual
5. threshold updates
6. stimulus updates

Single-problem scenarios skip steps 2, 5 and 6 and keep every agent on
problem 0.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, Optional

import numpy as np

from . import allocation as al
from . import voting as vt
from .config import ConfigError, ScenarioConfig, SetDifficulty, SwapSpecializations
from .response import AbilityProfile, accuracy
from .rng import ALLOCATION, ANSWERS, ORDER, TIES, Stream


@dataclass(frozen=True)
class ProblemRound:
    n_j: int
    group_correct: int
    stimulus: float
    psi_group: float


@dataclass(frozen=True)
class AgentRound:
    assignment: Optional[int]
    answered_correct: Optional[int]


@dataclass(frozen=True)
class RoundRecord:
    run: int
    round: int
    problems: tuple[ProblemRound, ...]
    agents: tuple[AgentRound, ...]


@dataclass
class RunTrace:
    """Per-round state of one run, stored column-wise.

    ``assignment`` uses -1 for an idle agent, ``answered`` uses -1 for "did
    not answer", and ``appropriate`` flags agent-rounds spent on one of the
    agent's specialised problems.
    """

    run: int
    n_j: np.ndarray
    group_correct: np.ndarray
    stimulus: np.ndarray
    psi_group: np.ndarray
    assignment: np.ndarray
    answered: np.ndarray
    appropriate: np.ndarray
    specialized: bool

    @property
    def rounds(self) -> int:
        return self.n_j.shape[0]

    def records(self) -> Iterator[RoundRecord]:
        for t in range(self.rounds):
            probs = tuple(
                ProblemRound(int(self.n_j[t, j]), int(self.group_correct[t, j]),
                             float(self.stimulus[t, j]), float(self.psi_group[t, j]))
                for j in range(self.n_j.shape[1])
            )
            agents = tuple(
                AgentRound(None if a < 0 else int(a), None if c < 0 else int(c))
                for a, c in zip(self.assignment[t], self.answered[t])
            )
            yield RoundRecord(self.run, t, probs, agents)


@dataclass(frozen=True)
class RunSummary:
    run: int
    accuracy: tuple[float, ...]
    aggregate: float
    mean_agents: tuple[float, ...]
    approp_share: Optional[float]
    approp_by_problem: tuple[Optional[float], ...]


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    traces: list[RunTrace]
    summaries: list[RunSummary]

    def records(self) -> Iterator[RoundRecord]:
        for tr in self.traces:
            yield from tr.records()

    def mean(self, attr: str):
        vals = [getattr(s, attr) for s in self.summaries]
        if vals and isinstance(vals[0], tuple):
            return tuple(float(np.mean(col)) for col in zip(*vals))
        vals = [v for v in vals if v is not None]
        return float(np.mean(vals)) if vals else None


def summarize(trace: RunTrace) -> RunSummary:
    acc = trace.group_correct.mean(axis=0)
    mean_agents = trace.n_j.mean(axis=0)
    share = None
    by_problem: list[Optional[float]] = [None] * trace.n_j.shape[1]
    if trace.specialized:
        assigned = trace.assignment >= 0
        total = int(assigned.sum())
        if total:
            share = float((trace.appropriate == 1).sum() / total)
        for j in range(len(by_problem)):
            on_j = trace.assignment == j
            cnt = int(on_j.sum())
            if cnt:
                by_problem[j] = float((trace.appropriate[on_j] == 1).sum() / cnt)
    return RunSummary(
        run=trace.run,
        accuracy=tuple(float(a) for a in acc),
        aggregate=float(acc.mean()),
        mean_agents=tuple(float(x) for x in mean_agents),
        approp_share=share,
        approp_by_problem=tuple(by_problem),
    )


def approp_share_window(trace: RunTrace, agent: Optional[int] = None, start: int = 0,
                        stop: Optional[int] = None) -> Optional[float]:
    """Share of assigned agent-rounds in ``[start, stop)`` spent on an appropriate problem."""
    a = trace.assignment[start:stop]
    ap = trace.appropriate[start:stop]
    if agent is not None:
        a, ap = a[:, agent], ap[:, agent]
    assigned = a >= 0
    if not assigned.any():
        return None
    return float((ap[assigned] == 1).sum() / assigned.sum())


# -- per-run world ----------------------------------------------------------

class _World:
    """Mutable environment of one run: abilities, difficulties and derived tables."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.profiles: list[AbilityProfile] = list(config.agents)
        self.lambdas = [p.difficulty for p in config.problems]
        self.tiers = tuple(p.tier or "mid" for p in config.problems)
        self.events: dict[int, list] = {}
        for ev in config.dynamic_events:
            self.events.setdefault(ev.at_round, []).append(ev.event)
        self.specialized = any(p.overrides for p in self.profiles)
        self.refresh()

    def refresh(self):
        model = self.config.response_model
        self.acc = [[accuracy(model, prof.ability_for(j), lam) for j, lam in enumerate(self.lambdas)]
                    for prof in self.profiles]
        self.base = [p.base for p in self.profiles]
        self.appropriate = [set(p.overrides) for p in self.profiles]
        self.distances = [[abs(a - lam) for lam in self.lambdas] for a in self.base]
        tol = self.config.threshold_rule.neighbor_tolerance if isinstance(
            self.config.threshold_rule, al.Mailman) else 0.10
        self.neighbors = al.neighbors(self.lambdas, tol)

    def apply_events(self, t: int) -> bool:
        evs = self.events.get(t)
        if not evs:
            return False
        for e in evs:
            apply_dynamic_event(self, e)
        self.refresh()
        return True


def apply_dynamic_event(world: _World, event) -> None:
    """Apply one event to the run's world; learned state is left untouched."""
    if isinstance(event, SwapSpecializations):
        old = [dict(p.overrides) for p in world.profiles]
        world.profiles = [AbilityProfile(p.base, old[event.permutation[i]])
                          for i, p in enumerate(world.profiles)]
    elif isinstance(event, SetDifficulty):
        world.lambdas[event.problem] = event.difficulty
    else:
        raise TypeError(f"unknown event {event!r}")


def _empty_trace(run: int, T: int, n: int, m: int, specialized: bool) -> RunTrace:
    return RunTrace(
        run=run,
        n_j=np.zeros((T, m), dtype=np.int64),
        group_correct=np.zeros((T, m), dtype=np.int8),
        stimulus=np.zeros((T, m)),
        psi_group=np.zeros((T, m)),
        assignment=np.full((T, n), -1, dtype=np.int64),
        answered=np.full((T, n), -1, dtype=np.int8),
        appropriate=np.zeros((T, n), dtype=np.int8),
        specialized=specialized,
    )


def simulate_run(config: ScenarioConfig, run: int) -> RunTrace:
    """Round-by-round simulation of one run."""
    world = _World(config)
    params = config.params
    rule = config.decision_rule
    n, m, T = config.n_agents, config.n_problems, config.rounds
    answers = Stream.for_run(config.seed, run, ANSWERS)
    ties = Stream.for_run(config.seed, run, TIES)
    alloc = Stream.for_run(config.seed, run, ALLOCATION)
    order = Stream.for_run(config.seed, run, ORDER)
    state = al.AllocationState.initial(n, m, params, config.threshold_rule, world.appropriate)
    single = config.single_problem
    imitation = isinstance(rule, vt.Imitation)
    transition = config.transition_model
    trace = _empty_trace(run, T, n, m, world.specialized)
    omega_g, omega_i = params.omega_group, params.omega_individual

    for t in range(T):
        world.apply_events(t)
        assign = state.assignment
        if single:
            for i in range(n):
                assign[i] = 0
        else:
            for i in range(n):
                if assign[i] is not None:
                    al.maybe_quit(state, i, params.p_switch, alloc)
            for i in range(n):
                if assign[i] is None:
                    al.attempt_allocation(state, i, transition, alloc, world.base[i], world.distances[i])

        members: list[list[int]] = [[] for _ in range(m)]
        for i in range(n):
            if assign[i] is not None:
                members[assign[i]].append(i)
        uniforms = {i: answers.random() for i in range(n) if assign[i] is not None}

        correct: dict[int, bool] = {}
        for j in range(m):
            group = members[j]
            if not group:
                continue
            if imitation:
                accs = [world.acc[i][j] for i in group]
                seq = vt.answer_order(accs, rule.order, order)
                got = vt.imitate(accs, rule.chi, seq, [uniforms[i] for i in group])
                correct.update(zip(group, got))
            else:
                for i in group:
                    correct[i] = uniforms[i] < world.acc[i][j]

        for j in range(m):
            group = members[j]
            if group:
                ballots = [vt.BallotEntry(i, correct[i],
                                          vt.vote_weight(rule, world.base[i], world.acc[i][j],
                                                         state.psi_individual[i][j]))
                           for i in group]
                gc = 1 if vt.decide(rule, ballots, ties).correct else 0
            else:
                gc = 0
            trace.group_correct[t, j] = gc
            al.update_group_ema(state, j, gc, omega_g)
        for i, c in correct.items():
            al.update_individual_ema(state, i, assign[i], 1.0 if c else 0.0, omega_i)

        if not single:
            al.update_thresholds(state, config.threshold_rule, params, world.neighbors)
            al.update_stimuli(state, config.stimulus_rule, params, world.tiers)

        n_j = state.counts()
        for j in range(m):
            trace.n_j[t, j] = n_j[j]
            trace.stimulus[t, j] = state.stimuli[j]
            trace.psi_group[t, j] = state.psi_group[j]
        for i in range(n):
            a = assign[i]
            if a is not None:
                trace.assignment[t, i] = a
                trace.answered[t, i] = 1 if correct[i] else 0
                trace.appropriate[t, i] = 1 if a in world.appropriate[i] else 0
    return trace


def _log_odds(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, vt.WEIGHT_EPS, 1.0 - vt.WEIGHT_EPS)
    return np.log(p / (1.0 - p))


def simulate_single_problem_batch(config: ScenarioConfig, run: int) -> RunTrace:
    """Vectorised equivalent of :func:`simulate_run` for single-problem scenarios.

    Consumes each stream in the same order as the round loop, so both paths
    produce the same trace.
    """
    if not config.single_problem:
        raise ValueError("batch path only covers single-problem scenarios")
    world = _World(config)
    rule = config.decision_rule
    n, T = config.n_agents, config.rounds
    params = config.params
    answers = Stream.for_run(config.seed, run, ANSWERS)
    ties = Stream.for_run(config.seed, run, TIES)
    order = Stream.for_run(config.seed, run, ORDER)
    trace = _empty_trace(run, T, n, 1, world.specialized)

    cuts = sorted({0, T} | {r for r in world.events if 0 < r < T})
    psi_ind = np.full(n, 0.5)
    psi_g = 0.5
    og, oi = params.omega_group, params.omega_individual
    for a, b in zip(cuts, cuts[1:]):
        world.apply_events(a)
        L = b - a
        p = np.array([row[0] for row in world.acc])
        U = answers.randoms(L * n).reshape(L, n)
        if isinstance(rule, vt.Imitation):
            if rule.order == "random":
                keys = order.randoms(L * n).reshape(L, n)
                perm = np.argsort(keys, axis=1, kind="stable")
            else:
                fixed = vt.answer_order(p.tolist(), "best_first", order)
                perm = np.broadcast_to(np.array(fixed), (L, n))
            rows = np.arange(L)
            correct = np.zeros((L, n), dtype=bool)
            n_right = np.zeros(L)
            for pos in range(n):
                idx = perm[:, pos]
                pa = p[idx]
                prob = pa if pos == 0 else (1.0 - rule.chi) * pa + rule.chi * n_right / pos
                c = U[rows, idx] < prob
                correct[rows, idx] = c
                n_right += c
        else:
            correct = U < p

        if isinstance(rule, vt.OptimalWeighted) and rule.source == "empirical":
            est = np.empty((L, n))
            for t in range(L):
                est[t] = psi_ind
                psi_ind = oi * correct[t] + (1.0 - oi) * psi_ind
            weights = _log_odds(est)
        else:
            for t in range(L):
                psi_ind = oi * correct[t] + (1.0 - oi) * psi_ind
            if isinstance(rule, vt.AbilityWeighted):
                w = np.array(world.base, dtype=float)
            elif isinstance(rule, vt.OptimalWeighted):
                w = np.array([vt.optimal_weight(x) for x in p])
            else:
                w = np.ones(n)
            weights = np.broadcast_to(w, (L, n))

        margin = np.zeros(L)
        for i in range(n):
            margin += np.where(correct[:, i], weights[:, i], -weights[:, i])
        tie = np.abs(margin) <= vt.TIE_TOLERANCE
        gc = margin > vt.TIE_TOLERANCE
        k = int(tie.sum())
        if k:
            gc[tie] = ties.randoms(k) < 0.5

        psi_rec = np.empty(L)
        for t in range(L):
            psi_g = og * (1.0 if gc[t] else 0.0) + (1.0 - og) * psi_g
            psi_rec[t] = psi_g

        trace.group_correct[a:b, 0] = gc
        trace.psi_group[a:b, 0] = psi_rec
        trace.n_j[a:b, 0] = n
        trace.assignment[a:b] = 0
        trace.answered[a:b] = correct
        trace.appropriate[a:b] = [1 if 0 in s else 0 for s in world.appropriate]
    return trace


def _one_run(args) -> RunTrace:
    config, run, fast = args
    if fast and config.single_problem:
        return simulate_single_problem_batch(config, run)
    return simulate_run(config, run)


def run_scenario(config: ScenarioConfig, *, fast: bool = True, workers: int = 1) -> ScenarioResult:
    """Run every run of ``config``; run ``r`` draws from streams keyed ``(seed, r)``."""
    jobs = [(config, r, fast) for r in range(config.runs)]
    if workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_one_run, jobs))
    else:
        traces = [_one_run(j) for j in jobs]
    return ScenarioResult(config, traces, [summarize(tr) for tr in traces])


def single_problem_mode(config: ScenarioConfig, **kwargs) -> ScenarioResult:
    """Run ``config`` with allocation switched off; it must have exactly one problem."""
    if config.n_problems != 1:
        raise ConfigError("problems", "single-problem mode needs exactly one problem")
    if not config.single_problem:
        config = replace(config, single_problem=True)
    return run_scenario(config, **kwargs)


def standard_error(p: float, samples: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 1e-300) / samples)
