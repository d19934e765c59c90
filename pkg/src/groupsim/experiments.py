"""Named experiment presets with expected outcomes.

A preset is a set of named cases (one :class:`ScenarioConfig` each), a
function deriving scalar metrics from the finished runs, and a list of
:class:`Expectation` checks against those metrics. Metric names take the
form ``<case>.<metric>``; derived metrics carry plain names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import allocation as al
from . import voting as vt
from .config import ConfigError, DynamicEvent, Problem, ScenarioConfig, SwapSpecializations
from .engine import ScenarioResult, approp_share_window, run_scenario
from .response import AbilityProfile, SinglePeaked, ThreeParamLogistic, accuracy, MonotoneLogistic

RELATIONS = ("approx", "gt", "ge", "lt", "le")


@dataclass(frozen=True)
class Expectation:
    """``relation`` is ``approx`` (``|value - target| <= tolerance``) or one of
    ``gt ge lt le`` comparing the value with ``target``."""

    metric: str
    target: float
    tolerance: float = 0.0
    relation: str = "approx"
    provenance: str = ""

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")

    def holds(self, value: Optional[float]) -> bool:
        if value is None or math.isnan(value):
            return False
        if self.relation == "approx":
            return abs(value - self.target) <= self.tolerance
        return {
            "gt": value > self.target,
            "ge": value >= self.target,
            "lt": value < self.target,
            "le": value <= self.target,
        }[self.relation]

    def describe(self) -> str:
        if self.relation == "approx":
            return f"{self.metric} = {self.target:g} +/- {self.tolerance:g}"
        sym = {"gt": ">", "ge": ">=", "lt": "<", "le": "<="}[self.relation]
        return f"{self.metric} {sym} {self.target:g}"


Deriver = Callable[[dict[str, ScenarioResult]], dict[str, float]]
SweepSetter = Callable[[ScenarioConfig, Any], ScenarioConfig]


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    cases: dict[str, ScenarioConfig]
    expectations: tuple[Expectation, ...] = ()
    derive: Optional[Deriver] = None
    sweep_case: Optional[str] = None
    sweep_params: dict[str, SweepSetter] = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    expectation: Expectation
    value: Optional[float]
    passed: bool


@dataclass
class PresetReport:
    name: str
    seed: int
    metrics: dict[str, float]
    checks: list[Check]
    results: dict[str, ScenarioResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = [f"preset {self.name} (seed {self.seed})", "", "metrics:"]
        for k in sorted(self.metrics):
            lines.append(f"  {k} = {_fmt(self.metrics[k])}")
        lines += ["", "expectations:"]
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{tag}] {c.expectation.describe()} (got {_fmt(c.value)})")
            if c.expectation.provenance:
                lines.append(f"         reference: {c.expectation.provenance}")
        lines += ["", f"overall: {'PASS' if self.passed else 'FAIL'}"]
        return "\n".join(lines) + "\n"


def _fmt(v: Optional[float]) -> str:
    return "n/a" if v is None else f"{v:.6f}"


# -- metrics ----------------------------------------------------------------

def case_metrics(result: ScenarioResult) -> dict[str, float]:
    out = {"aggregate": result.mean("aggregate")}
    for j, a in enumerate(result.mean("accuracy")):
        out[f"accuracy.{j}"] = a
    for j, a in enumerate(result.mean("mean_agents")):
        out[f"mean_agents.{j}"] = a
    share = result.mean("approp_share")
    if share is not None:
        out["approp_share"] = share
    return out


def collect_metrics(results: dict[str, ScenarioResult], derive: Optional[Deriver] = None) -> dict[str, float]:
    metrics: dict[str, float] = {}
    for case, res in results.items():
        for k, v in case_metrics(res).items():
            metrics[f"{case}.{k}"] = v
    if derive is not None:
        metrics.update(derive(results))
    return metrics


def matching_share(result: ScenarioResult) -> float:
    """Share of assigned agent-rounds on the problem whose difficulty is
    closest to the agent's base ability."""
    cfg = result.config
    alphas = np.array([a.base for a in cfg.agents])
    lams = np.array([p.difficulty for p in cfg.problems])
    best = np.abs(alphas[:, None] - lams[None, :]).argmin(axis=1)
    hits = total = 0
    for tr in result.traces:
        on = tr.assignment >= 0
        hits += int((tr.assignment == best[None, :])[on].sum())
        total += int(on.sum())
    return hits / total if total else float("nan")


def mean_distance(result: ScenarioResult) -> float:
    """Mean ``|alpha_i - lambda_j|`` over assigned agent-rounds."""
    cfg = result.config
    alphas = np.array([a.base for a in cfg.agents])
    lams = np.array([p.difficulty for p in cfg.problems])
    acc = n = 0.0
    for tr in result.traces:
        on = tr.assignment >= 0
        d = np.abs(alphas[None, :] - lams[np.where(on, tr.assignment, 0)])
        acc += float(d[on].sum())
        n += int(on.sum())
    return acc / n if n else float("nan")


def _monotone(values: Sequence[float], decreasing: bool = False, slack: float = 0.0) -> float:
    pairs = zip(values, values[1:])
    if decreasing:
        ok = all(b <= a + slack for a, b in pairs)
    else:
        ok = all(b >= a - slack for a, b in pairs)
    return 1.0 if ok else 0.0


# -- scenario builders ------------------------------------------------------

def _single(alphas: Sequence[float], lam: float, rule: vt.DecisionRule, runs: int, rounds: int = 1000,
            response=MonotoneLogistic()) -> ScenarioConfig:
    return ScenarioConfig(
        agents=tuple(AbilityProfile(a) for a in alphas),
        problems=(Problem(lam),),
        response_model=response,
        decision_rule=rule,
        rounds=rounds,
        runs=runs,
        single_problem=True,
    )


def _specialized_pair(per_problem: int = 1, alpha: float = 8.0, lam: float = 10.0, **kw) -> ScenarioConfig:
    agents = tuple(AbilityProfile(alpha, {j: 3 * alpha}) for j in (0, 1) for _ in range(per_problem))
    return ScenarioConfig(agents=agents, problems=(Problem(lam), Problem(lam)), **kw)


def static_thresholds(ratio: float, theta_max: float = 100.0) -> al.StaticSpecialized:
    """Thresholds with ``no_approp / approp == ratio`` summing to ``theta_max``."""
    if not ratio > 0:
        raise ConfigError("ratio", "must be positive")
    return al.StaticSpecialized(theta_max / (1 + ratio), theta_max * ratio / (1 + ratio))


def _set_ratio(cfg: ScenarioConfig, ratio) -> ScenarioConfig:
    return replace(cfg, threshold_rule=static_thresholds(float(ratio), cfg.params.theta_max))


def _homogeneous12(stimulus: al.StimulusRule, params: al.AllocationParams) -> ScenarioConfig:
    return ScenarioConfig(
        agents=tuple(AbilityProfile(5.0) for _ in range(12)),
        problems=(Problem(3.0, "low"), Problem(5.0, "mid"), Problem(6.0, "high")),
        stimulus_rule=stimulus,
        threshold_rule=al.PerformanceDynamic(),
        params=params,
        rounds=1000,
        runs=30,
    )


# -- preset definitions -----------------------------------------------------

def _fig5_1() -> Preset:
    p = accuracy(MonotoneLogistic(), 1.0, 1.0)
    cases = {f"n{n}": _single([1.0] * n, 1.0, vt.Majority(), runs=30) for n in range(1, 11)}
    exps = [Expectation(f"n{n}.aggregate", vt.analytic_majority_accuracy(n, p), 0.015,
                        provenance="closed-form majority accuracy, 30 000 votes per group size")
            for n in range(1, 11)]
    exps.append(Expectation("n1.aggregate", 0.619, 0.015,
                            provenance="reported single-agent accuracy 61.9% at alpha = lambda = 1"))

    def derive(results):
        even_odd = max(abs(results[f"n{2 * k}"].mean("aggregate") - results[f"n{2 * k - 1}"].mean("aggregate"))
                       for k in range(1, 6))
        return {"max_even_odd_gap": even_odd}

    exps.append(Expectation("max_even_odd_gap", 0.02, relation="le",
                            provenance="even groups match the next smaller odd group"))
    return Preset("fig5_1_homogeneous", "Homogeneous group on one problem, 1 to 10 agents, alpha = lambda = 1.",
                  cases, tuple(exps), derive)


_RULES = {"majority": vt.Majority(), "alpha": vt.AbilityWeighted(), "optimal": vt.OptimalWeighted("true")}


def _fig5_2() -> Preset:
    cases = {}
    for bad in (5, 8):
        for k in range(9):
            for rname, rule in _RULES.items():
                cases[f"bad{bad}_k{k}_{rname}"] = _single([20.0] + [float(bad)] * k, 10.0, rule, runs=30)
    good = accuracy(MonotoneLogistic(), 20.0, 10.0)
    exps = [Expectation(f"bad5_k{k}_optimal.aggregate", good, 0.015,
                        provenance="optimal weighting stays flat at the good agent's 76.9%")
            for k in range(9)]

    def derive(results):
        out = {}
        for bad in (5, 8):
            k0 = results[f"bad{bad}_k0_majority"].mean("aggregate")
            k8 = results[f"bad{bad}_k8_majority"].mean("aggregate")
            out[f"bad{bad}_majority_drop"] = k0 - k8
            out[f"bad{bad}_optimal_minus_majority_k8"] = (
                results[f"bad{bad}_k8_optimal"].mean("aggregate") - k8)
        return out

    exps += [
        Expectation("bad5_majority_drop", 0.05, relation="ge",
                    provenance="majority voting degrades as near-random agents join"),
        Expectation("bad5_optimal_minus_majority_k8", 0.0, relation="gt",
                    provenance="weighted systems beat majority with many bad agents"),
    ]
    return Preset("fig5_2_bad_agents",
                  "One good agent (alpha 20) plus k bad agents (alpha 5 or 8), lambda 10, three voting systems.",
                  cases, tuple(exps), derive)


def _fig5_3() -> Preset:
    cases = {}
    for k in range(9):
        for rname, rule in _RULES.items():
            cases[f"k{k}_{rname}"] = _single([5.0] + [20.0] * k, 10.0, rule, runs=30)

    def derive(results):
        maj = [results[f"k{k}_majority"].mean("aggregate") for k in range(9)]
        opt = [results[f"k{k}_optimal"].mean("aggregate") for k in range(9)]
        return {
            "optimal_monotone": _monotone(opt, slack=0.015),
            "weighted_minus_majority_min": min(o - m for o, m in zip(opt, maj)),
            "k8_optimal": opt[-1],
        }

    exps = (
        Expectation("optimal_monotone", 1.0, provenance="accuracy grows as good agents are added"),
        Expectation("weighted_minus_majority_min", -0.015, relation="ge",
                    provenance="weighted systems are at least as good as majority"),
        Expectation("k8_optimal", 0.9, relation="gt", provenance="accuracy approaches 100% with many good agents"),
    )
    return Preset("fig5_3_good_agents", "One bad agent (alpha 5) plus k good agents (alpha 20), lambda 10.",
                  cases, exps, derive)


def _fig5_4() -> Preset:
    base = _specialized_pair(stimulus_rule=al.SimplifiedPerformance(), rounds=1000, runs=20)
    ratios = (1, 2, 3, 5)
    cases = {f"ratio{r}": _set_ratio(base, r) for r in ratios}

    def derive(results):
        shares = [results[f"ratio{r}"].mean("approp_share") for r in ratios]
        return {"monotone": _monotone(shares)}

    exps = (
        Expectation("ratio1.approp_share", 0.50, 0.03, provenance="equal thresholds allocate at random"),
        Expectation("ratio3.approp_share", 0.80, 0.05,
                    provenance="reported about 80% appropriate allocation at ratio 3"),
        Expectation("monotone", 1.0, provenance="share rises with the threshold ratio"),
    )
    return Preset("fig5_4_static_ratio",
                  "Two specialised agents (alpha 8, x3 on their problem), two problems lambda 10, static "
                  "thresholds summing to theta_max, swept over the no-approp/approp ratio.",
                  cases, exps, derive, sweep_case="ratio3", sweep_params={"ratio": _set_ratio})


def _fig5_5() -> Preset:
    common = dict(rounds=1000, runs=50)
    cases = {
        "a": _specialized_pair(1, threshold_rule=al.StandardDynamic(),
                               stimulus_rule=al.SimplifiedPerformance(), **common),
        "b": _specialized_pair(1, threshold_rule=al.PerformanceDynamic(),
                               stimulus_rule=al.SimplifiedPerformance(), **common),
        "c": _specialized_pair(2, threshold_rule=al.PerformanceDynamic(),
                               stimulus_rule=al.SimplifiedPerformance(), **common),
        "d": _specialized_pair(1, threshold_rule=al.PerformanceDynamic(),
                               stimulus_rule=al.FullPerformance(), **common),
    }

    def derive(results):
        b = results["b"].mean("approp_share")
        return {"c_minus_b": results["c"].mean("approp_share") - b,
                "d_minus_b": results["d"].mean("approp_share") - b}

    exps = (
        Expectation("a.approp_share", 0.50, 0.05, provenance="standard threshold update allocates at random"),
        Expectation("b.approp_share", 0.70, 0.05,
                    provenance="reported 70% appropriate allocation with performance-dependent thresholds"),
        Expectation("c_minus_b", 0.02, relation="gt", provenance="four agents allocate better than two"),
        Expectation("d_minus_b", 0.0, relation="gt", provenance="the agent-share stimulus term helps further"),
    )
    return Preset("fig5_5_alloc_cases_abcd",
                  "Dynamic thresholds with specialised agents: (a) standard, (b) performance-dependent, "
                  "(c) as (b) with four agents, (d) as (b) plus the agent-share stimulus term.",
                  cases, exps, derive)


def _fig5_6() -> Preset:
    cfg = _specialized_pair(1, threshold_rule=al.PerformanceDynamic(), stimulus_rule=al.FullPerformance(),
                            rounds=2500, runs=20,
                            dynamic_events=(DynamicEvent(1250, SwapSpecializations((1, 0))),))

    def derive(results):
        res = results["swap"]
        T = res.config.rounds
        out = {}
        for a in range(res.config.n_agents):
            pre = [approp_share_window(tr, a, T // 2 - 500, T // 2) for tr in res.traces]
            post = [approp_share_window(tr, a, T - 500, T) for tr in res.traces]
            out[f"agent{a}.pre_swap_share"] = float(np.mean([v for v in pre if v is not None]))
            out[f"agent{a}.final_share"] = float(np.mean([v for v in post if v is not None]))
        return out

    exps = tuple(Expectation(f"agent{a}.final_share", 0.6, relation="gt",
                             provenance="agents settle on their new appropriate problem after the swap")
                 for a in range(2))
    return Preset("fig5_6_dynamic_swap",
                  "Two specialised agents swap specialisations halfway through 2500 rounds.",
                  {"swap": cfg}, exps, derive)


_FIG57 = {"a": (1.0, 1.0), "b": (0.9, 1.1), "c": (0.8, 1.2), "d": (0.7, 1.3)}


def _fig5_7() -> Preset:
    params = al.AllocationParams(beta=1.5)
    cases = {c: _homogeneous12(al.DifficultyScaled(f_low, f_high), params) for c, (f_low, f_high) in _FIG57.items()}

    def derive(results):
        out = {}
        for c, res in results.items():
            n = res.mean("mean_agents")
            out[f"{c}.hard_minus_easy_agents"] = n[2] - n[0]
        out["hard_accuracy_monotone"] = _monotone([results[c].mean("accuracy")[2] for c in "abcd"])
        return out

    exps = (
        Expectation("d.hard_minus_easy_agents", 1.0, relation="ge",
                    provenance="agents move from the easiest to the hardest problem"),
        Expectation("hard_accuracy_monotone", 1.0,
                    provenance="accuracy on the hardest problem rises from case a to d"),
    )
    return Preset("fig5_7_difficulty_scaled",
                  "Twelve agents (alpha 5) on lambda 3/5/6 with tier-scaled delta and beta, cases a-d.",
                  cases, exps, derive)


def _fig5_8() -> Preset:
    P = al.AllocationParams
    cases = {
        "a": _homogeneous12(al.FullPerformance(), P(delta=4, beta=1, beta_prime=4)),
        "b": _homogeneous12(al.DifficultyScaled(0.9, 1.1), P(delta=4, beta=1, beta_prime=4)),
        "c": _homogeneous12(al.FullPerformance(), P(delta=5, beta=1, beta_prime=7)),
        "d": _homogeneous12(al.FullPerformance(psi_exponent=2.0), P(delta=4, beta=1, beta_prime=8)),
        "e": _homogeneous12(al.GroupPerformanceScaled(), P(delta=2, beta=2, beta_prime=4)),
        "f": _homogeneous12(al.GeneralizedMeanScaled(1.0), P(delta=2.5, beta=2, beta_prime=4)),
    }

    def derive(results):
        out = {}
        for c, res in results.items():
            acc = res.mean("accuracy")
            out[f"{c}.spread"] = max(acc) - min(acc)
        return out

    exps = (
        Expectation("f.spread", 0.05, relation="le",
                    provenance="generalized-mean rule gives nearly uniform accuracy across problems"),
    )
    return Preset("fig5_8_uniformize_cases",
                  "Attempts at uniform accuracy across lambda 3/5/6 with twelve alpha-5 agents, cases a-f.",
                  cases, exps, derive)


def _sec5_5() -> Preset:
    alphas = [float(a) for a in range(1, 8)]
    cases = {
        "majority": _single(alphas, 5.0, vt.Majority(), runs=50),
        "optimal_true": _single(alphas, 5.0, vt.OptimalWeighted("true"), runs=50),
        "optimal_empirical": _single(alphas, 5.0, vt.OptimalWeighted("empirical"), runs=50),
    }
    exps = (
        Expectation("majority.aggregate", 0.681, 0.015, provenance="reported 68.1% for majority voting"),
        Expectation("optimal_true.aggregate", 0.731, 0.015, provenance="reported 73.1% with true accuracies"),
        Expectation("optimal_empirical.aggregate", 0.728, 0.015,
                    provenance="reported 72.8% with running accuracy estimates"),
    )
    return Preset("sec5_5_empirical_weights",
                  "Seven agents alpha 1..7 on lambda 5: majority vs log-odds weights from true or estimated accuracy.",
                  cases, exps)


_CHIS = (0.0, 0.25, 0.5, 0.75, 1.0)


def _set_chi(cfg: ScenarioConfig, chi) -> ScenarioConfig:
    return replace(cfg, decision_rule=replace(cfg.decision_rule, chi=float(chi)))


def _fig5_9() -> Preset:
    alphas = [float(a) for a in range(1, 8)]
    cases = {f"chi{c:g}": _single(alphas, 5.0, vt.Imitation(c, "random"), runs=30) for c in _CHIS}

    def derive(results):
        return {"monotone_decreasing": _monotone([results[f"chi{c:g}"].mean("aggregate") for c in _CHIS],
                                                 decreasing=True)}

    exps = (
        Expectation("chi1.aggregate", 0.584, 0.015,
                    provenance="full imitation in random order gives the mean individual accuracy, 58.4%"),
        Expectation("monotone_decreasing", 1.0, provenance="accuracy falls as imitation rises"),
    )
    return Preset("fig5_9_imitation_random", "Imitation in random answering order, alpha 1..7, lambda 5.",
                  cases, exps, derive, sweep_case="chi1", sweep_params={"chi": _set_chi})


def _fig5_10() -> Preset:
    sets = {"uniform": [float(a) for a in range(1, 8)], "skewed": [4.0, 4.0, 4.0, 4.0, 5.0, 6.0, 7.0]}
    cases = {f"{s}_chi{c:g}": _single(al_, 5.0, vt.Imitation(c, "best_first"), runs=30)
             for s, al_ in sets.items() for c in _CHIS}

    def derive(results):
        return {"skewed_chi1_minus_chi0": results["skewed_chi1"].mean("aggregate")
                - results["skewed_chi0"].mean("aggregate")}

    best = accuracy(MonotoneLogistic(), 7.0, 5.0)
    exps = (
        Expectation("uniform_chi1.aggregate", best, 0.015,
                    provenance="full imitation of the best agent gives its accuracy, 69.3%"),
        Expectation("skewed_chi1.aggregate", best, 0.015,
                    provenance="full imitation of the best agent gives its accuracy, 69.3%"),
        Expectation("skewed_chi1_minus_chi0", 0.0, relation="lt",
                    provenance="imitation hurts a group that would otherwise out-vote its best member"),
    )
    return Preset("fig5_10_imitation_best", "Imitation with the best agent answering first, two ability sets.",
                  cases, exps, derive, sweep_case="skewed_chi1", sweep_params={"chi": _set_chi})


_SPREAD_ALPHAS = (2.0, 2.0, 4.0, 4.0, 6.0, 6.0, 8.0, 8.0)
_SPREAD_LAMS = (2.0, 4.0, 6.0, 8.0)


def _spread(response, threshold_rule, transition) -> ScenarioConfig:
    return ScenarioConfig(
        agents=tuple(AbilityProfile(a) for a in _SPREAD_ALPHAS),
        problems=tuple(Problem(l) for l in _SPREAD_LAMS),
        response_model=response,
        threshold_rule=threshold_rule,
        transition_model=transition,
        rounds=1000,
        runs=20,
    )


def _distance_metrics(results):
    out = {}
    for c, res in results.items():
        out[f"{c}.matching_share"] = matching_share(res)
        out[f"{c}.mean_distance"] = mean_distance(res)
    return out


def _sec6_1() -> Preset:
    mono = MonotoneLogistic()
    cases = {
        "threshold": _spread(mono, al.StandardDynamic(), al.Sigmoid()),
        "mailman": _spread(mono, al.Mailman(), al.MailmanSigmoid(mu=1.0, nu=100.0)),
    }

    def derive(results):
        out = _distance_metrics(results)
        out["distance_reduction"] = out["threshold.mean_distance"] - out["mailman.mean_distance"]
        return out

    exps = (
        Expectation("distance_reduction", 0.5, relation="ge",
                    provenance="distance term pulls agents toward problems with lambda close to alpha"),
    )
    return Preset("sec6_1_mailman",
                  "Agents alpha 2..8 on problems lambda 2..8 with the distance-aware transition and neighbour "
                  "threshold update, against the plain threshold model.", cases, exps, derive)


def _sec6_2() -> Preset:
    peak = SinglePeaked()
    cases = {"mailman": _spread(peak, al.Mailman(), al.MailmanSigmoid(mu=1.0, nu=100.0))}

    def derive(results):
        out = _distance_metrics(results)
        out["matching_over_random"] = out["mailman.matching_share"] - 1.0 / len(_SPREAD_LAMS)
        return out

    exps = (
        Expectation("matching_over_random", 0.15, relation="ge",
                    provenance="the distance-aware allocation suits single-peaked agents"),
    )
    return Preset("sec6_2_single_peaked",
                  "Single-peaked response with the distance-aware allocation; agents should find lambda near alpha.",
                  cases, exps, derive)


def _sec6_4() -> Preset:
    kw = dict(threshold_rule=al.PerformanceDynamic(), stimulus_rule=al.FullPerformance(), rounds=1000, runs=50)
    # accuracy depends on lambda/alpha only, so both scales share accuracies; the noise sd is 1/alpha
    cases = {
        "noiseless": _specialized_pair(1, 8.0, 10.0, transition_model=al.Sigmoid(), **kw),
        "noisy_high": _specialized_pair(1, 8.0, 10.0, transition_model=al.NoisySigmoid(), **kw),
        "noisy_low": _specialized_pair(1, 1.0, 1.25, transition_model=al.NoisySigmoid(), **kw),
    }

    def derive(results):
        ref = results["noiseless"].mean("approp_share")
        return {"high_gap": abs(results["noisy_high"].mean("approp_share") - ref),
                "low_minus_high": results["noisy_low"].mean("approp_share")
                - results["noisy_high"].mean("approp_share")}

    exps = (
        Expectation("high_gap", 0.05, relation="le", provenance="small noise barely changes the allocation"),
        Expectation("low_minus_high", -0.05, relation="lt",
                    provenance="low-ability agents allocate more randomly"),
    )
    return Preset("sec6_4_noisy_allocation",
                  "Log-normal noise on the transition probability with sd 1/alpha.", cases, exps, derive)


def _sec6_5() -> Preset:
    model = ThreeParamLogistic(a=1.0, b=4.0, c=0.0)
    alphas = [8.0, 1.0, 1.0, 2.0, 2.0]
    cases = {name: _single(alphas, 0.0, rule, runs=30, response=model)
             for name, rule in (("majority", vt.Majority()), ("optimal", vt.OptimalWeighted("true")))}
    accs = [accuracy(model, a, 0.0) for a in alphas]
    exps = (
        Expectation("majority.aggregate", vt.enumerate_group_accuracy(accs, [1.0] * len(accs)), 0.015,
                    provenance="exact enumeration over answer patterns"),
        Expectation("optimal.aggregate",
                    vt.enumerate_group_accuracy(accs, [vt.optimal_weight(p) for p in accs]), 0.015,
                    provenance="exact enumeration; negative weights invert worse-than-random votes"),
    )
    return Preset("sec6_5_worse_than_random",
                  "Three-parameter logistic agents, some below 50%: log-odds weights turn them into assets.",
                  cases, exps)


_BUILDERS = (_fig5_1, _fig5_2, _fig5_3, _fig5_4, _fig5_5, _fig5_6, _fig5_7, _fig5_8, _sec5_5, _fig5_9,
             _fig5_10, _sec6_1, _sec6_2, _sec6_4, _sec6_5)


def _registry() -> dict[str, Preset]:
    out = {}
    for build in _BUILDERS:
        p = build()
        out[p.name] = p
    return out


def list_presets() -> list[str]:
    return [b().name for b in _BUILDERS]


def get_preset(name: str) -> Preset:
    """Look up a preset by full name or by a unique short form such as ``sec5_5``."""
    reg = _registry()
    if name in reg:
        return reg[name]
    hits = [k for k in reg if k.startswith(name + "_")]
    if len(hits) == 1:
        return reg[hits[0]]
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(reg)}")


def _prepare(cfg: ScenarioConfig, seed: int, overrides: Optional[dict]) -> ScenarioConfig:
    cfg = replace(cfg, seed=seed)
    return cfg.with_overrides(overrides) if overrides else cfg


def run_preset(name: str, seed: int = 0, overrides: Optional[dict[str, Any]] = None,
               cases: Optional[Sequence[str]] = None, workers: int = 1) -> PresetReport:
    """Run a preset and check its expectations.

    ``overrides`` maps dotted config paths to values and applies to every
    case. ``cases`` restricts the run to a subset; expectations that need a
    skipped case are dropped.
    """
    preset = get_preset(name)
    chosen = list(preset.cases) if cases is None else list(cases)
    for c in chosen:
        if c not in preset.cases:
            raise KeyError(f"preset {name!r} has no case {c!r}")
    results = {c: run_scenario(_prepare(preset.cases[c], seed, overrides), workers=workers) for c in chosen}
    partial = len(chosen) != len(preset.cases)
    metrics = collect_metrics(results)
    if preset.derive is not None:
        try:
            metrics.update(preset.derive(results))
        except KeyError:
            if not partial:
                raise
    checks = [Check(e, metrics.get(e.metric), e.holds(metrics.get(e.metric)))
              for e in preset.expectations if not (partial and e.metric not in metrics)]
    return PresetReport(preset.name, seed, metrics, checks, results)


def sweep(name: str, parameter: str, values: Sequence[Any], seed: int = 0,
          case: Optional[str] = None, workers: int = 1) -> list[dict[str, Any]]:
    """Rerun one case of a preset for each value of ``parameter``.

    ``parameter`` is either a named sweep parameter of the preset (for
    example ``ratio``) or a dotted config path. Value ``k`` runs with seed
    ``seed + k``. Returns one row per value with the case metrics.
    """
    preset = get_preset(name)
    case = case or preset.sweep_case or next(iter(preset.cases))
    if case not in preset.cases:
        raise KeyError(f"preset {name!r} has no case {case!r}")
    base = preset.cases[case]
    rows = []
    for k, value in enumerate(values):
        if parameter in preset.sweep_params:
            cfg = replace(preset.sweep_params[parameter](base, value), seed=seed + k)
        else:
            cfg = _prepare(base, seed + k, {parameter: value})
        res = run_scenario(cfg, workers=workers)
        row: dict[str, Any] = {parameter: value}
        row.update(case_metrics(res))
        rows.append(row)
    return rows
