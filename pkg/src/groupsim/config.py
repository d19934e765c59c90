"""Scenario configuration and its JSON form.

Variant fields (response model, rules, transition model, events) are
written as objects with a ``kind`` tag plus the variant's own fields, e.g.
``{"kind": "optimal_weighted", "source": "empirical"}``.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from . import allocation as al
from . import response as rs
from . import voting as vt


class ConfigError(ValueError):
    """Invalid scenario description; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Problem:
    difficulty: float
    tier: Optional[str] = None


@dataclass(frozen=True)
class SwapSpecializations:
    """Agent ``i`` takes over the override map of agent ``permutation[i]``."""

    permutation: tuple[int, ...]


@dataclass(frozen=True)
class SetDifficulty:
    problem: int
    difficulty: float


@dataclass(frozen=True)
class DynamicEvent:
    at_round: int
    event: Union[SwapSpecializations, SetDifficulty]


@dataclass(frozen=True)
class ScenarioConfig:
    agents: tuple[rs.AbilityProfile, ...]
    problems: tuple[Problem, ...]
    response_model: rs.ResponseModel = rs.MonotoneLogistic()
    decision_rule: vt.DecisionRule = vt.Majority()
    stimulus_rule: al.StimulusRule = al.FullPerformance()
    threshold_rule: al.ThresholdRule = al.PerformanceDynamic()
    transition_model: al.TransitionModel = al.Sigmoid()
    params: al.AllocationParams = al.AllocationParams()
    rounds: int = 1000
    runs: int = 1
    seed: int = 0
    dynamic_events: tuple[DynamicEvent, ...] = ()
    single_problem: Optional[bool] = None  # None: on exactly when there is one problem

    def __post_init__(self):
        if not self.agents:
            raise ConfigError("agents", "at least one agent is required")
        if not self.problems:
            raise ConfigError("problems", "at least one problem is required")
        if self.rounds < 1:
            raise ConfigError("rounds", "must be >= 1")
        if self.runs < 1:
            raise ConfigError("runs", "must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if self.single_problem is None:
            object.__setattr__(self, "single_problem", len(self.problems) == 1)
        if self.single_problem and len(self.problems) != 1:
            raise ConfigError("problems", "single-problem mode needs exactly one problem")
        m = len(self.problems)
        for i, a in enumerate(self.agents):
            for j in a.overrides:
                if not 0 <= j < m:
                    raise ConfigError(f"agents.{i}.overrides.{j}", "no such problem")
        for k, ev in enumerate(self.dynamic_events):
            e = ev.event
            if isinstance(e, SwapSpecializations) and sorted(e.permutation) != list(range(len(self.agents))):
                raise ConfigError(f"dynamic_events.{k}.event.permutation", "not a permutation of the agents")
            if isinstance(e, SetDifficulty) and not 0 <= e.problem < m:
                raise ConfigError(f"dynamic_events.{k}.event.problem", "no such problem")
        if not self.single_problem and m > len(self.agents):
            warnings.warn(f"{m} problems for {len(self.agents)} agents; some problems will go unserved",
                          stacklevel=2)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_problems(self) -> int:
        return len(self.problems)

    def with_overrides(self, overrides: dict[str, Any]) -> "ScenarioConfig":
        data = to_dict(self)
        for path, value in overrides.items():
            set_path(data, path, value)
        return from_dict(data)


# -- kind registry ----------------------------------------------------------

_KINDS: dict[str, dict[str, type]] = {
    "response_model": {
        "monotone_logistic": rs.MonotoneLogistic,
        "three_param_logistic": rs.ThreeParamLogistic,
        "single_peaked": rs.SinglePeaked,
    },
    "decision_rule": {
        "majority": vt.Majority,
        "ability_weighted": vt.AbilityWeighted,
        "optimal_weighted": vt.OptimalWeighted,
        "imitation": vt.Imitation,
    },
    "stimulus_rule": {
        "standard": al.Standard,
        "full_performance": al.FullPerformance,
        "simplified_performance": al.SimplifiedPerformance,
        "difficulty_scaled": al.DifficultyScaled,
        "group_performance_scaled": al.GroupPerformanceScaled,
        "generalized_mean_scaled": al.GeneralizedMeanScaled,
    },
    "threshold_rule": {
        "static_specialized": al.StaticSpecialized,
        "standard_dynamic": al.StandardDynamic,
        "performance_dynamic": al.PerformanceDynamic,
        "mailman": al.Mailman,
    },
    "transition_model": {
        "sigmoid": al.Sigmoid,
        "noisy_sigmoid": al.NoisySigmoid,
        "mailman_sigmoid": al.MailmanSigmoid,
    },
    "event": {
        "swap_specializations": SwapSpecializations,
        "set_difficulty": SetDifficulty,
    },
}
_KIND_OF = {cls: name for table in _KINDS.values() for name, cls in table.items()}


def _plain_fields(obj) -> dict:
    # float-typed fields are written as floats so 8 and 8.0 serialise alike
    out = {}
    for f in dataclasses.fields(obj):
        v = getattr(obj, f.name)
        if isinstance(v, tuple):
            v = list(v)
        elif f.type in ("float", "Optional[float]") and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        out[f.name] = v
    return out


def _variant_to_dict(obj) -> dict:
    return {"kind": _KIND_OF[type(obj)], **_plain_fields(obj)}


def _float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _variant_from_dict(group: str, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected an object with a 'kind' field")
    kind = data.get("kind")
    table = _KINDS[group]
    if kind not in table:
        raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}; expected one of {sorted(table)}")
    cls = table[kind]
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key == "kind":
            continue
        if key not in names:
            raise ConfigError(f"{path}.{key}", f"unknown field for {kind}")
        kwargs[key] = tuple(value) if isinstance(value, list) else value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None


def to_dict(cfg: ScenarioConfig) -> dict:
    params = _plain_fields(cfg.params)
    return {
        "agents": [
            {"base": float(a.base), "overrides": {str(j): float(v) for j, v in sorted(a.overrides.items())}}
            for a in cfg.agents
        ],
        "problems": [
            {"difficulty": float(p.difficulty), **({"tier": p.tier} if p.tier is not None else {})}
            for p in cfg.problems
        ],
        "response_model": _variant_to_dict(cfg.response_model),
        "decision_rule": _variant_to_dict(cfg.decision_rule),
        "stimulus_rule": _variant_to_dict(cfg.stimulus_rule),
        "threshold_rule": _variant_to_dict(cfg.threshold_rule),
        "transition_model": _variant_to_dict(cfg.transition_model),
        "params": params,
        "rounds": cfg.rounds,
        "runs": cfg.runs,
        "seed": cfg.seed,
        "dynamic_events": [
            {"at_round": ev.at_round, "event": _variant_to_dict(ev.event)} for ev in cfg.dynamic_events
        ],
        "single_problem": cfg.single_problem,
    }


_TOP_LEVEL = {
    "agents", "problems", "response_model", "decision_rule", "stimulus_rule", "threshold_rule",
    "transition_model", "params", "rounds", "runs", "seed", "dynamic_events", "single_problem",
}


def from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("", "scenario must be an object")
    for key in data:
        if key not in _TOP_LEVEL:
            raise ConfigError(key, "unknown field")
    for key in ("agents", "problems"):
        if key not in data:
            raise ConfigError(key, "missing required field")
        if not isinstance(data[key], list) or not data[key]:
            raise ConfigError(key, "must be a non-empty list")

    agents = []
    for i, a in enumerate(data["agents"]):
        path = f"agents.{i}"
        if not isinstance(a, dict) or "base" not in a:
            raise ConfigError(f"{path}.base", "missing required field")
        overrides = {}
        for j, v in (a.get("overrides") or {}).items():
            try:
                jj = int(j)
            except ValueError:
                raise ConfigError(f"{path}.overrides.{j}", "problem index must be an integer") from None
            overrides[jj] = _float(v, f"{path}.overrides.{j}")
        base = _float(a["base"], f"{path}.base")
        try:
            agents.append(rs.AbilityProfile(base, overrides))
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None

    problems = []
    for j, p in enumerate(data["problems"]):
        path = f"problems.{j}"
        if not isinstance(p, dict) or "difficulty" not in p:
            raise ConfigError(f"{path}.difficulty", "missing required field")
        lam = _float(p["difficulty"], f"{path}.difficulty")
        if lam < 0:
            raise ConfigError(f"{path}.difficulty", "must be non-negative")
        tier = p.get("tier")
        if tier is not None and tier not in ("low", "mid", "high"):
            raise ConfigError(f"{path}.tier", f"unknown tier {tier!r}")
        problems.append(Problem(lam, tier))

    kwargs: dict[str, Any] = {"agents": tuple(agents), "problems": tuple(problems)}
    for group in ("response_model", "decision_rule", "stimulus_rule", "threshold_rule", "transition_model"):
        if group in data:
            kwargs[group] = _variant_from_dict(group, data[group], group)

    if "params" in data:
        raw = data["params"]
        if not isinstance(raw, dict):
            raise ConfigError("params", "expected an object")
        names = {f.name for f in dataclasses.fields(al.AllocationParams)}
        pk = {}
        for key, value in raw.items():
            if key not in names:
                raise ConfigError(f"params.{key}", "unknown field")
            pk[key] = None if value is None and key == "beta" else _float(value, f"params.{key}")
        try:
            kwargs["params"] = al.AllocationParams(**pk)
        except ValueError as exc:
            raise ConfigError("params", str(exc)) from None

    for key in ("rounds", "runs", "seed"):
        if key in data:
            kwargs[key] = _int(data[key], key)
    if "single_problem" in data:
        if data["single_problem"] is not None and not isinstance(data["single_problem"], bool):
            raise ConfigError("single_problem", "expected true, false or null")
        kwargs["single_problem"] = data["single_problem"]

    events = []
    for k, ev in enumerate(data.get("dynamic_events") or []):
        path = f"dynamic_events.{k}"
        if not isinstance(ev, dict) or "at_round" not in ev or "event" not in ev:
            raise ConfigError(path, "expected {at_round, event}")
        events.append(DynamicEvent(_int(ev["at_round"], f"{path}.at_round"),
                                   _variant_from_dict("event", ev["event"], f"{path}.event")))
    kwargs["dynamic_events"] = tuple(events)

    try:
        return ScenarioConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("", str(exc)) from None


def dumps(cfg: ScenarioConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2, sort_keys=False)


def loads(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"not valid JSON: {exc}") from None
    return from_dict(data)


def set_path(data: dict, path: str, value) -> None:
    """Assign ``value`` at a dotted path such as ``agents.0.base`` or
    ``decision_rule.chi``. Every segment but the last must already exist."""
    keys = path.split(".")
    node = data
    for depth, key in enumerate(keys[:-1]):
        node = _step(node, key, ".".join(keys[: depth + 1]))
    last = keys[-1]
    if isinstance(node, list):
        idx = _index(node, last, path)
        node[idx] = value
    elif isinstance(node, dict):
        node[last] = value
    else:
        raise ConfigError(path, "cannot assign into a scalar")


def get_path(data: dict, path: str):
    node = data
    keys = path.split(".")
    for depth, key in enumerate(keys):
        node = _step(node, key, ".".join(keys[: depth + 1]))
    return node


def _step(node, key: str, path: str):
    if isinstance(node, list):
        return node[_index(node, key, path)]
    if isinstance(node, dict):
        if key not in node:
            raise ConfigError(path, "no such field")
        return node[key]
    raise ConfigError(path, "cannot index into a scalar")


def _index(node: list, key: str, path: str) -> int:
    try:
        idx = int(key)
    except ValueError:
        raise ConfigError(path, "list index must be an integer") from None
    if not 0 <= idx < len(node):
        raise ConfigError(path, "list index out of range")
    return idx

