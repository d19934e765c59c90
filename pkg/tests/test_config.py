import json
import warnings

import pytest

from groupsim import allocation as al
from groupsim import voting as vt
from groupsim.config import (
    ConfigError, DynamicEvent, Problem, ScenarioConfig, SetDifficulty, SwapSpecializations,
    dumps, from_dict, get_path, loads, set_path, to_dict,
)
from groupsim.response import AbilityProfile, ThreeParamLogistic


def make(**kw):
    base = dict(agents=(AbilityProfile(8, {0: 24}), AbilityProfile(8, {1: 24})),
                problems=(Problem(10), Problem(10)))
    base.update(kw)
    return ScenarioConfig(**base)


def test_round_trip_default():
    cfg = make()
    assert from_dict(to_dict(cfg)) == cfg
    assert loads(dumps(cfg)) == cfg


def test_round_trip_every_variant():
    cfg = make(
        response_model=ThreeParamLogistic(a=1.0, b=4.0, c=0.1),
        decision_rule=vt.Imitation(chi=0.25, order="best_first"),
        stimulus_rule=al.DifficultyScaled(0.5, 2.0, ("low", "high")),
        threshold_rule=al.Mailman(3.0, 1.0, 0.2),
        transition_model=al.MailmanSigmoid(1.0, 100.0),
        params=al.AllocationParams(beta=2.5, delta=1.0),
        dynamic_events=(DynamicEvent(5, SwapSpecializations((1, 0))), DynamicEvent(7, SetDifficulty(1, 3.0))),
        rounds=20, runs=3, seed=2**63,
    )
    again = loads(dumps(cfg))
    assert again == cfg
    assert dumps(again) == dumps(cfg)


def test_missing_field_named():
    data = to_dict(make())
    del data["problems"]
    with pytest.raises(ConfigError) as exc:
        from_dict(data)
    assert exc.value.path == "problems"


@pytest.mark.parametrize("path,value,where", [
    ("decision_rule.kind", "plurality", "decision_rule.kind"),
    ("decision_rule.chi", 0.3, "decision_rule.chi"),
    ("agents.0.base", "eight", "agents.0.base"),
    ("problems.0.difficulty", -1, "problems.0.difficulty"),
    ("params.colour", 1, "params.colour"),
    ("rounds", 0, "rounds"),
    ("agents.0.overrides.5", 3, "agents.0.overrides.5"),
])
def test_bad_values_name_their_path(path, value, where):
    data = to_dict(make())
    set_path(data, path, value)
    with pytest.raises(ConfigError) as exc:
        from_dict(data)
    assert exc.value.path == where


def test_unknown_top_level_field():
    data = to_dict(make())
    data["colour"] = "red"
    with pytest.raises(ConfigError, match="colour"):
        from_dict(data)


def test_not_json():
    with pytest.raises(ConfigError):
        loads("{nope")


def test_paths():
    data = to_dict(make())
    assert get_path(data, "agents.1.overrides.1") == 24
    set_path(data, "params.delta", 2.0)
    assert get_path(data, "params.delta") == 2.0
    for bad in ("agents.9.base", "agents.x", "nothing.here", "rounds.x"):
        with pytest.raises(ConfigError):
            get_path(data, bad)


def test_with_overrides():
    cfg = make().with_overrides({"decision_rule": {"kind": "optimal_weighted", "source": "empirical"},
                                 "agents.0.base": 5, "runs": 4})
    assert cfg.decision_rule == vt.OptimalWeighted("empirical")
    assert cfg.agents[0].base == 5 and cfg.runs == 4


def test_more_problems_than_agents_warns():
    with pytest.warns(UserWarning):
        ScenarioConfig(agents=(AbilityProfile(1),), problems=(Problem(1), Problem(2)))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ScenarioConfig(agents=(AbilityProfile(1),), problems=(Problem(1),), single_problem=True)


def test_structural_errors():
    with pytest.raises(ConfigError):
        make(dynamic_events=(DynamicEvent(1, SwapSpecializations((0, 0))),))
    with pytest.raises(ConfigError):
        make(dynamic_events=(DynamicEvent(1, SetDifficulty(4, 1.0)),))
    with pytest.raises(ConfigError):
        make(single_problem=True)
    with pytest.raises(ConfigError):
        make(agents=())
    with pytest.raises(ConfigError):
        make(seed=-1)


def test_configs_directory_loads():
    from pathlib import Path
    files = sorted((Path(__file__).parent.parent / "configs").glob("*.json"))
    assert files
    for f in files:
        cfg = loads(f.read_text())
        assert json.loads(dumps(cfg)) == json.loads(f.read_text())


def test_single_problem_defaults_to_problem_count():
    one = ScenarioConfig(agents=(AbilityProfile(1),), problems=(Problem(1),))
    assert one.single_problem is True
    assert make().single_problem is False
    off = ScenarioConfig(agents=(AbilityProfile(1),), problems=(Problem(1),), single_problem=False)
    assert off.single_problem is False and from_dict(to_dict(off)) == off
    data = to_dict(make())
    data["single_problem"] = None
    assert from_dict(data).single_problem is False
