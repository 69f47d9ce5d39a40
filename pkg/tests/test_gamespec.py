"""Schema parsing and validation for .game.json documents."""

from __future__ import annotations

import copy
import json
import random

import pytest

from questforge.errors import MalformedJson, SpecError
from questforge.gamespec import (
    GameSpec,
    Violation,
    max_score,
    parse_spec,
    resolve_action_instance,
    serialize_spec,
    tracked_actions,
    validate_schema,
)


def minimal_game() -> dict:
    return {
        "id": "mini",
        "title": "Mini",
        "goal": "Take the key.",
        "max_steps": 20,
        "rooms": [{"name": "cell", "description": "A bare cell."}],
        "entities": [
            {"name": "key", "kind": "portable", "location": "cell"},
            {"name": "box", "kind": "container", "location": "cell",
             "properties": ["openable", "closed"]},
        ],
        "actions": {"default": ["take", "drop", "open", "close"], "custom": []},
        "rewards": [
            {"trigger": {"subject": "", "relation": "action_completed",
                         "argument": "take key"}, "value": 1},
        ],
        "task_graph": {"nodes": ["take key"], "edges": [], "parallel": []},
    }


def parse(data: dict) -> GameSpec:
    return parse_spec(json.dumps(data))


def test_minimal_game_parses():
    spec = parse(minimal_game())
    assert spec.id == "mini"
    assert spec.room_names() == {"cell"}
    assert spec.entity("key").kind == "portable"
    assert max_score(spec) == 1


def test_broken_json_raises_malformed():
    with pytest.raises(MalformedJson):
        parse_spec("{not json")


def test_empty_object_reports_missing_keys():
    with pytest.raises(SpecError) as err:
        parse_spec("{}")
    paths = {v.path for v in err.value.violations}
    assert "$.id" in paths
    assert "$.rooms" in paths
    assert "$.rewards" in paths


def test_non_object_top_level():
    with pytest.raises(SpecError):
        parse_spec("[1, 2]")


def test_dangling_location_reference():
    data = minimal_game()
    data["entities"][0]["location"] = "in kettle"
    with pytest.raises(SpecError) as err:
        parse(data)
    dangling = [v for v in err.value.violations if v.kind == "dangling"]
    assert any(v.name == "kettle" for v in dangling)


def test_duplicate_entity_name():
    data = minimal_game()
    data["entities"].append({"name": "key", "kind": "portable",
                             "location": "cell"})
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any("duplicate" in v.message for v in err.value.violations)


def test_self_containment_rejected():
    data = minimal_game()
    data["entities"].append({"name": "pot", "kind": "container",
                             "location": "in pot"})
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any("contains itself" in v.message for v in err.value.violations)


def test_containment_cycle_through_two_entities():
    data = minimal_game()
    data["entities"] += [
        {"name": "pot", "kind": "container", "location": "in crate"},
        {"name": "crate", "kind": "container", "location": "in pot"},
    ]
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any("contains itself" in v.message for v in err.value.violations)


def test_openable_needs_open_or_closed():
    data = minimal_game()
    data["entities"][1]["properties"] = ["openable"]
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any("openable" in v.message for v in err.value.violations)


def test_switchable_cannot_be_both_on_and_off():
    data = minimal_game()
    data["entities"].append({"name": "lamp", "kind": "device",
                             "location": "cell",
                             "properties": ["switchable", "on", "off"]})
    with pytest.raises(SpecError):
        parse(data)


def test_unknown_verb_rejected():
    data = minimal_game()
    data["actions"]["default"].append("teleport")
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any("teleport" in v.message for v in err.value.violations)


def test_reward_value_must_be_positive():
    data = minimal_game()
    data["rewards"][0]["value"] = 0
    with pytest.raises(SpecError):
        parse(data)


def test_reward_trigger_must_resolve():
    data = minimal_game()
    data["rewards"][0]["trigger"]["argument"] = "polish key"
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any(v.name == "polish key" for v in err.value.violations)


def test_task_graph_cycle_detected():
    data = minimal_game()
    data["task_graph"]["nodes"] = ["take key", "drop key"]
    data["task_graph"]["edges"] = [["take key", "drop key"],
                                   ["drop key", "take key"]]
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any("cycle" in v.message for v in err.value.violations)


def test_task_node_must_be_performable():
    data = minimal_game()
    data["task_graph"]["nodes"] = ["take key", "sing loudly"]
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any(v.name == "sing loudly" for v in err.value.violations)


def test_max_score_sums_reward_values():
    data = minimal_game()
    data["actions"]["default"] += ["put-in"]
    data["rewards"] = [
        {"trigger": {"subject": "", "relation": "action_completed",
                     "argument": a}, "value": val}
        for a, val in [("take key", 1), ("open box", 1),
                       ("close box", 1), ("put key in box", 2)]
    ]
    data["task_graph"]["nodes"] = []
    spec = parse(data)
    assert max_score(spec) == 5


def test_custom_action_slots_and_matching():
    data = minimal_game()
    data["actions"]["custom"] = [{
        "name": "unlock",
        "template": "unlock <container> with <portable>",
        "preconditions": [
            {"subject": "<portable>", "relation": "in_inventory"},
            {"subject": "<container>", "relation": "has_flag",
             "argument": "closed"},
        ],
        "effects": [
            {"kind": "clear_flag", "subject": "<container>",
             "argument": "closed"},
            {"kind": "set_flag", "subject": "<container>", "argument": "open"},
        ],
        "success": "The lock clicks open.",
    }]
    spec = parse(data)
    assert resolve_action_instance(spec, "unlock box with key") == "custom"
    assert resolve_action_instance(spec, "unlock key with box") is None
    assert resolve_action_instance(spec, "take key") == "default"
    assert resolve_action_instance(spec, "take box") == "default"
    assert resolve_action_instance(spec, "eat key") is None


def test_unused_slot_is_an_error():
    data = minimal_game()
    data["actions"]["custom"] = [{
        "name": "wave",
        "template": "wave <portable>",
        "preconditions": [],
        "effects": [{"kind": "set_flag", "subject": "box",
                     "argument": "waved_at"}],
    }]
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any("never used" in v.message for v in err.value.violations)


def test_undeclared_flag_in_precondition():
    data = minimal_game()
    data["actions"]["custom"] = [{
        "name": "shake",
        "template": "shake <container>",
        "preconditions": [{"subject": "<container>", "relation": "has_flag",
                           "argument": "haunted"}],
        "effects": [{"kind": "set_flag", "subject": "<container>",
                     "argument": "shaken"}],
    }]
    with pytest.raises(SpecError) as err:
        parse(data)
    assert any(v.name == "haunted" for v in err.value.violations)


def test_names_are_lowercased():
    data = minimal_game()
    data["entities"][0]["name"] = "Key"
    data["rooms"][0]["name"] = "Cell"
    data["entities"][0]["location"] = "Cell"
    data["entities"][1]["location"] = "Cell"
    spec = parse(data)
    assert spec.entity("key") is not None
    assert spec.room_names() == {"cell"}


def test_round_trip_preserves_spec():
    data = minimal_game()
    data["actions"]["custom"] = [{
        "name": "unlock",
        "template": "unlock <container> with <portable>",
        "aliases": ["open <container> using <portable>"],
        "preconditions": [{"subject": "<portable>",
                           "relation": "in_inventory"}],
        "effects": [{"kind": "set_flag", "subject": "<container>",
                     "argument": "open"},
                    {"kind": "clear_flag", "subject": "<container>",
                     "argument": "closed"}],
        "success": "Click.",
        "failure": "It will not budge.",
        "fatal": False,
    }]
    spec = parse(data)
    again = parse_spec(serialize_spec(spec))
    assert again == spec
    assert parse_spec(serialize_spec(again)) == again


def test_round_trip_random_property_sets():
    rng = random.Random(7)
    flags = ["openable", "closed", "edible", "filled", "empty", "portable"]
    for _ in range(25):
        data = minimal_game()
        chosen = [f for f in flags if rng.random() < 0.5]
        if "openable" in chosen and "closed" not in chosen:
            chosen.append("closed")
        data["entities"][1]["properties"] = chosen
        try:
            spec = parse(data)
        except SpecError:
            continue
        assert parse_spec(serialize_spec(spec)) == spec


def test_tracked_actions_cover_graph_rewards_and_preconditions():
    data = minimal_game()
    data["actions"]["custom"] = [{
        "name": "polish",
        "template": "polish box",
        "preconditions": [{"subject": "", "relation": "action_completed",
                           "argument": "open box"}],
        "effects": [{"kind": "set_flag", "subject": "box",
                     "argument": "polished"}],
    }]
    spec = parse(data)
    tracked = tracked_actions(spec)
    assert "take key" in tracked        # reward trigger and task node
    assert "open box" in tracked        # action_completed precondition
    assert "close box" not in tracked   # performable but never referenced


def test_violation_str_and_spec_error_message():
    v = Violation("$.rooms", "at least one room is required")
    assert str(v) == "$.rooms: at least one room is required"
    data = minimal_game()
    data["rooms"] = []
    data["entities"] = []
    data["task_graph"] = {}
    data["rewards"] = []
    with pytest.raises(SpecError) as err:
        parse(data)
    assert "$.rooms" in str(err.value)


def test_validate_schema_on_valid_spec_returns_empty():
    spec = parse(minimal_game())
    assert validate_schema(spec) == []
