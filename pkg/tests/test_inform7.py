"""Inform 7 export: structural completeness and determinism."""

from __future__ import annotations

import json

import pytest

from questforge.errors import UnsupportedConstruct
from questforge.gamespec import parse_spec
from questforge.inform7 import emit_inform7

from test_gamespec import minimal_game


def spec_with_custom():
    data = minimal_game()
    data["actions"]["custom"] = [{
        "name": "unlock",
        "template": "unlock <container> with <portable>",
        "preconditions": [{"subject": "<portable>",
                           "relation": "in_inventory"}],
        "effects": [{"kind": "clear_flag", "subject": "<container>",
                     "argument": "closed"},
                    {"kind": "set_flag", "subject": "<container>",
                     "argument": "open"}],
        "success": "The lock clicks open.",
        "failure": "You need the right tool.",
    }]
    return parse_spec(json.dumps(data))


def test_every_room_and_entity_declared():
    spec = spec_with_custom()
    source = emit_inform7(spec)
    assert "The cell is a room." in source
    for entity in spec.entities:
        declarations = [line for line in source.splitlines()
                        if line.startswith(f"The {entity.name} is a ")]
        assert len(declarations) == 1


def test_custom_action_names_appear_as_rule_headers():
    spec = spec_with_custom()
    source = emit_inform7(spec)
    for action in spec.custom_actions:
        headers = [line for line in source.splitlines()
                   if line.startswith("Carry out") and action.name in line]
        assert headers, f"no Carry out rule for {action.name}"


def test_one_scoring_rule_per_reward():
    spec = spec_with_custom()
    source = emit_inform7(spec)
    assert source.count("increase the score by") == len(spec.rewards)
    assert f"The maximum score is {sum(r.value for r in spec.rewards)}." in source


def test_output_is_deterministic():
    data = minimal_game()
    a = emit_inform7(parse_spec(json.dumps(data)))
    b = emit_inform7(parse_spec(json.dumps(data)))
    assert a == b


def test_unmappable_flag_rejected():
    data = minimal_game()
    data["entities"][0]["properties"] = ["stage_2"]
    spec = parse_spec(json.dumps(data))
    with pytest.raises(UnsupportedConstruct) as err:
        emit_inform7(spec)
    assert "stage_2" in str(err.value)


def test_goal_text_and_title_present():
    spec = spec_with_custom()
    source = emit_inform7(spec)
    assert source.startswith('"Mini"')
    assert "Take the key." in source
