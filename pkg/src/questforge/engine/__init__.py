"""Deterministic runtime for declarative text games.

Split into three layers: :mod:`world` owns state, scope and predicate
evaluation; :mod:`grammar` turns player text into structured commands and
enumerates what can be typed; :mod:`runtime` executes commands, fires
rewards and renders feedback.
"""

from .world import (
    WorldState,
    canonical_key,
    eval_predicate,
    in_scope,
    init_state,
    state_hash,
)
from .grammar import Command, admissible_commands, parse_command
from .runtime import StepResult, apply_command, init_world, step, waste_move

__all__ = [
    "Command",
    "StepResult",
    "WorldState",
    "admissible_commands",
    "apply_command",
    "canonical_key",
    "eval_predicate",
    "in_scope",
    "init_state",
    "init_world",
    "parse_command",
    "state_hash",
    "step",
    "waste_move",
]
