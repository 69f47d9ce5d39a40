"""Command execution: preconditions, effects, rewards, feedback text.

step() is a pure function of (state, command, spec): the incoming state is
copied, never mutated, and identical inputs always produce identical
outputs.  Failed actions still cost a move.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import EpisodeFinished
from ..gamespec import (
    CustomAction,
    GameSpec,
    canonical_instance,
    match_custom_instance,
    tracked_actions,
)
from .grammar import Command, admissible_commands
from .world import (
    WorldState,
    clear_flag,
    contents,
    eval_predicate,
    has_flag,
    in_scope,
    init_state,
    move_entity,
    set_flag,
)

CANT_SEE = "You can't see any such thing."
WASTED = "That's not something you can do here."


@dataclass(frozen=True)
class StepResult:
    feedback: str
    score_delta: int
    done: bool
    admissible: tuple[str, ...]
    room_description: str
    inventory_text: str


def init_world(spec: GameSpec, seed: int = 0) -> tuple[WorldState, StepResult]:
    """Fresh episode.  The seed is threaded through for future stochastic
    content; current games are fully deterministic."""
    del seed
    state = init_state(spec)
    feedback = spec.goal_text.strip() + "\n\n" + describe_room(state, spec)
    result = StepResult(
        feedback=feedback,
        score_delta=0,
        done=False,
        admissible=tuple(admissible_commands(state, spec)),
        room_description=describe_room(state, spec),
        inventory_text=describe_inventory(state),
    )
    return state, result


def apply_command(state: WorldState, cmd: Command, spec: GameSpec,
                  failure_penalty: int = 0) -> tuple[WorldState, str, int]:
    """The state transition alone: (next state, feedback, score delta).

    step() wraps this with the derived presentation (admissible commands,
    descriptions); exhaustive search calls it directly since it discards
    all of that.
    """
    if state.done:
        raise EpisodeFinished()
    nxt = state.copy()
    nxt.moves += 1

    if cmd.custom is not None:
        action = next(a for a in spec.custom_actions if a.name == cmd.custom)
        feedback = _run_custom(nxt, spec, action, dict(cmd.binding))
    else:
        feedback = _run_builtin(nxt, spec, cmd)

    if nxt.failed:
        # a fatal action ends the game; no rewards are evaluated for it
        delta = -failure_penalty
        nxt.done = True
    else:
        delta = _fire_rewards(nxt, spec)
        nxt.done = nxt.collected_rewards == set(range(len(spec.rewards)))
    return nxt, feedback, delta


def step(state: WorldState, cmd: Command, spec: GameSpec,
         failure_penalty: int = 0) -> tuple[WorldState, StepResult]:
    """Execute one command.  Raises EpisodeFinished on a terminal state."""
    nxt, feedback, delta = apply_command(state, cmd, spec, failure_penalty)
    result = StepResult(
        feedback=feedback,
        score_delta=delta,
        done=nxt.done,
        admissible=tuple(admissible_commands(nxt, spec)),
        room_description=describe_room(nxt, spec),
        inventory_text=describe_inventory(nxt),
    )
    return nxt, result


def waste_move(state: WorldState, spec: GameSpec) -> tuple[WorldState, StepResult]:
    """Charge a move for input the grammar rejected."""
    if state.done:
        raise EpisodeFinished()
    nxt = state.copy()
    nxt.moves += 1
    return nxt, StepResult(
        feedback=WASTED,
        score_delta=0,
        done=False,
        admissible=tuple(admissible_commands(nxt, spec)),
        room_description=describe_room(nxt, spec),
        inventory_text=describe_inventory(nxt),
    )


# --- reward logic ---------------------------------------------------------------

def _fire_rewards(state: WorldState, spec: GameSpec) -> int:
    delta = 0
    for i, reward in enumerate(spec.rewards):
        if i in state.collected_rewards:
            continue
        if eval_predicate(state, spec, reward.trigger):
            state.collected_rewards.add(i)
            state.score += reward.value
            delta += reward.value
    return delta


def _record(state: WorldState, spec: GameSpec, instance: str):
    if instance in tracked_actions(spec):
        state.completed_actions.add(instance)


# --- custom actions --------------------------------------------------------------

def _run_custom(state: WorldState, spec: GameSpec, action: CustomAction,
                binding: dict[str, str]) -> str:
    visible = in_scope(state, spec)
    if any(name not in visible for name in binding.values()):
        return CANT_SEE
    for pred in action.preconditions:
        if not eval_predicate(state, spec, pred, binding):
            return action.failure_text or "Nothing happens."
    for eff in action.effects:
        subject = eff.subject
        if subject.startswith("<") and subject.endswith(">"):
            subject = binding[subject[1:-1]]
        if eff.kind == "set_flag":
            set_flag(state, subject, eff.argument)
        elif eff.kind == "clear_flag":
            clear_flag(state, subject, eff.argument)
        elif eff.kind == "move_entity":
            move_entity(state, subject, eff.argument)
        else:
            move_entity(state, subject, "nowhere")
    if action.fatal:
        state.failed = True
    _record(state, spec, canonical_instance(action, binding))
    return action.success_text or "Done."


# --- built-in verbs ---------------------------------------------------------

def _run_builtin(state: WorldState, spec: GameSpec, cmd: Command) -> str:
    visible = in_scope(state, spec)

    if cmd.verb == "look":
        return describe_room(state, spec)
    if cmd.verb == "inventory":
        return describe_inventory(state)

    noun = cmd.noun
    if noun is not None and noun not in visible:
        return CANT_SEE
    entity = spec.entity(noun) if noun else None

    if cmd.verb == "examine":
        return _examine(state, spec, noun)

    if cmd.verb == "take":
        if noun in state.inventory:
            return f"You already have the {noun}."
        if not entity.portable:
            return f"The {noun} is fixed in place."
        move_entity(state, noun, "inventory")
        _record(state, spec, f"take {noun}")
        return f"You take the {noun}."

    if cmd.verb == "drop":
        if noun not in state.inventory:
            return f"You are not holding the {noun}."
        move_entity(state, noun, state.current_room)
        _record(state, spec, f"drop {noun}")
        return f"You drop the {noun}."

    if cmd.verb == "open":
        if not has_flag(state, noun, "openable"):
            return f"The {noun} is not something you can open."
        if has_flag(state, noun, "open"):
            return f"The {noun} is already open."
        clear_flag(state, noun, "closed")
        set_flag(state, noun, "open")
        _record(state, spec, f"open {noun}")
        inside = contents(state, noun, "in")
        if inside:
            return (f"You open the {noun}, revealing "
                    + _join_names(inside) + ".")
        return f"You open the {noun}."

    if cmd.verb == "close":
        if not has_flag(state, noun, "openable"):
            return f"The {noun} is not something you can close."
        if has_flag(state, noun, "closed"):
            return f"The {noun} is already closed."
        clear_flag(state, noun, "open")
        set_flag(state, noun, "closed")
        _record(state, spec, f"close {noun}")
        return f"You close the {noun}."

    if cmd.verb == "put":
        second = cmd.second_noun
        if second not in visible:
            return CANT_SEE
        if noun not in state.inventory:
            return f"You are not holding the {noun}."
        if noun == second or _holds(state, noun, second):
            return "You can't put something inside itself."
        target = spec.entity(second)
        if cmd.preposition == "in":
            if target.kind != "container":
                return f"The {second} can't contain things."
            if has_flag(state, second, "closed"):
                return f"The {second} is closed."
            move_entity(state, noun, f"in {second}")
            _record(state, spec, f"put {noun} in {second}")
            return f"You put the {noun} in the {second}."
        if target.kind != "supporter":
            return f"You can't put things on the {second}."
        move_entity(state, noun, f"on {second}")
        _record(state, spec, f"put {noun} on {second}")
        return f"You put the {noun} on the {second}."

    if cmd.verb == "turn":
        if not has_flag(state, noun, "switchable"):
            return f"The {noun} has no switch."
        if cmd.preposition == "on":
            if has_flag(state, noun, "on"):
                return f"The {noun} is already on."
            clear_flag(state, noun, "off")
            set_flag(state, noun, "on")
            _record(state, spec, f"turn on {noun}")
            return f"You turn on the {noun}."
        if has_flag(state, noun, "off"):
            return f"The {noun} is already off."
        clear_flag(state, noun, "on")
        set_flag(state, noun, "off")
        _record(state, spec, f"turn off {noun}")
        return f"You turn off the {noun}."

    return WASTED


def _holds(state: WorldState, outer: str, inner: str) -> bool:
    """True when inner sits (transitively) inside or on outer."""
    node, hops = inner, 0
    while hops <= len(state.locations):
        loc = state.locations.get(node, "")
        if not (loc.startswith("in ") or loc.startswith("on ")):
            return False
        node = loc[3:]
        if node == outer:
            return True
        hops += 1
    return False


def _examine(state: WorldState, spec: GameSpec, noun: str) -> str:
    entity = spec.entity(noun)
    parts = [entity.description or f"You see nothing special about the {noun}."]
    if has_flag(state, noun, "openable"):
        parts.append(f"The {noun} is "
                     + ("open." if has_flag(state, noun, "open") else "closed."))
    if entity.kind == "container" and (has_flag(state, noun, "open")
                                       or not has_flag(state, noun, "openable")):
        inside = contents(state, noun, "in")
        parts.append(f"In the {noun}: " + _join_names(inside) + "."
                     if inside else f"The {noun} is empty.")
    if entity.kind == "supporter":
        on_top = contents(state, noun, "on")
        if on_top:
            parts.append(f"On the {noun}: " + _join_names(on_top) + ".")
    if has_flag(state, noun, "switchable"):
        parts.append(f"The {noun} is currently "
                     + ("on." if has_flag(state, noun, "on") else "off."))
    return " ".join(parts)


# --- descriptions ----------------------------------------------------------------

def _join_names(names: list[str]) -> str:
    names = [f"a {n}" for n in names]
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " and " + names[-1]


def describe_room(state: WorldState, spec: GameSpec) -> str:
    room = spec.rooms[0]
    for r in spec.rooms:
        if r.name == state.current_room:
            room = r
    lines = [f"-= {room.name.title()} =-"]
    if room.description:
        lines.append(room.description)
    here = sorted(n for n, loc in state.locations.items()
                  if loc == state.current_room)
    if here:
        lines.append("You see " + _join_names(here) + ".")
    for name in here:
        entity = spec.entity(name)
        if entity.kind == "supporter":
            on_top = contents(state, name, "on")
            if on_top:
                lines.append(f"On the {name}: " + _join_names(on_top) + ".")
        elif entity.kind == "container" and has_flag(state, name, "open"):
            inside = contents(state, name, "in")
            if inside:
                lines.append(f"In the {name}: " + _join_names(inside) + ".")
    return "\n".join(lines)


def describe_inventory(state: WorldState) -> str:
    if not state.inventory:
        return "You are carrying nothing."
    return "You are carrying " + _join_names(sorted(state.inventory)) + "."
