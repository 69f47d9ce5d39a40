"""World state: entity placement, flags, scope and predicate evaluation.

State is held in plain containers and copied on every step, so the runtime
behaves as a pure function of (state, command) even though the structures
themselves are mutable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from ..gamespec import Entity, GameSpec, Predicate, parse_location


@dataclass
class WorldState:
    locations: dict[str, str]             # entity -> room | "in x" | "on x" | inventory | nowhere
    flags: dict[str, frozenset[str]]      # entity -> current flag set
    inventory: set[str]
    collected_rewards: set[int]           # indices into spec.rewards
    completed_actions: set[str]           # tracked canonical action instances
    score: int = 0
    moves: int = 0
    done: bool = False
    failed: bool = False
    current_room: str = ""

    def copy(self) -> WorldState:
        return WorldState(
            locations=dict(self.locations),
            flags=dict(self.flags),
            inventory=set(self.inventory),
            collected_rewards=set(self.collected_rewards),
            completed_actions=set(self.completed_actions),
            score=self.score,
            moves=self.moves,
            done=self.done,
            failed=self.failed,
            current_room=self.current_room,
        )


def init_state(spec: GameSpec) -> WorldState:
    state = WorldState(
        locations={e.name: e.location for e in spec.entities},
        flags={e.name: e.properties for e in spec.entities},
        inventory=set(),
        collected_rewards=set(),
        completed_actions=set(),
        current_room=spec.rooms[0].name,
    )
    for e in spec.entities:
        if e.location == "inventory":
            state.inventory.add(e.name)
    return state


# --- flag helpers ------------------------------------------------------------

def has_flag(state: WorldState, name: str, flag: str) -> bool:
    return flag in state.flags.get(name, frozenset())


def set_flag(state: WorldState, name: str, flag: str):
    state.flags[name] = state.flags.get(name, frozenset()) | {flag}


def clear_flag(state: WorldState, name: str, flag: str):
    state.flags[name] = state.flags.get(name, frozenset()) - {flag}


def is_open_for_access(state: WorldState, spec: GameSpec, name: str) -> bool:
    """Containers block access only while they are openable and closed."""
    entity = spec.entity(name)
    if entity is None or entity.kind != "container":
        return False
    if not has_flag(state, name, "openable"):
        return True
    return has_flag(state, name, "open")


def move_entity(state: WorldState, name: str, destination: str):
    state.locations[name] = destination
    if destination == "inventory":
        state.inventory.add(name)
    else:
        state.inventory.discard(name)


# --- scope -------------------------------------------------------------------

def in_scope(state: WorldState, spec: GameSpec) -> set[str]:
    """Entities the player can currently see and refer to.

    Room contents and inventory are visible; supporters expose what is on
    them; containers expose their contents only while open.  Consumed
    entities (location "nowhere") are gone.
    """
    visible: set[str] = set()
    frontier = [name for name, loc in state.locations.items()
                if loc == state.current_room or loc == "inventory"]
    while frontier:
        name = frontier.pop()
        if name in visible:
            continue
        visible.add(name)
        entity = spec.entity(name)
        if entity is None:
            continue
        if entity.kind == "supporter":
            frontier += [n for n, loc in state.locations.items()
                         if loc == f"on {name}"]
        elif entity.kind == "container" and is_open_for_access(state, spec, name):
            frontier += [n for n, loc in state.locations.items()
                         if loc == f"in {name}"]
    return visible


def contents(state: WorldState, holder: str, relation: str) -> list[str]:
    prefix = f"{relation} {holder}"
    return sorted(n for n, loc in state.locations.items() if loc == prefix)


# --- predicates ---------------------------------------------------------------

def eval_predicate(state: WorldState, spec: GameSpec, pred: Predicate,
                   binding: dict[str, str] | None = None) -> bool:
    subject = pred.subject
    if binding and subject.startswith("<") and subject.endswith(">"):
        subject = binding[subject[1:-1]]
    if pred.relation == "action_completed":
        return pred.argument in state.completed_actions
    if pred.relation == "has_flag":
        return has_flag(state, subject, pred.argument)
    if pred.relation == "in_inventory":
        return subject in state.inventory
    # in_location: normalize both sides through parse_location
    want = parse_location(pred.argument)
    have = parse_location(state.locations.get(subject, "nowhere"))
    return want == have


# --- canonical form ------------------------------------------------------------

def canonical_key(state: WorldState) -> tuple:
    """Hashable form that merges observably identical states.

    Moves and feedback are deliberately excluded: two states that differ
    only in how the player got there behave identically forever after.
    """
    return (
        tuple(sorted(
            (name, state.locations[name], tuple(sorted(state.flags[name])))
            for name in state.locations
        )),
        tuple(sorted(state.collected_rewards)),
        tuple(sorted(state.completed_actions)),
        state.failed,
    )


def state_hash(state: WorldState) -> str:
    """Deterministic digest of the canonical key, stable across processes."""
    return hashlib.sha256(repr(canonical_key(state)).encode()).hexdigest()
