"""Declarative game definitions: schema types, JSON parsing, validation.

A game is described entirely by one JSON document (extension ``.game.json``)
with top-level keys ``id, title, goal, rooms, entities, actions, rewards,
task_graph, max_steps``.  Everything downstream (engine, validator, RL
environment) consumes the immutable :class:`GameSpec` built here.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass, field

from .errors import MalformedJson, SpecError

ENTITY_KINDS = ("portable", "fixture", "container", "supporter", "device")

# Verbs the engine knows how to execute.  A spec enables a subset of these;
# "look" is always available so an observation is never a dead end.
BUILTIN_VERBS = (
    "look", "examine", "inventory", "take", "drop", "open", "close",
    "put-in", "put-on", "turn-on", "turn-off",
)

# Verbs that mutate world state; only their successes can be tracked as
# completed actions (and hence rewarded or ordered in the task graph).
STATE_CHANGING_VERBS = (
    "take", "drop", "open", "close", "put-in", "put-on", "turn-on", "turn-off",
)

STANDARD_FLAGS = frozenset({
    "openable", "open", "closed", "switchable", "on", "off",
    "edible", "filled", "empty", "portable",
})

RELATIONS = ("has_flag", "in_location", "in_inventory", "action_completed")
EFFECT_KINDS = ("set_flag", "clear_flag", "move_entity", "consume_entity")

_NAME_RE = re.compile(r"^[a-z][a-z0-9 _-]*$")
_FLAG_RE = re.compile(r"^[a-z][a-z0-9_]*$")
_SLOT_RE = re.compile(r"<([a-z]+)>")

# Slot words accepted in custom-action templates.  Kind slots match entities
# of that kind; the wildcard slots match any entity.
WILDCARD_SLOTS = ("object", "entity", "thing", "item")


@dataclass(frozen=True)
class Violation:
    path: str
    message: str
    kind: str = "schema"        # "schema" or "dangling"
    name: str | None = None     # offending reference for dangling violations

    def __str__(self):
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class Room:
    name: str
    description: str = ""


@dataclass(frozen=True)
class Entity:
    name: str
    kind: str
    location: str               # room name, "in <entity>", or "on <entity>"
    properties: frozenset[str] = frozenset()
    description: str = ""

    @property
    def portable(self) -> bool:
        return self.kind == "portable" or "portable" in self.properties


@dataclass(frozen=True)
class Predicate:
    subject: str                # entity name, "<slot>", or "" for action_completed
    relation: str
    argument: str = ""


@dataclass(frozen=True)
class Effect:
    kind: str
    subject: str                # entity name or "<slot>"
    argument: str = ""          # flag name or destination location


@dataclass(frozen=True)
class CustomAction:
    name: str
    template: str
    aliases: tuple[str, ...] = ()
    preconditions: tuple[Predicate, ...] = ()
    effects: tuple[Effect, ...] = ()
    success_text: str = ""
    failure_text: str = ""
    fatal: bool = False         # successful execution loses the game

    def slots(self) -> tuple[str, ...]:
        return tuple(_SLOT_RE.findall(self.template))


@dataclass(frozen=True)
class Reward:
    trigger: Predicate
    value: int = 1
    once_only: bool = True


@dataclass(frozen=True)
class TaskGraph:
    nodes: tuple[str, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    parallel_groups: tuple[frozenset[str], ...] = ()

    def predecessors(self, node: str) -> tuple[str, ...]:
        return tuple(a for a, b in self.edges if b == node)


@dataclass(frozen=True)
class GameSpec:
    id: str
    title: str
    goal_text: str
    rooms: tuple[Room, ...]
    entities: tuple[Entity, ...]
    custom_actions: tuple[CustomAction, ...] = ()
    default_actions: frozenset[str] = frozenset()
    rewards: tuple[Reward, ...] = ()
    task_graph: TaskGraph = field(default_factory=TaskGraph)
    max_steps_hint: int = 50

    def entity(self, name: str) -> Entity | None:
        for e in self.entities:
            if e.name == name:
                return e
        return None

    def room_names(self) -> frozenset[str]:
        return frozenset(r.name for r in self.rooms)


def max_score(spec: GameSpec) -> int:
    """Total points achievable: the sum of all reward values."""
    return sum(r.value for r in spec.rewards)


# --- location references -----------------------------------------------------

def parse_location(loc: str) -> tuple[str, str]:
    """Split a location string into (relation, target).

    Returns ("room", name), ("in", entity), ("on", entity),
    ("inventory", "") or ("nowhere", "").
    """
    loc = loc.strip().lower()
    if loc == "inventory":
        return ("inventory", "")
    if loc == "nowhere":
        return ("nowhere", "")
    if loc.startswith("in "):
        return ("in", loc[3:].strip())
    if loc.startswith("on "):
        return ("on", loc[3:].strip())
    return ("room", loc)


def location_valid(spec: GameSpec, loc: str, allow_special: bool = False) -> bool:
    rel, target = parse_location(loc)
    if rel == "room":
        return target in spec.room_names()
    if rel in ("inventory", "nowhere"):
        return allow_special
    ent = spec.entity(target)
    if ent is None:
        return False
    if rel == "in":
        return ent.kind == "container"
    return ent.kind == "supporter"


# --- action-instance matching ------------------------------------------------
#
# Task-graph nodes, reward triggers and action_completed preconditions all
# name concrete action instances such as "take pot" or "boil water in pot".
# The same canonical strings are recorded by the engine when an action
# succeeds, so matching here is exact up to whitespace and case.

def _template_pattern(template: str) -> list[str]:
    return template.strip().lower().split()


def match_custom_instance(spec: GameSpec, action: CustomAction,
                          text: str) -> dict[str, str] | None:
    """Try to read ``text`` as an instantiation of a custom-action template.

    Returns the slot binding (slot word -> entity name) on success.  Slot
    positions must be filled by declared entity names of the matching kind;
    literal template words must appear verbatim.
    """
    words = text.strip().lower().split()
    names = {e.name: e for e in spec.entities}
    for pattern in (action.template, *action.aliases):
        tokens = _template_pattern(pattern)
        binding = _match_tokens(tokens, words, names)
        if binding is not None:
            return binding
    return None


def _match_tokens(tokens, words, names):
    binding: dict[str, str] = {}

    def rec(ti, wi):
        if ti == len(tokens):
            return wi == len(words)
        m = _SLOT_RE.fullmatch(tokens[ti])
        if m is None:
            if wi < len(words) and words[wi] == tokens[ti]:
                return rec(ti + 1, wi + 1)
            return False
        slot = m.group(1)
        # longest entity-name match first so multi-word names win
        for take in range(min(4, len(words) - wi), 0, -1):
            phrase = " ".join(words[wi:wi + take])
            ent = names.get(phrase)
            if ent is None:
                continue
            if slot not in WILDCARD_SLOTS and ent.kind != slot:
                continue
            binding[slot] = phrase
            if rec(ti + 1, wi + take):
                return True
            del binding[slot]
        return False

    return binding if rec(0, 0) else None


def canonical_instance(action: CustomAction, binding: dict[str, str]) -> str:
    """The canonical string recorded when a custom action runs."""
    out = []
    for token in _template_pattern(action.template):
        m = _SLOT_RE.fullmatch(token)
        out.append(binding[m.group(1)] if m else token)
    return " ".join(out)


def resolve_action_instance(spec: GameSpec, text: str) -> str | None:
    """Classify a concrete action string.

    Returns "custom" when it instantiates a declared custom action,
    "default" when it is an enabled state-changing built-in over declared
    entities, else None.
    """
    words = text.strip().lower().split()
    if not words:
        return None
    for action in spec.custom_actions:
        if match_custom_instance(spec, action, text) is not None:
            return "custom"
    names = {e.name for e in spec.entities}

    def is_entity(phrase):
        return " ".join(phrase) in names

    if len(words) >= 2:
        verb, rest = words[0], words[1:]
        if verb in ("take", "drop", "open", "close") and is_entity(rest):
            if verb in spec.default_actions:
                return "default"
        if verb == "put" and ("in" in rest or "on" in rest):
            prep = "in" if "in" in rest else "on"
            i = rest.index(prep)
            if is_entity(rest[:i]) and is_entity(rest[i + 1:]):
                if f"put-{prep}" in spec.default_actions:
                    return "default"
        if verb == "turn" and rest[0] in ("on", "off") and is_entity(rest[1:]):
            if f"turn-{rest[0]}" in spec.default_actions:
                return "default"
    return None


# --- JSON parsing --------------------------------------------------------------

def parse_spec(json_text: str) -> GameSpec:
    """Parse and fully validate a ``.game.json`` document.

    Raises :class:`MalformedJson` for broken JSON and :class:`SpecError`
    (carrying the violation list) when the document does not satisfy the
    schema.  Never mutates anything; total on all inputs.
    """
    try:
        data = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from exc
    if not isinstance(data, dict):
        raise SpecError([Violation("$", "top level must be a JSON object")])
    spec, violations = build_spec(data)
    if spec is not None:
        violations = violations + validate_schema(spec)
    if violations:
        raise SpecError(violations)
    return spec


def build_spec(data: dict) -> tuple[GameSpec | None, list[Violation]]:
    """Structurally convert a JSON dict; collects shape errors without raising."""
    v: list[Violation] = []

    def want(key, typ, default=None):
        if key not in data:
            if default is not None:
                return default
            v.append(Violation(f"$.{key}", f"missing required key {key!r}"))
            return None
        if not isinstance(data[key], typ):
            v.append(Violation(f"$.{key}", f"expected {typ.__name__}"))
            return None
        return data[key]

    game_id = want("id", str)
    title = want("title", str)
    goal = want("goal", str)
    max_steps = data.get("max_steps", 50)
    if not isinstance(max_steps, int) or max_steps < 1:
        v.append(Violation("$.max_steps", "must be a positive integer"))
        max_steps = 50

    rooms = []
    for i, item in enumerate(_as_list(data.get("rooms"), "$.rooms", v)):
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            v.append(Violation(f"$.rooms[{i}]", "room needs a string name"))
            continue
        rooms.append(Room(item["name"].strip().lower(),
                          str(item.get("description", ""))))

    entities = []
    for i, item in enumerate(_as_list(data.get("entities"), "$.entities", v)):
        path = f"$.entities[{i}]"
        if not isinstance(item, dict):
            v.append(Violation(path, "entity must be an object"))
            continue
        name = item.get("name")
        kind = item.get("kind")
        loc = item.get("location")
        if not isinstance(name, str) or not isinstance(kind, str) \
                or not isinstance(loc, str):
            v.append(Violation(path, "entity needs name, kind and location"))
            continue
        props = item.get("properties", [])
        if not isinstance(props, list) or not all(isinstance(p, str) for p in props):
            v.append(Violation(f"{path}.properties", "must be a list of flag names"))
            props = []
        entities.append(Entity(
            name=name.strip().lower(),
            kind=kind.strip().lower(),
            location=loc.strip().lower(),
            properties=frozenset(p.strip().lower() for p in props),
            description=str(item.get("description", "")),
        ))

    actions = data.get("actions", {})
    if not isinstance(actions, dict):
        v.append(Violation("$.actions", "must be an object"))
        actions = {}
    default_actions = actions.get("default", [])
    if not isinstance(default_actions, list):
        v.append(Violation("$.actions.default", "must be a list of verb names"))
        default_actions = []
    customs = []
    for i, item in enumerate(_as_list(actions.get("custom", []),
                                      "$.actions.custom", v)):
        path = f"$.actions.custom[{i}]"
        if not isinstance(item, dict) or not isinstance(item.get("template"), str):
            v.append(Violation(path, "custom action needs a template"))
            continue
        pre = [_parse_predicate(p, f"{path}.preconditions[{j}]", v)
               for j, p in enumerate(item.get("preconditions", []))]
        eff = [_parse_effect(e, f"{path}.effects[{j}]", v)
               for j, e in enumerate(item.get("effects", []))]
        customs.append(CustomAction(
            name=str(item.get("name", "")).strip().lower(),
            template=item["template"].strip().lower(),
            aliases=tuple(str(a).strip().lower() for a in item.get("aliases", [])),
            preconditions=tuple(p for p in pre if p),
            effects=tuple(e for e in eff if e),
            success_text=str(item.get("success", "")),
            failure_text=str(item.get("failure", "")),
            fatal=bool(item.get("fatal", False)),
        ))

    rewards = []
    for i, item in enumerate(_as_list(data.get("rewards"), "$.rewards", v)):
        path = f"$.rewards[{i}]"
        if not isinstance(item, dict):
            v.append(Violation(path, "reward must be an object"))
            continue
        trig = _parse_predicate(item.get("trigger"), f"{path}.trigger", v)
        value = item.get("value", 1)
        if not isinstance(value, int):
            v.append(Violation(f"{path}.value", "must be an integer"))
            value = 1
        if trig:
            rewards.append(Reward(trig, value, bool(item.get("once", True))))

    graph_data = data.get("task_graph", {})
    if not isinstance(graph_data, dict):
        v.append(Violation("$.task_graph", "must be an object"))
        graph_data = {}
    nodes = tuple(str(n).strip().lower()
                  for n in graph_data.get("nodes", []) if isinstance(n, str))
    edges = []
    for i, pair in enumerate(graph_data.get("edges", [])):
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(x, str) for x in pair)):
            v.append(Violation(f"$.task_graph.edges[{i}]",
                               "edge must be a [before, after] pair"))
            continue
        edges.append((pair[0].strip().lower(), pair[1].strip().lower()))
    groups = []
    for i, group in enumerate(graph_data.get("parallel", [])):
        if not isinstance(group, list) or not all(isinstance(x, str) for x in group):
            v.append(Violation(f"$.task_graph.parallel[{i}]",
                               "group must be a list of node names"))
            continue
        groups.append(frozenset(x.strip().lower() for x in group))

    if game_id is None or title is None or goal is None:
        return None, v
    spec = GameSpec(
        id=game_id.strip(),
        title=title.strip(),
        goal_text=goal,
        rooms=tuple(rooms),
        entities=tuple(entities),
        custom_actions=tuple(customs),
        default_actions=frozenset(str(a).strip().lower() for a in default_actions),
        rewards=tuple(rewards),
        task_graph=TaskGraph(nodes, tuple(edges), tuple(groups)),
        max_steps_hint=max_steps,
    )
    return spec, v


def _as_list(value, path, v):
    if value is None:
        v.append(Violation(path, "missing required list"))
        return []
    if not isinstance(value, list):
        v.append(Violation(path, "must be a list"))
        return []
    return value


def _parse_predicate(item, path, v) -> Predicate | None:
    if not isinstance(item, dict):
        v.append(Violation(path, "predicate must be an object"))
        return None
    rel = item.get("relation")
    if rel not in RELATIONS:
        v.append(Violation(path, f"relation must be one of {', '.join(RELATIONS)}"))
        return None
    return Predicate(
        subject=str(item.get("subject", "")).strip().lower(),
        relation=rel,
        argument=str(item.get("argument", "")).strip().lower(),
    )


def _parse_effect(item, path, v) -> Effect | None:
    if not isinstance(item, dict):
        v.append(Violation(path, "effect must be an object"))
        return None
    kind = item.get("kind")
    if kind not in EFFECT_KINDS:
        v.append(Violation(path, f"kind must be one of {', '.join(EFFECT_KINDS)}"))
        return None
    return Effect(
        kind=kind,
        subject=str(item.get("subject", "")).strip().lower(),
        argument=str(item.get("argument", "")).strip().lower(),
    )


# --- serialization ------------------------------------------------------------

def serialize_spec(spec: GameSpec) -> str:
    """Canonical JSON text; parse_spec(serialize_spec(s)) == s."""
    data = {
        "id": spec.id,
        "title": spec.title,
        "goal": spec.goal_text,
        "max_steps": spec.max_steps_hint,
        "rooms": [{"name": r.name, "description": r.description}
                  for r in spec.rooms],
        "entities": [{
            "name": e.name,
            "kind": e.kind,
            "location": e.location,
            "properties": sorted(e.properties),
            "description": e.description,
        } for e in spec.entities],
        "actions": {
            "default": sorted(spec.default_actions),
            "custom": [{
                "name": a.name,
                "template": a.template,
                "aliases": list(a.aliases),
                "preconditions": [_predicate_json(p) for p in a.preconditions],
                "effects": [{"kind": e.kind, "subject": e.subject,
                             "argument": e.argument} for e in a.effects],
                "success": a.success_text,
                "failure": a.failure_text,
                "fatal": a.fatal,
            } for a in spec.custom_actions],
        },
        "rewards": [{"trigger": _predicate_json(r.trigger), "value": r.value,
                     "once": r.once_only} for r in spec.rewards],
        "task_graph": {
            "nodes": list(spec.task_graph.nodes),
            "edges": [list(e) for e in spec.task_graph.edges],
            "parallel": [sorted(g) for g in spec.task_graph.parallel_groups],
        },
    }
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def _predicate_json(p: Predicate) -> dict:
    return {"subject": p.subject, "relation": p.relation, "argument": p.argument}


# --- validation ---------------------------------------------------------------

def validate_schema(spec: GameSpec) -> list[Violation]:
    """Check every GameSpec invariant; empty list means the spec is valid."""
    v: list[Violation] = []

    if not spec.id:
        v.append(Violation("$.id", "id must be non-empty"))
    if not spec.rooms:
        v.append(Violation("$.rooms", "at least one room is required"))
    room_names = [r.name for r in spec.rooms]
    if len(set(room_names)) != len(room_names):
        v.append(Violation("$.rooms", "room names must be unique"))

    seen: set[str] = set()
    for i, e in enumerate(spec.entities):
        path = f"$.entities[{i}]"
        if e.name in seen:
            v.append(Violation(path, f"duplicate entity name {e.name!r}"))
        seen.add(e.name)
        if e.name in room_names:
            v.append(Violation(path, f"entity name {e.name!r} collides with a room"))
        if not _NAME_RE.match(e.name or ""):
            v.append(Violation(path, f"bad entity name {e.name!r}"))
        if e.kind not in ENTITY_KINDS:
            v.append(Violation(f"{path}.kind", f"unknown kind {e.kind!r}"))
        if not location_valid(spec, e.location):
            v.append(Violation(f"{path}.location", f"unknown location {e.location!r}",
                               kind="dangling", name=parse_location(e.location)[1]))
        _check_flags(e, path, v)

    _check_containment_cycles(spec, v)

    flags_in_play = _declared_flags(spec)
    action_names = set()
    for i, a in enumerate(spec.custom_actions):
        path = f"$.actions.custom[{i}]"
        if not a.name:
            v.append(Violation(path, "custom action needs a name"))
        if a.name in action_names:
            v.append(Violation(path, f"duplicate action name {a.name!r}"))
        action_names.add(a.name)
        slots = set(a.slots())
        for s in slots:
            if s not in WILDCARD_SLOTS and s not in ENTITY_KINDS:
                v.append(Violation(f"{path}.template", f"unknown slot kind <{s}>"))
        used = set()
        for j, p in enumerate(a.preconditions):
            used |= _check_predicate(spec, p, slots, flags_in_play,
                                     f"{path}.preconditions[{j}]", v)
        for j, eff in enumerate(a.effects):
            used |= _check_effect(spec, eff, slots,
                                  f"{path}.effects[{j}]", v)
        unused = slots - used
        if unused:
            v.append(Violation(f"{path}.template",
                               "slots never used in preconditions or effects: "
                               + ", ".join(sorted(unused))))

    if not spec.rewards:
        v.append(Violation("$.rewards", "at least one reward is required"))
    total = 0
    for i, r in enumerate(spec.rewards):
        path = f"$.rewards[{i}]"
        if r.value < 1:
            v.append(Violation(f"{path}.value", "reward value must be >= 1"))
        total += r.value
        _check_predicate(spec, r.trigger, set(), flags_in_play,
                         f"{path}.trigger", v, allow_slots=False)
    if spec.rewards and total <= 0:
        v.append(Violation("$.rewards", "sum of reward values must be positive"))

    for verb in spec.default_actions:
        if verb not in BUILTIN_VERBS:
            v.append(Violation("$.actions.default", f"unknown verb {verb!r}"))

    _check_task_graph(spec, v)
    return v


def _check_flags(e: Entity, path: str, v: list[Violation]):
    for flag in e.properties:
        if not _FLAG_RE.match(flag):
            v.append(Violation(f"{path}.properties", f"bad flag name {flag!r}"))
    if "openable" in e.properties:
        if len({"open", "closed"} & e.properties) != 1:
            v.append(Violation(f"{path}.properties",
                               "openable requires exactly one of open/closed"))
    if "switchable" in e.properties:
        if len({"on", "off"} & e.properties) != 1:
            v.append(Violation(f"{path}.properties",
                               "switchable requires exactly one of on/off"))


def _check_containment_cycles(spec: GameSpec, v: list[Violation]):
    holder = {}
    for e in spec.entities:
        rel, target = parse_location(e.location)
        if rel in ("in", "on"):
            holder[e.name] = target
    for start in holder:
        node, hops = start, 0
        while node in holder and hops <= len(holder):
            node = holder[node]
            hops += 1
            if node == start:
                v.append(Violation("$.entities", f"{start!r} transitively "
                                   "contains itself"))
                break


def _declared_flags(spec: GameSpec) -> set[str]:
    flags = set(STANDARD_FLAGS)
    for e in spec.entities:
        flags |= e.properties
    for a in spec.custom_actions:
        for eff in a.effects:
            if eff.kind in ("set_flag", "clear_flag"):
                flags.add(eff.argument)
    return flags


def _check_subject(spec, subject, slots, path, v) -> set[str]:
    if subject.startswith("<") and subject.endswith(">"):
        slot = subject[1:-1]
        if slot not in slots:
            v.append(Violation(path, f"slot {subject!r} not in the template"))
            return set()
        return {slot}
    if spec.entity(subject) is None:
        v.append(Violation(path, f"unknown entity {subject!r}",
                           kind="dangling", name=subject))
    return set()


def _check_predicate(spec, p: Predicate, slots, flags_in_play, path, v,
                     allow_slots: bool = True) -> set[str]:
    used: set[str] = set()
    if p.relation == "action_completed":
        if not p.argument:
            v.append(Violation(path, "action_completed needs an action string"))
        elif resolve_action_instance(spec, p.argument) is None:
            v.append(Violation(path, f"unresolvable action {p.argument!r}",
                               kind="dangling", name=p.argument))
        return used
    if not allow_slots and p.subject.startswith("<"):
        v.append(Violation(path, "slots are not allowed here"))
        return used
    used |= _check_subject(spec, p.subject, slots, path, v)
    if p.relation == "has_flag":
        if p.argument not in flags_in_play:
            v.append(Violation(path, f"undeclared flag {p.argument!r}",
                               kind="dangling", name=p.argument))
    elif p.relation == "in_location":
        if not location_valid(spec, p.argument, allow_special=True):
            v.append(Violation(path, f"unknown location {p.argument!r}",
                               kind="dangling", name=p.argument))
    elif p.relation == "in_inventory":
        if p.argument:
            v.append(Violation(path, "in_inventory takes no argument"))
    return used


def _check_effect(spec, eff: Effect, slots, path, v) -> set[str]:
    used = _check_subject(spec, eff.subject, slots, path, v)
    if eff.kind in ("set_flag", "clear_flag"):
        if not _FLAG_RE.match(eff.argument or ""):
            v.append(Violation(path, f"bad flag name {eff.argument!r}"))
    elif eff.kind == "move_entity":
        if not location_valid(spec, eff.argument, allow_special=True):
            v.append(Violation(path, f"unknown destination {eff.argument!r}",
                               kind="dangling", name=eff.argument))
    elif eff.kind == "consume_entity":
        if eff.argument:
            v.append(Violation(path, "consume_entity takes no argument"))
    return used


def _check_task_graph(spec: GameSpec, v: list[Violation]):
    g = spec.task_graph
    if len(set(g.nodes)) != len(g.nodes):
        v.append(Violation("$.task_graph.nodes", "nodes must be unique"))
    node_set = set(g.nodes)
    for node in g.nodes:
        if resolve_action_instance(spec, node) is None:
            v.append(Violation("$.task_graph.nodes",
                               f"unresolvable task node {node!r}",
                               kind="dangling", name=node))
    for a, b in g.edges:
        if a not in node_set or b not in node_set:
            v.append(Violation("$.task_graph.edges",
                               f"edge ({a!r}, {b!r}) references unknown nodes"))
    for group in g.parallel_groups:
        if not group <= node_set:
            v.append(Violation("$.task_graph.parallel",
                               "group references unknown nodes"))
    # cycle check by repeated leaf removal
    edges = [e for e in g.edges if e[0] in node_set and e[1] in node_set]
    remaining = set(node_set)
    while remaining:
        sinks = {n for n in remaining
                 if not any(a == n and b in remaining for a, b in edges)}
        if not sinks:
            v.append(Violation("$.task_graph.edges", "edge relation has a cycle"))
            break
        remaining -= sinks


@functools.lru_cache(maxsize=256)
def tracked_actions(spec: GameSpec) -> frozenset[str]:
    """Action instances whose completion the engine must remember.

    Only instances referenced by the task graph, a reward trigger or an
    action_completed precondition are recorded; everything else would bloat
    the canonical state for no observable difference.
    """
    tracked = set(spec.task_graph.nodes)
    for r in spec.rewards:
        if r.trigger.relation == "action_completed":
            tracked.add(r.trigger.argument)
    for a in spec.custom_actions:
        for p in a.preconditions:
            if p.relation == "action_completed":
                tracked.add(p.argument)
    return frozenset(tracked)
