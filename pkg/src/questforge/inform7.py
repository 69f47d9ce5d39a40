"""Export a GameSpec as Inform 7 source text.

The translation is a plain structural dump: one declaration per room and
entity, one Check/Carry-out pair per custom action, one scoring rule per
reward.  Output is deterministic so equal specs give byte-identical files.
Compiling the result with a real Inform 7 toolchain is best-effort; the
in-repo engine is the authoritative runtime.
"""

from __future__ import annotations

import re

from .errors import UnsupportedConstruct
from .gamespec import (
    STANDARD_FLAGS,
    CustomAction,
    GameSpec,
    Predicate,
    Reward,
    max_score,
    parse_location,
    tracked_actions,
)

# Inform adjectives declared with "can be" must be plain words.  Custom flags
# with digits or underscores have no such form, so they are rejected.
_ADJECTIVE_RE = re.compile(r"^[a-z][a-z-]*$")

_KIND_DECOR = {
    "portable": ("thing", ""),
    "fixture": ("thing", " It is fixed in place."),
    "container": ("container", ""),
    "supporter": ("supporter", ""),
    "device": ("device", ""),
}


def _ident(name: str) -> str:
    return name.replace("_", "-")


def _flag_adjective(flag: str) -> str:
    if flag in STANDARD_FLAGS:
        return flag
    if not _ADJECTIVE_RE.match(flag):
        raise UnsupportedConstruct(flag)
    return flag


def _done_var(instance: str) -> str:
    return "done-" + _ident(instance.replace(" ", "-"))


def _place_phrase(location: str) -> str:
    rel, target = parse_location(location)
    if rel == "room":
        return f"in the {_ident(target)}"
    if rel == "in":
        return f"in the {_ident(target)}"
    if rel == "on":
        return f"on the {_ident(target)}"
    if rel == "inventory":
        return "carried by the player"
    return "nowhere"


def _quote(text: str) -> str:
    return '"' + text.replace('"', "'") + '"'


def emit_inform7(spec: GameSpec) -> str:
    """Render the spec as one Inform 7 source file (.ni text)."""
    out: list[str] = []
    w = out.append

    w(_quote(spec.title))
    w("")
    w("Use scoring.")
    w(f"The maximum score is {max_score(spec)}.")
    w("")
    w("When play begins:")
    w(f"\tsay {_quote(spec.goal_text)}.")
    w("")

    for room in spec.rooms:
        line = f"The {_ident(room.name)} is a room."
        if room.description:
            line += f" {_quote(room.description)}"
        w(line)
    w("")

    custom_flags = sorted({
        f for e in spec.entities for f in e.properties
        if f not in STANDARD_FLAGS
    } | {
        eff.argument for a in spec.custom_actions for eff in a.effects
        if eff.kind in ("set_flag", "clear_flag")
        and eff.argument not in STANDARD_FLAGS
    })

    for entity in spec.entities:
        kind, decor = _KIND_DECOR[entity.kind]
        name = _ident(entity.name)
        w(f"The {name} is a {kind} {_place_phrase(entity.location)}.{decor}")
        if entity.description:
            w(f"The description of the {name} is {_quote(entity.description)}.")
        for flag in custom_flags:
            w(f"The {name} can be {_flag_adjective(flag)}.")
        adjectives = _state_adjectives(entity.properties)
        if adjectives:
            w(f"The {name} is {' and '.join(adjectives)}.")
    w("")

    for instance in sorted(tracked_actions(spec)):
        w(f"{_done_var(instance)} is a truth state that varies.")
    w("")

    for action in spec.custom_actions:
        out.extend(_action_block(spec, action))
        w("")

    for instance in sorted(tracked_actions(spec)):
        hook = _builtin_after_hook(spec, instance)
        if hook:
            out.extend(hook)
            w("")

    for i, reward in enumerate(spec.rewards):
        out.extend(_reward_block(spec, reward, i))
        w("")

    w(f"Every turn when the score is {max_score(spec)}:")
    w('\tend the story finally saying "You have won".')
    w("")
    return "\n".join(out)


def _state_adjectives(properties: frozenset[str]) -> list[str]:
    order = ("open", "closed", "on", "off", "edible", "filled", "empty")
    stated = [p for p in order if p in properties]
    stated += sorted(p for p in properties
                     if p not in order
                     and p not in ("openable", "switchable", "portable"))
    return [_flag_adjective(p) for p in stated]


def _slot_refs(action: CustomAction) -> dict[str, str]:
    slots = action.slots()
    if len(slots) > 2:
        raise UnsupportedConstruct(action.template)
    refs = {}
    if slots:
        refs[slots[0]] = "the noun"
    if len(slots) > 1:
        refs[slots[1]] = "the second noun"
    return refs


def _subject_ref(subject: str, refs: dict[str, str]) -> str:
    if subject.startswith("<") and subject.endswith(">"):
        return refs[subject[1:-1]]
    return f"the {_ident(subject)}"


def _condition(spec: GameSpec, p: Predicate, refs: dict[str, str]) -> str:
    if p.relation == "action_completed":
        return f"{_done_var(p.argument)} is false"
    subj = _subject_ref(p.subject, refs)
    if p.relation == "has_flag":
        return f"{subj} is not {_flag_adjective(p.argument)}"
    if p.relation == "in_inventory":
        return f"{subj} is not carried by the player"
    return f"{subj} is not {_place_phrase(p.argument)}"


def _action_block(spec: GameSpec, action: CustomAction) -> list[str]:
    refs = _slot_refs(action)
    act = _ident(action.name) + "-act"
    applying = {0: "nothing", 1: "one thing", 2: "two things"}[len(refs)]
    lines = [f"{act.capitalize()} is an action applying to {applying}."]
    for pattern in (action.template, *action.aliases):
        grammar = re.sub(r"<[a-z]+>", "[something]", pattern)
        lines.append(f'Understand "{grammar}" as {act}.')
    fail = action.failure_text or "Nothing happens."
    for p in action.preconditions:
        lines.append(f"Check {act} when {_condition(spec, p, refs)}:")
        lines.append(f"\tinstead say {_quote(fail)}.")
    lines.append(f"Carry out {act}:")
    for eff in action.effects:
        subj = _subject_ref(eff.subject, refs)
        if eff.kind == "set_flag":
            lines.append(f"\tnow {subj} is {_flag_adjective(eff.argument)};")
        elif eff.kind == "clear_flag":
            lines.append(f"\tnow {subj} is not {_flag_adjective(eff.argument)};")
        elif eff.kind == "move_entity":
            lines.append(f"\tnow {subj} is {_place_phrase(eff.argument)};")
        else:
            lines.append(f"\tremove {subj} from play;")
    for instance in sorted(tracked_actions(spec)):
        if _is_instance_of(spec, action, instance):
            lines.append(f"\tnow {_done_var(instance)} is true;")
    if action.fatal:
        lines.append('\tend the story saying "You have lost";')
    if action.success_text:
        lines.append(f"\tsay {_quote(action.success_text)}.")
    else:
        lines.append('\tsay "Done.".')
    return lines


def _is_instance_of(spec: GameSpec, action: CustomAction, instance: str) -> bool:
    from .gamespec import match_custom_instance
    return match_custom_instance(spec, action, instance) is not None


def _builtin_after_hook(spec: GameSpec, instance: str) -> list[str]:
    """After rule marking a built-in action instance as completed."""
    for action in spec.custom_actions:
        if _is_instance_of(spec, action, instance):
            return []       # handled inside the custom carry-out block
    words = instance.split()
    verb, rest = words[0], words[1:]
    if verb == "put":
        prep = "in" if "in" in rest else "on"
        i = rest.index(prep)
        first = _ident(" ".join(rest[:i]))
        second = _ident(" ".join(rest[i + 1:]))
        gerund = "inserting" if prep == "in" else "putting"
        into = "into" if prep == "in" else "on"
        head = f"After {gerund} the {first} {into} the {second}:"
    elif verb == "turn":
        gerund = "switching on" if rest[0] == "on" else "switching off"
        head = f"After {gerund} the {_ident(' '.join(rest[1:]))}:"
    else:
        gerund = {"take": "taking", "drop": "dropping", "open": "opening",
                  "close": "closing"}.get(verb)
        if gerund is None:
            return []
        head = f"After {gerund} the {_ident(' '.join(rest))}:"
    return [head,
            f"\tnow {_done_var(instance)} is true;",
            "\tcontinue the action."]


def _reward_block(spec: GameSpec, reward: Reward, index: int) -> list[str]:
    var = f"scored-{index}"
    trig = reward.trigger
    if trig.relation == "action_completed":
        cond = f"{_done_var(trig.argument)} is true"
    elif trig.relation == "has_flag":
        cond = f"the {_ident(trig.subject)} is {_flag_adjective(trig.argument)}"
    elif trig.relation == "in_inventory":
        cond = f"the {_ident(trig.subject)} is carried by the player"
    else:
        cond = f"the {_ident(trig.subject)} is {_place_phrase(trig.argument)}"
    return [
        f"{var.capitalize()} is a truth state that varies.",
        f"Every turn when {cond} and {var} is false:",
        f"\tnow {var} is true;",
        f"\tincrease the score by {reward.value}.",
    ]
