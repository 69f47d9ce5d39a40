"""Command parsing and admissible-command enumeration.

The grammar is deliberately small: the built-in verb set plus whatever
templates the spec declares.  Parsing is purely lexical; whether an action
can actually succeed is the runtime's business.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import AmbiguousNoun, UnknownVerb, UnresolvedNoun
from ..gamespec import CustomAction, GameSpec, match_custom_instance
from .world import WorldState, has_flag, in_scope

ARTICLES = frozenset({"the", "a", "an"})

# Verbs that never need to be declared; a player can always look around.
ALWAYS_ON = frozenset({"look"})


@dataclass(frozen=True)
class Command:
    verb: str
    raw: str
    noun: str | None = None
    preposition: str | None = None
    second_noun: str | None = None
    custom: str | None = None                    # matched custom-action name
    binding: tuple[tuple[str, str], ...] = ()    # slot -> entity for custom


def normalize(text: str) -> list[str]:
    words = text.strip().lower().split()
    return [w for w in words if w not in ARTICLES]


def resolve_noun(phrase: str, state: WorldState, spec: GameSpec) -> str:
    """Map a noun phrase to a declared entity name.

    Exact names win; otherwise every entity whose name contains all the
    phrase words is a candidate.  A unique inventory candidate beats room
    candidates, any remaining tie is reported, never guessed.
    """
    phrase = phrase.strip()
    if not phrase:
        raise UnresolvedNoun(phrase)
    names = {e.name for e in spec.entities}
    if phrase in names:
        return phrase
    words = set(phrase.split())
    candidates = sorted(n for n in names if words <= set(n.split()))
    if not candidates:
        raise UnresolvedNoun(phrase)
    if len(candidates) == 1:
        return candidates[0]
    held = [n for n in candidates if n in state.inventory]
    if len(held) == 1:
        return held[0]
    raise AmbiguousNoun(phrase, candidates)


def parse_command(text: str, state: WorldState, spec: GameSpec) -> Command:
    """Turn player text into a structured Command.

    Custom-action templates are tried before built-in verbs so a spec can
    claim phrasings like "open box using key" for itself.
    """
    words = normalize(text)
    if not words:
        raise UnknownVerb("")
    raw = " ".join(words)

    for action in spec.custom_actions:
        binding = match_custom_instance(spec, action, raw)
        if binding is not None:
            slots = action.slots()
            return Command(
                verb=action.template.split()[0],
                raw=raw,
                noun=binding[slots[0]] if slots else None,
                second_noun=binding[slots[1]] if len(slots) > 1 else None,
                custom=action.name,
                binding=tuple(sorted(binding.items())),
            )

    verb, rest = words[0], words[1:]
    enabled = spec.default_actions | ALWAYS_ON

    if verb == "look" and rest[:1] == ["at"]:
        verb, rest = "examine", rest[1:]
    if verb in ("look", "inventory") and not rest:
        if verb not in enabled:
            raise UnknownVerb(verb)
        return Command(verb=verb, raw=raw)
    if verb in ("examine", "take", "drop", "open", "close") and rest:
        if verb not in enabled:
            raise UnknownVerb(verb)
        return Command(verb=verb, raw=raw,
                       noun=resolve_noun(" ".join(rest), state, spec))
    if verb == "put" and rest:
        prep = next((p for p in ("in", "into", "on", "onto") if p in rest), None)
        if prep:
            i = rest.index(prep)
            short = "in" if prep in ("in", "into") else "on"
            if f"put-{short}" not in enabled:
                raise UnknownVerb(f"put-{short}")
            return Command(
                verb="put", raw=raw, preposition=short,
                noun=resolve_noun(" ".join(rest[:i]), state, spec),
                second_noun=resolve_noun(" ".join(rest[i + 1:]), state, spec),
            )
        raise UnknownVerb("put")
    if verb == "turn" and rest:
        if rest[0] in ("on", "off"):
            mode, phrase = rest[0], rest[1:]
        elif rest[-1] in ("on", "off"):
            mode, phrase = rest[-1], rest[:-1]
        else:
            raise UnknownVerb("turn")
        if f"turn-{mode}" not in enabled:
            raise UnknownVerb(f"turn-{mode}")
        return Command(verb="turn", raw=raw, preposition=mode,
                       noun=resolve_noun(" ".join(phrase), state, spec))
    raise UnknownVerb(verb)


def admissible_commands(state: WorldState, spec: GameSpec) -> list[str]:
    """Every command string worth typing right now, sorted, duplicate-free.

    Admissible means grammatical over visible entities; it does not promise
    the action will succeed.  Terminal states admit nothing.
    """
    if state.done:
        return []
    out: set[str] = set()
    visible = in_scope(state, spec)
    enabled = spec.default_actions | ALWAYS_ON
    ents = {e.name: e for e in spec.entities}

    out.add("look")
    if "inventory" in enabled:
        out.add("inventory")
    for name in visible:
        e = ents[name]
        if "examine" in enabled:
            out.add(f"examine {name}")
        if "take" in enabled and e.portable and name not in state.inventory:
            out.add(f"take {name}")
        if "drop" in enabled and name in state.inventory:
            out.add(f"drop {name}")
        if "open" in enabled and has_flag(state, name, "closed"):
            out.add(f"open {name}")
        if "close" in enabled and has_flag(state, name, "openable") \
                and has_flag(state, name, "open"):
            out.add(f"close {name}")
        if "turn-on" in enabled and has_flag(state, name, "switchable") \
                and has_flag(state, name, "off"):
            out.add(f"turn on {name}")
        if "turn-off" in enabled and has_flag(state, name, "switchable") \
                and has_flag(state, name, "on"):
            out.add(f"turn off {name}")
    for held in sorted(state.inventory):
        for name in visible:
            if name == held:
                continue
            e = ents[name]
            if "put-in" in enabled and e.kind == "container":
                out.add(f"put {held} in {name}")
            if "put-on" in enabled and e.kind == "supporter":
                out.add(f"put {held} on {name}")

    for action in spec.custom_actions:
        out |= _template_instances(action, visible, ents)
    return sorted(out)


def _template_instances(action: CustomAction, visible: set[str],
                        ents: dict) -> set[str]:
    """All groundings of one template over currently visible entities."""
    from ..gamespec import WILDCARD_SLOTS, _SLOT_RE

    slots = action.slots()
    fills: list[list[str]] = []
    for slot in slots:
        if slot in WILDCARD_SLOTS:
            options = sorted(visible)
        else:
            options = sorted(n for n in visible if ents[n].kind == slot)
        if not options:
            return set()
        fills.append(options)

    results: set[str] = set()

    def rec(i: int, binding: dict[str, str]):
        if i == len(slots):
            tokens = []
            for token in action.template.split():
                m = _SLOT_RE.fullmatch(token)
                tokens.append(binding[m.group(1)] if m else token)
            results.add(" ".join(tokens))
            return
        slot = slots[i]
        if slot in binding:
            rec(i + 1, binding)
            return
        for option in fills[i]:
            if option in binding.values():
                continue
            binding[slot] = option
            rec(i + 1, binding)
            del binding[slot]

    rec(0, {})
    return results
