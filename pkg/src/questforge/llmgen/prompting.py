"""Few-shot prompt assembly for game generation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

IDEA_MARKER = "{idea}"

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(text: str) -> str:
    return _SLUG_RE.sub("_", text.strip().lower()).strip("_")


@dataclass(frozen=True)
class GameIdea:
    idea_text: str
    required_skills: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.idea_text.strip():
            raise ValueError("idea_text must be non-empty")

    def render(self) -> str:
        if self.required_skills:
            return (self.idea_text
                    + " (required skills: "
                    + ", ".join(self.required_skills) + ")")
        return self.idea_text


@dataclass(frozen=True)
class PromptTemplate:
    """Instruction header, worked examples, and the line that places the
    target idea.  target_slot must contain the idea marker exactly once."""

    instruction_header: str
    example_blocks: tuple[tuple[str, str], ...] = ()
    target_slot: str = f"Game idea: {IDEA_MARKER}\n"

    def __post_init__(self):
        if self.target_slot.count(IDEA_MARKER) != 1:
            raise ValueError(f"target_slot needs exactly one {IDEA_MARKER}")


def build_prompt(idea: GameIdea, template: PromptTemplate) -> str:
    """Header, k worked examples, then the target idea at the marker."""
    parts = [template.instruction_header.rstrip() + "\n"]
    for example_idea, sections_text in template.example_blocks:
        parts.append(template.target_slot.replace(IDEA_MARKER, example_idea)
                     + sections_text.strip() + "\n")
    parts.append(template.target_slot.replace(IDEA_MARKER, idea.render()))
    return "\n".join(parts)


_HEADER = """\
You design tiny single-room text adventure games. For the given game idea,
answer with exactly three sections named "Task sequence:", "Objects:" and
"Actions:".

Task sequence lists the player commands that solve the game, one per line,
numbered. A line "parallel: a | b" may follow to mark steps that can happen
in either order.

Objects starts with a "room:" line (name | description) and then one line
per object: "- name: kind, location, properties: ... | description". Kinds
are portable, container, supporter, device or fixture.

Actions has a "default:" line naming built-in verbs used (take, drop, open,
close, put-in, put-on, turn-on, turn-off, examine, inventory) and one
"custom:" line per special action:
"custom: template | requires: ... | effects: ... | success: ... | failure: ...".
Templates may use slots like <container> or <portable>. Requirements look
like "<container> has empty", "pot in inventory", "done open cabinet".
Effects look like "set filled on <container>", "clear empty on pot",
"move pasta to in pot", "consume soap". An optional "Goal:" section may
give the player-facing goal text."""

_EXAMPLE_WASH = ("washing hands", """\
Goal:
Your hands are grubby. Wash them at the basin.

Task sequence:
1. turn on tap
2. take soap
3. scrub hands with soap
4. turn off tap

Objects:
room: washroom | A chilly washroom with a cracked mirror.
- tap: device, washroom, properties: switchable, off | A squeaky brass tap.
- soap: portable, washroom, properties: | A thin bar of soap.
- basin: fixture, washroom, properties: | A stone basin.
- mirror: fixture, washroom, properties: | Your reflection looks hopeful.

Actions:
default: take, drop, turn-on, turn-off, examine, inventory
custom: scrub hands with <portable> | requires: <portable> in inventory; tap has on | effects: consume <portable> | success: You lather up and rinse. Much better. | failure: You need running water and something to scrub with.""")

_EXAMPLE_CANDLE = ("lighting a candle", """\
Goal:
The power is out. Get the candle lit.

Task sequence:
1. open drawer
2. take matches
3. take candle
4. light candle with matches
parallel: take matches | take candle

Objects:
room: parlor | A dim parlor with heavy curtains.
- drawer: container, parlor, properties: openable, closed | A shallow oak drawer.
- matches: portable, in drawer, properties: | A box of safety matches.
- candle: portable, parlor, properties: | A stubby white candle.
- table: supporter, parlor, properties: | A round card table.

Actions:
default: take, drop, open, close, examine, inventory
custom: light candle with <portable> | requires: candle in inventory; <portable> in inventory | effects: set lit on candle | success: The wick catches and the shadows retreat. | failure: You have nothing to light it with.""")

_EXAMPLE_PLANT = ("watering a plant", """\
Goal:
The fern is wilting. Give it a drink.

Task sequence:
1. take watering can
2. fill watering can with water
3. water fern with watering can

Objects:
room: sunroom | A bright sunroom full of dusty pots.
- watering can: portable, sunroom, properties: empty | A green tin watering can.
- fern: fixture, sunroom, properties: | It droops accusingly.
- spigot: fixture, sunroom, properties: | A low copper spigot.

Actions:
default: take, drop, examine, inventory
custom: fill watering can with water | requires: watering can in inventory; watering can has empty | effects: clear empty on watering can; set filled on watering can | success: Water gurgles into the can. | failure: You should pick it up first.
custom: water fern with <portable> | requires: <portable> has filled | effects: set watered on fern; clear filled on <portable>; set empty on <portable> | success: The fern perks up almost at once. | failure: The can is dry.""")


def default_template() -> PromptTemplate:
    """The stock three-example template used by the CLI and tests."""
    return PromptTemplate(
        instruction_header=_HEADER,
        example_blocks=(_EXAMPLE_WASH, _EXAMPLE_CANDLE, _EXAMPLE_PLANT),
    )
