"""Rule-based extraction of the three response sections.

A usable completion contains "Task sequence:", "Objects:" and "Actions:"
headers, each on its own line.  Anything before the first recognized header
is chatter and gets dropped.  parse_response(x.render()) == x for every x
this parser produces, which pins the format down as an exact grammar rather
than a vague convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import EmptySection, MissingSection

SECTION_NAMES = ("goal", "task sequence", "objects", "actions")

_HEADER_RE = re.compile(r"^(goal|task sequence|objects|actions)\s*:\s*$",
                        re.IGNORECASE)
_NUMBERED_RE = re.compile(r"^(?:\d+[.)]|[-*])\s*(.+)$")


@dataclass(frozen=True)
class ObjectLine:
    name: str
    kind: str
    location: str
    properties: tuple[str, ...] = ()
    description: str = ""


@dataclass(frozen=True)
class ParsedSections:
    task_sequence: tuple[str, ...]
    objects: tuple[ObjectLine, ...]
    default_verbs: tuple[str, ...]
    custom_lines: tuple[str, ...]
    parallel_groups: tuple[tuple[str, ...], ...] = ()
    room: tuple[str, str] | None = None
    goal: str = ""

    def render(self) -> str:
        out = []
        if self.goal:
            out += ["Goal:", self.goal, ""]
        out.append("Task sequence:")
        out += [f"{i}. {task}" for i, task in enumerate(self.task_sequence, 1)]
        out += [f"parallel: {' | '.join(g)}" for g in self.parallel_groups]
        out.append("")
        out.append("Objects:")
        if self.room is not None:
            name, desc = self.room
            out.append(f"room: {name} | {desc}" if desc else f"room: {name}")
        for obj in self.objects:
            line = f"- {obj.name}: {obj.kind}, {obj.location}, properties: " \
                   + ", ".join(obj.properties)
            if obj.description:
                line += f" | {obj.description}"
            out.append(line)
        out.append("")
        out.append("Actions:")
        if self.default_verbs:
            out.append("default: " + ", ".join(self.default_verbs))
        out += [f"custom: {line}" for line in self.custom_lines]
        return "\n".join(out) + "\n"


def _split_sections(raw: str) -> dict[str, list[str]]:
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for line in raw.splitlines():
        m = _HEADER_RE.match(line.strip())
        if m:
            current = sections.setdefault(m.group(1).lower(), [])
            continue
        if current is not None:
            current.append(line.rstrip())
    return sections


def parse_response(raw: str) -> ParsedSections:
    """Extract structured sections from completion text."""
    sections = _split_sections(raw)
    for name in ("task sequence", "objects", "actions"):
        if name not in sections:
            raise MissingSection(name)

    tasks: list[str] = []
    groups: list[tuple[str, ...]] = []
    for line in sections["task sequence"]:
        text = line.strip()
        if not text:
            continue
        if text.lower().startswith("parallel:"):
            members = tuple(p.strip().lower()
                            for p in text[len("parallel:"):].split("|")
                            if p.strip())
            if members:
                groups.append(members)
            continue
        m = _NUMBERED_RE.match(text)
        tasks.append((m.group(1) if m else text).strip().lower())
    if not tasks:
        raise EmptySection("task sequence")

    room: tuple[str, str] | None = None
    objects: list[ObjectLine] = []
    for line in sections["objects"]:
        text = line.strip()
        if not text:
            continue
        if text.lower().startswith("room:"):
            body = text[len("room:"):].strip()
            name, _, desc = body.partition("|")
            room = (name.strip().lower(), desc.strip())
            continue
        obj = _parse_object_line(text)
        if obj is not None:
            objects.append(obj)
    if not objects:
        raise EmptySection("objects")

    default_verbs: list[str] = []
    custom_lines: list[str] = []
    for line in sections["actions"]:
        text = line.strip()
        if not text:
            continue
        if text.lower().startswith("default:"):
            for verb in text[len("default:"):].split(","):
                verb = verb.strip().lower().replace(" ", "-")
                if verb:
                    default_verbs.append(verb)
        elif text.lower().startswith("custom:"):
            custom_lines.append(text[len("custom:"):].strip())
    if not default_verbs and not custom_lines:
        raise EmptySection("actions")

    goal = "\n".join(l.strip() for l in sections.get("goal", [])
                     if l.strip())

    return ParsedSections(
        task_sequence=tuple(tasks),
        objects=tuple(objects),
        default_verbs=tuple(default_verbs),
        custom_lines=tuple(custom_lines),
        parallel_groups=tuple(groups),
        room=room,
        goal=goal,
    )


def _parse_object_line(text: str) -> ObjectLine | None:
    body = text[1:].strip() if text.startswith(("-", "*")) else text
    name, sep, remainder = body.partition(":")
    if not sep or not name.strip():
        return None
    attrs, _, description = remainder.partition("|")
    attrs, _, props_text = attrs.partition("properties:")
    fields = [f.strip().lower() for f in attrs.split(",") if f.strip()]
    if len(fields) < 2:
        return None
    properties = tuple(p.strip().lower() for p in props_text.split(",")
                       if p.strip())
    return ObjectLine(
        name=name.strip().lower(),
        kind=fields[0],
        location=", ".join(fields[1:]),
        properties=properties,
        description=description.strip(),
    )
