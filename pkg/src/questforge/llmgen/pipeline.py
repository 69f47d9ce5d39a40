"""From parsed sections to a validated GameSpec, with retry orchestration."""

from __future__ import annotations

import hashlib
import json
import pathlib
from dataclasses import dataclass

from ..errors import (
    DuplicateEntity,
    GenerationFailed,
    ResponseFormatError,
    SpecError,
    UnmappableAction,
)
from ..gamespec import GameSpec, parse_spec, serialize_spec
from .clients import CompletionClient
from .parsing import ParsedSections, parse_response
from .prompting import GameIdea, PromptTemplate, build_prompt, default_template, slugify

KIND_SYNONYMS = {
    "portable": "portable", "container": "container", "supporter": "supporter",
    "device": "device", "fixture": "fixture",
    "thing": "portable", "item": "portable", "object": "portable",
}


@dataclass(frozen=True)
class GenerationConfig:
    k_shots: int = 3
    max_retries: int = 5
    temperature: float | None = None
    max_tokens: int | None = None

    def __post_init__(self):
        if self.k_shots < 0:
            raise ValueError("k_shots must be >= 0")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")


@dataclass(frozen=True)
class GenerationResult:
    spec: GameSpec
    attempts: int
    raw_response: str
    response_hash: str


def sections_to_spec(sections: ParsedSections, idea: GameIdea) -> GameSpec:
    """Assemble a full spec from the three sections and validate it."""
    room_name, room_desc = sections.room or ("room", "")

    entities = []
    seen: set[str] = set()
    for obj in sections.objects:
        if obj.name in seen:
            raise DuplicateEntity(obj.name)
        seen.add(obj.name)
        entities.append({
            "name": obj.name,
            "kind": KIND_SYNONYMS.get(obj.kind, obj.kind),
            "location": _normalize_location(obj.location, room_name),
            "properties": list(obj.properties),
            "description": obj.description,
        })

    customs = []
    names_taken: set[str] = set()
    for line in sections.custom_lines:
        customs.append(_parse_custom_line(line, room_name, names_taken))

    data = {
        "id": slugify(idea.idea_text),
        "title": idea.idea_text.strip().title(),
        "goal": sections.goal or f"You set out to get {idea.idea_text} done.",
        "max_steps": 50,
        "rooms": [{"name": room_name, "description": room_desc}],
        "entities": entities,
        "actions": {"default": list(sections.default_verbs),
                    "custom": customs},
        "rewards": [
            {"trigger": {"subject": "", "relation": "action_completed",
                         "argument": node}, "value": 1}
            for node in sections.task_sequence
        ],
        "task_graph": {
            "nodes": list(sections.task_sequence),
            "edges": _graph_edges(sections.task_sequence,
                                  sections.parallel_groups),
            "parallel": [list(g) for g in sections.parallel_groups],
        },
    }
    try:
        return parse_spec(json.dumps(data))
    except SpecError as exc:
        nodes = set(sections.task_sequence)
        for violation in exc.violations:
            if violation.kind == "dangling" and violation.name in nodes:
                raise UnmappableAction(violation.name) from exc
        raise


def _normalize_location(location: str, room_name: str) -> str:
    """Accept "in <room>" / "on <room>" as plain room placement."""
    loc = location.strip().lower()
    for prefix in ("in ", "on "):
        if loc.startswith(prefix) and loc[len(prefix):].strip() == room_name:
            return room_name
    return loc


def _graph_edges(tasks: tuple[str, ...],
                 groups: tuple[tuple[str, ...], ...]) -> list[list[str]]:
    """Linear chain over the task order, widened at parallel groups.

    Consecutive tasks that share an annotated group form one segment; every
    member of a segment precedes every member of the next.
    """
    member_of = {}
    for i, group in enumerate(groups):
        for node in group:
            member_of[node] = i

    segments: list[list[str]] = []
    for task in tasks:
        group = member_of.get(task)
        if (segments and group is not None
                and member_of.get(segments[-1][-1]) == group):
            segments[-1].append(task)
        else:
            segments.append([task])

    edges = []
    for before, after in zip(segments, segments[1:]):
        for a in before:
            for b in after:
                edges.append([a, b])
    return edges


def _parse_custom_line(line: str, room_name: str, taken: set[str]) -> dict:
    """Decode one "custom:" action description.

    Grammar: template | aliases: a; b | requires: p; p | effects: e; e
             | success: text | failure: text | fatal
    """
    parts = [p.strip() for p in line.split("|")]
    template = parts[0].lower()
    if not template:
        raise UnmappableAction(line)
    action = {
        "name": _derive_name(template, taken),
        "template": template,
        "aliases": [],
        "preconditions": [],
        "effects": [],
        "success": "",
        "failure": "",
        "fatal": False,
    }
    for part in parts[1:]:
        key, sep, value = part.partition(":")
        key = key.strip().lower()
        value = value.strip()
        if key == "fatal" and not sep:
            action["fatal"] = True
        elif key == "aliases":
            action["aliases"] = [a.strip().lower()
                                 for a in value.split(";") if a.strip()]
        elif key == "requires":
            action["preconditions"] = [
                _parse_requirement(p, line, room_name)
                for p in value.split(";") if p.strip()
            ]
        elif key == "effects":
            action["effects"] = [
                _parse_effect(e, line, room_name)
                for e in value.split(";") if e.strip()
            ]
        elif key == "success":
            action["success"] = value
        elif key == "failure":
            action["failure"] = value
        else:
            raise UnmappableAction(line)
    return action


def _derive_name(template: str, taken: set[str]) -> str:
    literals = [w for w in template.split() if not w.startswith("<")]
    if not literals:
        raise UnmappableAction(template)
    candidates = [literals[0], "-".join(literals)]
    candidates += [f"{literals[0]}-{i}" for i in range(2, 10)]
    for name in candidates:
        if name not in taken:
            taken.add(name)
            return name
    raise UnmappableAction(template)


def _parse_requirement(text: str, line: str, room_name: str) -> dict:
    text = text.strip().lower()
    if text.startswith("done "):
        return {"subject": "", "relation": "action_completed",
                "argument": text[len("done "):].strip()}
    if text.endswith(" in inventory"):
        return {"subject": text[:-len(" in inventory")].strip(),
                "relation": "in_inventory", "argument": ""}
    if " has " in text:
        subject, _, flag = text.partition(" has ")
        return {"subject": subject.strip(), "relation": "has_flag",
                "argument": flag.strip()}
    if " at " in text:
        subject, _, where = text.partition(" at ")
        return {"subject": subject.strip(), "relation": "in_location",
                "argument": _normalize_location(where, room_name)}
    raise UnmappableAction(line)


def _parse_effect(text: str, line: str, room_name: str) -> dict:
    text = text.strip().lower()
    if text.startswith("set "):
        flag, sep, subject = text[len("set "):].partition(" on ")
        if sep:
            return {"kind": "set_flag", "subject": subject.strip(),
                    "argument": flag.strip()}
    elif text.startswith("clear "):
        flag, sep, subject = text[len("clear "):].partition(" on ")
        if sep:
            return {"kind": "clear_flag", "subject": subject.strip(),
                    "argument": flag.strip()}
    elif text.startswith("move "):
        subject, sep, where = text[len("move "):].rpartition(" to ")
        if sep:
            return {"kind": "move_entity", "subject": subject.strip(),
                    "argument": _normalize_location(where, room_name)}
    elif text.startswith("consume "):
        return {"kind": "consume_entity",
                "subject": text[len("consume "):].strip(), "argument": ""}
    raise UnmappableAction(line)


def generate_game(idea: GameIdea, client: CompletionClient,
                  config: GenerationConfig | None = None,
                  template: PromptTemplate | None = None,
                  review_dir: str | pathlib.Path | None = None,
                  ) -> GenerationResult:
    """Prompt, parse, validate; retry on bad content up to max_retries.

    Transport problems (ClientError) abort immediately; only malformed or
    invalid content is retried.  On success the spec and a small metadata
    record are written to review_dir for human inspection, when given.
    """
    config = config or GenerationConfig()
    template = template or default_template()
    if len(template.example_blocks) < config.k_shots:
        raise ValueError(f"template has {len(template.example_blocks)} "
                         f"examples, need {config.k_shots}")
    trimmed = PromptTemplate(
        instruction_header=template.instruction_header,
        example_blocks=template.example_blocks[:config.k_shots],
        target_slot=template.target_slot,
    )
    prompt = build_prompt(idea, trimmed)

    errors: list[str] = []
    for attempt in range(1, config.max_retries + 1):
        raw = client.complete(prompt, temperature=config.temperature,
                              max_tokens=config.max_tokens)
        try:
            sections = parse_response(raw)
            spec = sections_to_spec(sections, idea)
        except (ResponseFormatError, DuplicateEntity, UnmappableAction,
                SpecError) as exc:
            errors.append(f"attempt {attempt}: {exc}")
            continue
        result = GenerationResult(
            spec=spec,
            attempts=attempt,
            raw_response=raw,
            response_hash=hashlib.sha256(raw.encode()).hexdigest(),
        )
        if review_dir is not None:
            _write_review(result, idea, pathlib.Path(review_dir))
        return result
    raise GenerationFailed(config.max_retries, errors)


def _write_review(result: GenerationResult, idea: GameIdea,
                  out: pathlib.Path):
    out.mkdir(parents=True, exist_ok=True)
    slug = result.spec.id
    (out / f"{slug}.game.json").write_text(serialize_spec(result.spec),
                                           encoding="utf-8")
    meta = {
        "idea": idea.idea_text,
        "attempts": result.attempts,
        "response_sha256": result.response_hash,
    }
    (out / f"{slug}.meta.json").write_text(json.dumps(meta, indent=2) + "\n",
                                           encoding="utf-8")
