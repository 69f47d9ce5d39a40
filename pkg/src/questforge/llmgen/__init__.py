"""Game generation: prompt building, completion clients, response parsing.

The pipeline turns a one-line idea into a validated GameSpec by prompting a
completion client for a three-section game description (task sequence,
objects, actions), parsing it, and retrying until the schema checks pass.
Tests and offline use run against canned response files instead of a live
endpoint.
"""

from .clients import CompletionClient, FixtureClient, OpenAIChatClient, ScriptedClient
from .parsing import ObjectLine, ParsedSections, parse_response
from .prompting import GameIdea, PromptTemplate, build_prompt, default_template, slugify
from .pipeline import (
    GenerationConfig,
    GenerationResult,
    generate_game,
    sections_to_spec,
)

__all__ = [
    "CompletionClient",
    "FixtureClient",
    "GameIdea",
    "GenerationConfig",
    "GenerationResult",
    "ObjectLine",
    "OpenAIChatClient",
    "ParsedSections",
    "PromptTemplate",
    "ScriptedClient",
    "build_prompt",
    "default_template",
    "generate_game",
    "parse_response",
    "sections_to_spec",
    "slugify",
]
