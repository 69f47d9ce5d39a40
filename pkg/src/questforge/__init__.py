"""Generate, certify and learn small interactive-fiction games.

The package turns a one-line game idea into a playable text game: a language
model (or a canned fixture) fills a structured template, the result is parsed
into a declarative :class:`~questforge.gamespec.GameSpec`, an exhaustive
search proves the game winnable, and a recurrent actor-critic agent can be
pretrained on a bundled corpus of such games.
"""

from .errors import (
    MalformedJson,
    NotWinnable,
    QuestForgeError,
    SpecError,
)
from .gamespec import GameSpec, max_score, parse_spec, serialize_spec

__version__ = "0.1.0"

__all__ = [
    "GameSpec",
    "MalformedJson",
    "NotWinnable",
    "QuestForgeError",
    "SpecError",
    "max_score",
    "parse_spec",
    "serialize_spec",
    "__version__",
]
