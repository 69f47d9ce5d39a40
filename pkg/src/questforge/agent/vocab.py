"""Token vocabulary shared by all encoder channels."""

from __future__ import annotations

import re

from ..gamespec import GameSpec

PAD = 0
UNK = 1

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Words the runtime itself injects into feedback and room text.  Game specs
# never contain them, so they are seeded into every vocabulary explicitly.
_RUNTIME_WORDS = (
    "you take the drop open close put turn on off in is are a an and"
    " already have not holding see nothing special about carrying empty"
    " currently can t any such thing revealing fixed place something inside"
    " itself contain things switch no here do that s done happens locked"
    " wasted lost won"
)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on anything that is not a letter or digit."""
    return _TOKEN_RE.findall(text.lower())


class Vocab:
    """Immutable token-to-id table with reserved pad and unknown slots."""

    __slots__ = ("tokens", "_index")

    def __init__(self, tokens: tuple[str, ...]):
        if len(tokens) < 2 or tokens[0] != "<pad>" or tokens[1] != "<unk>":
            raise ValueError("vocab must start with <pad>, <unk>")
        self.tokens = tokens
        self._index = {tok: i for i, tok in enumerate(tokens)}
        if len(self._index) != len(tokens):
            raise ValueError("vocab tokens must be unique")

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.tokens == other.tokens

    def encode(self, text: str) -> tuple[int, ...]:
        index = self._index
        return tuple(index.get(tok, UNK) for tok in tokenize(text))

    @classmethod
    def build(cls, texts) -> "Vocab":
        seen = set()
        for text in texts:
            seen.update(tokenize(text))
        return cls(("<pad>", "<unk>") + tuple(sorted(seen)))

    @classmethod
    def from_specs(cls, specs) -> "Vocab":
        return cls.build(token_sources(specs))


def token_sources(specs) -> list[str]:
    """Every string a game in `specs` can surface to the player."""
    texts = [_RUNTIME_WORDS]
    for spec in specs:
        texts.append(spec.title)
        texts.append(spec.goal_text)
        for room in spec.rooms:
            texts.append(room.name)
            texts.append(room.description)
        for ent in spec.entities:
            texts.append(ent.name)
            texts.append(ent.description)
            texts.extend(ent.properties)
        for action in spec.custom_actions:
            texts.append(action.template.replace("<", " ").replace(">", " "))
            texts.extend(action.aliases)
            texts.append(action.success_text)
            texts.append(action.failure_text)
        texts.extend(spec.default_actions)
    return texts


def spec_texts(spec: GameSpec) -> list[str]:
    return token_sources([spec])
