"""Exception hierarchy shared by every questforge subsystem."""

from __future__ import annotations


class QuestForgeError(Exception):
    """Base class for all domain errors raised by this package."""


# --- game spec -------------------------------------------------------------

class MalformedJson(QuestForgeError):
    """The input text is not well-formed JSON."""


class SpecError(QuestForgeError):
    """A spec failed schema validation; carries the full violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.path}: {v.message}" for v in self.violations)
        super().__init__(f"invalid game spec: {lines}")


class UnsupportedConstruct(QuestForgeError):
    """A spec feature has no Inform 7 mapping."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no Inform 7 mapping for {name!r}")


# --- command parsing -------------------------------------------------------

class CommandError(QuestForgeError):
    """A player command could not be parsed against the game grammar."""


class UnknownVerb(CommandError):
    def __init__(self, word: str):
        self.word = word
        super().__init__(f"unknown verb {word!r}")


class UnresolvedNoun(CommandError):
    def __init__(self, phrase: str):
        self.phrase = phrase
        super().__init__(f"nothing called {phrase!r} here")


class AmbiguousNoun(CommandError):
    def __init__(self, phrase: str, candidates):
        self.phrase = phrase
        self.candidates = tuple(candidates)
        names = ", ".join(self.candidates)
        super().__init__(f"{phrase!r} could mean any of: {names}")


class EpisodeFinished(QuestForgeError):
    """step() was called on a finished episode."""


# --- state-space exploration ----------------------------------------------

class StateSpaceOverflow(QuestForgeError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"state-space exploration exceeded {limit} states")


class NotWinnable(QuestForgeError):
    def __init__(self, game_ids):
        self.game_ids = tuple(game_ids)
        super().__init__("not winnable: " + ", ".join(self.game_ids))


# --- LLM generation pipeline ------------------------------------------------

class ResponseFormatError(QuestForgeError):
    """A model response does not follow the requested section format."""


class MissingSection(ResponseFormatError):
    def __init__(self, name: str):
        self.section = name
        super().__init__(f"response is missing the {name!r} section")


class EmptySection(ResponseFormatError):
    def __init__(self, name: str):
        self.section = name
        super().__init__(f"response section {name!r} is empty")


class DuplicateEntity(QuestForgeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"entity {name!r} declared more than once")


class UnmappableAction(QuestForgeError):
    def __init__(self, text: str):
        self.text = text
        super().__init__(f"cannot map {text!r} to a default or custom action")


class ClientError(QuestForgeError):
    """Transport-level failure talking to a completion endpoint."""


class GenerationFailed(QuestForgeError):
    def __init__(self, attempts: int, last_errors):
        self.attempts = attempts
        self.last_errors = list(last_errors)
        detail = "; ".join(str(e) for e in self.last_errors) or "no detail"
        super().__init__(f"no valid game after {attempts} attempts ({detail})")


# --- training --------------------------------------------------------------

class NonFiniteLoss(QuestForgeError):
    """The training loss went NaN or infinite; the run must abort."""
