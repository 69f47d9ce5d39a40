"""The bundled game corpus and the idea lists it was generated from.

Twenty-one kitchen games form the pretraining set and six workshop games
form the transfer set.  Each game was produced by running the generation
pipeline against the canned responses under ``data/fixtures`` and committing
the resulting ``.game.json`` documents under ``data/games``, so loading a
game never touches the network.  ``scripts/build_corpus.py`` regenerates the
committed files from the fixtures.
"""

from __future__ import annotations

import pathlib
from importlib import resources

from .gamespec import GameSpec, parse_spec
from .llmgen import FixtureClient, GameIdea, GenerationResult, generate_game

PRETRAIN_IDEAS: tuple[str, ...] = (
    "cooking pasta",
    "brewing tea",
    "making coffee",
    "boiling an egg",
    "making toast",
    "making a sandwich",
    "cooking rice",
    "making oatmeal",
    "heating soup",
    "making hot chocolate",
    "making lemonade",
    "tossing a salad",
    "baking cookies",
    "popping popcorn",
    "frying an egg",
    "pouring cereal",
    "steaming vegetables",
    "making grilled cheese",
    "making pancakes",
    "roasting potatoes",
    "blending a smoothie",
)

TRANSFER_IDEAS: tuple[str, ...] = (
    "fixing a wobbly chair",
    "painting a shelf",
    "hanging a picture",
    "repairing a toy car",
    "building a birdhouse",
    "oiling a squeaky hinge",
)


def _data_root() -> pathlib.Path:
    return pathlib.Path(str(resources.files("questforge") / "data"))


def fixtures_dir() -> pathlib.Path:
    return _data_root() / "fixtures"


def games_dir() -> pathlib.Path:
    return _data_root() / "games"


def game_path(game_id: str) -> pathlib.Path:
    """Committed location of a bundled game, whichever split it lives in."""
    for split in ("pretrain", "transfer"):
        path = games_dir() / split / f"{game_id}.game.json"
        if path.is_file():
            return path
    raise FileNotFoundError(f"no bundled game named {game_id!r}")


def load_game(game_id: str) -> GameSpec:
    return parse_spec(game_path(game_id).read_text(encoding="utf-8"))


def _load_split(split: str) -> list[GameSpec]:
    directory = games_dir() / split
    specs = [parse_spec(p.read_text(encoding="utf-8"))
             for p in sorted(directory.glob("*.game.json"))]
    if not specs:
        raise FileNotFoundError(f"no games found under {directory}")
    return specs


def pretrain_games() -> list[GameSpec]:
    return _load_split("pretrain")


def transfer_games() -> list[GameSpec]:
    return _load_split("transfer")


def all_games() -> list[GameSpec]:
    return pretrain_games() + transfer_games()


def generate_corpus(ideas: tuple[str, ...] | None = None,
                    directory: str | pathlib.Path | None = None,
                    ) -> list[GenerationResult]:
    """Run the full generation pipeline against the canned fixtures.

    This is what produced the committed corpus; it stays exposed so tests can
    confirm the committed files match a fresh regeneration byte for byte.
    """
    client = FixtureClient(directory or fixtures_dir())
    chosen = PRETRAIN_IDEAS + TRANSFER_IDEAS if ideas is None else ideas
    return [generate_game(GameIdea(idea), client) for idea in chosen]
