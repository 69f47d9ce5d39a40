from __future__ import annotations

import pathlib

import pytest

from questforge.gamespec import GameSpec, parse_spec

DATA = pathlib.Path(__file__).parent / "data"


def load_game(name: str) -> GameSpec:
    return parse_spec((DATA / f"{name}.game.json").read_text())


@pytest.fixture
def micro_unlock() -> GameSpec:
    return load_game("micro_unlock")


@pytest.fixture
def micro_take() -> GameSpec:
    return load_game("micro_take")


@pytest.fixture
def micro_stove() -> GameSpec:
    return load_game("micro_stove")
