#!/usr/bin/env python3
"""Regenerate the committed game corpus from the canned fixture responses.

Writes one .game.json per idea under src/questforge/data/games/{pretrain,
transfer} and prints per-game difficulty numbers: shortest solution, state
count, and how a uniform-random player fares over 100 capped episodes.
"""

from __future__ import annotations

import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from questforge.corpus import PRETRAIN_IDEAS, TRANSFER_IDEAS, fixtures_dir
from questforge.gamespec import serialize_spec
from questforge.llmgen import FixtureClient, GameIdea, generate_game
from questforge.rlenv import EnvConfig, TextGameEnv
from questforge.validator import explore

EPISODES = 100
MAX_MOVES = 50


def random_baseline(spec, episodes=EPISODES, seed=0):
    env = TextGameEnv(spec, EnvConfig(max_steps=MAX_MOVES))
    rng = np.random.default_rng(seed)
    scores, moves = [], []
    for ep in range(episodes):
        step = env.reset(seed=ep)
        while not step.done:
            actions = step.observation.admissible_commands
            step = env.env_step(actions[rng.integers(len(actions))])
        scores.append(env.normalized_score())
        moves.append(step.info["moves"])
    return float(np.mean(scores)), float(np.mean(moves))


def main():
    games_root = ROOT / "src" / "questforge" / "data" / "games"
    client = FixtureClient(fixtures_dir())
    rows = []
    for split, ideas in (("pretrain", PRETRAIN_IDEAS),
                         ("transfer", TRANSFER_IDEAS)):
        out_dir = games_root / split
        out_dir.mkdir(parents=True, exist_ok=True)
        for idea in ideas:
            result = generate_game(GameIdea(idea), client)
            spec = result.spec
            path = out_dir / f"{spec.id}.game.json"
            path.write_text(serialize_spec(spec), encoding="utf-8")
            report = explore(spec)
            score, moves = random_baseline(spec)
            rows.append((split, spec.id, report.min_steps,
                         report.visited_states, len(spec.rewards),
                         score, moves))
            print(f"{split:9s} {spec.id:24s} min={report.min_steps:<3d} "
                  f"states={report.visited_states:<6d} "
                  f"rewards={len(spec.rewards)} "
                  f"rand={score:.3f} moves={moves:.1f}")
    pre = [r for r in rows if r[0] == "pretrain"]
    print(f"\npretrain mean random score: "
          f"{np.mean([r[5] for r in pre]):.4f}")
    print(f"pretrain mean random moves: {np.mean([r[6] for r in pre]):.2f}")
    print(f"pretrain mean min steps:    {np.mean([r[2] for r in pre]):.2f}")
    alles = rows
    print(f"corpus mean random score:   {np.mean([r[5] for r in alles]):.4f}")
    print(f"corpus mean random moves:   {np.mean([r[6] for r in alles]):.2f}")
    print(f"corpus mean min steps:      {np.mean([r[2] for r in alles]):.2f}")
    print(f"corpus mean rewards/game:   {np.mean([r[4] for r in alles]):.2f}")


if __name__ == "__main__":
    main()
