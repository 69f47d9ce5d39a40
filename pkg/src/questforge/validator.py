"""Exhaustive game certification by breadth-first state-space search.

Every admissible command is expanded from every reachable state, with
canonical-key deduplication, so the search is complete up to the depth cap.
Breadth-first order means the first win found is also a shortest one, which
is what the minimal-solution statistics require.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .engine import admissible_commands, apply_command, canonical_key, init_state, parse_command
from .errors import NotWinnable, StateSpaceOverflow
from .gamespec import GameSpec, max_score

DEFAULT_MAX_DEPTH = 25
DEFAULT_STATE_CAP = 1_000_000

# Builtin verbs that observe the world without touching it.  Expanding them
# would re-derive the same canonical state, so the search skips them; custom
# actions that happen to reuse these words still parse as customs and are
# always expanded.
_OBSERVATION_VERBS = frozenset({"look", "inventory", "examine"})


@dataclass(frozen=True)
class ExplorationReport:
    winnable: bool
    min_steps: int | None
    reachable_rewards: frozenset[int]
    unreachable_rewards: frozenset[int]
    visited_states: int
    dead_states: int
    truncated: bool
    solution: tuple[str, ...] | None    # one shortest winning command sequence

    def __post_init__(self):
        if self.winnable:
            assert self.min_steps is not None
            assert not self.unreachable_rewards


@dataclass(frozen=True)
class CorpusStats:
    min_actions_mean: float
    min_actions_std: float
    rewards_per_game_mean: float
    rewards_per_game_std: float
    skills_per_game_mean: float
    skills_per_game_std: float
    game_count: int


def explore(spec: GameSpec, max_depth: int = DEFAULT_MAX_DEPTH,
            max_states: int = DEFAULT_STATE_CAP) -> ExplorationReport:
    """Map the full transition graph of a game, up to max_depth moves.

    Raises StateSpaceOverflow when the number of distinct states passes
    max_states; reports rather than raises on the depth cap (truncated).
    """
    start = init_state(spec)
    start_key = canonical_key(start)
    target = max_score(spec)

    depth = {start_key: 0}
    parent: dict = {start_key: None}
    states = {start_key: start}
    # edges as (from_key, to_key, score_gained) for dead-state analysis
    edges: list[tuple] = []
    queue = deque([start_key])

    win_key = None
    truncated = False
    reachable: set[int] = set(start.collected_rewards)

    while queue:
        key = queue.popleft()
        state = states[key]
        if state.done:
            continue
        if depth[key] >= max_depth:
            truncated = True
            continue
        for text in admissible_commands(state, spec):
            cmd = parse_command(text, state, spec)
            if cmd.custom is None and cmd.verb in _OBSERVATION_VERBS:
                continue
            nxt, _, _ = apply_command(state, cmd, spec)
            nkey = canonical_key(nxt)
            gained = nxt.score - state.score
            edges.append((key, nkey, gained))
            if nkey in depth:
                continue
            if len(depth) >= max_states:
                raise StateSpaceOverflow(max_states)
            depth[nkey] = depth[key] + 1
            parent[nkey] = (key, text)
            states[nkey] = nxt
            reachable |= nxt.collected_rewards
            if win_key is None and nxt.done and not nxt.failed \
                    and nxt.score == target:
                win_key = nkey
            queue.append(nkey)

    solution = _backtrack(parent, win_key) if win_key is not None else None
    all_rewards = set(range(len(spec.rewards)))
    return ExplorationReport(
        winnable=win_key is not None,
        min_steps=depth[win_key] if win_key is not None else None,
        reachable_rewards=frozenset(reachable),
        unreachable_rewards=frozenset(all_rewards - reachable),
        visited_states=len(depth),
        dead_states=_count_dead(states, edges),
        truncated=truncated,
        solution=solution,
    )


def _backtrack(parent, key) -> tuple[str, ...]:
    commands = []
    while parent[key] is not None:
        key, text = parent[key]
        commands.append(text)
    return tuple(reversed(commands))


def _count_dead(states, edges) -> int:
    """Non-terminal states from which no further reward can ever be collected.

    A state is live if some path out of it crosses a score-gaining edge.
    Computed by reverse reachability from the sources of those edges.
    """
    live: set = {src for src, _dst, gained in edges if gained > 0}
    incoming: dict = {}
    for src, dst, _gained in edges:
        incoming.setdefault(dst, set()).add(src)
    frontier = deque(live)
    while frontier:
        node = frontier.popleft()
        for prev in incoming.get(node, ()):
            if prev not in live:
                live.add(prev)
                frontier.append(prev)
    return sum(1 for key, state in states.items()
               if not state.done and key not in live)


def min_steps(spec: GameSpec, max_depth: int = DEFAULT_MAX_DEPTH) -> int:
    """Length of a shortest winning command sequence."""
    report = explore(spec, max_depth=max_depth)
    if not report.winnable:
        raise NotWinnable([spec.id])
    return report.min_steps


def corpus_stats(specs: list[GameSpec],
                 max_depth: int = DEFAULT_MAX_DEPTH) -> CorpusStats:
    """Solvability statistics across a game collection.

    Standard deviations are population deviations, matching how reference
    tables for small fixed corpora are usually reported.
    """
    losers = []
    lengths = []
    for spec in specs:
        report = explore(spec, max_depth=max_depth)
        if not report.winnable:
            losers.append(spec.id)
        else:
            lengths.append(report.min_steps)
    if losers:
        raise NotWinnable(losers)
    lengths = np.array(lengths, dtype=float)
    rewards = np.array([len(s.rewards) for s in specs], dtype=float)
    skills = np.array([len(s.custom_actions) for s in specs], dtype=float)
    return CorpusStats(
        min_actions_mean=float(lengths.mean()),
        min_actions_std=float(lengths.std()),
        rewards_per_game_mean=float(rewards.mean()),
        rewards_per_game_std=float(rewards.std()),
        skills_per_game_mean=float(skills.mean()),
        skills_per_game_std=float(skills.std()),
        game_count=len(specs),
    )
