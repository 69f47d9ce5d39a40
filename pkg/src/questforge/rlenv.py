"""Episodic environment wrapper over the game engine.

Presents the reset/step contract agents train against: four separate text
observation channels, integer rewards equal to engine score deltas, a hard
step cap, and sticky termination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import init_world, parse_command, step, waste_move
from .engine.runtime import StepResult
from .errors import CommandError, EpisodeFinished
from .gamespec import GameSpec, max_score


@dataclass(frozen=True)
class EnvConfig:
    max_steps: int = 50
    failure_penalty_enabled: bool = False
    failure_penalty: int = 1

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class Observation:
    feedback: str
    room_description: str
    inventory: str
    admissible_commands: tuple[str, ...]


@dataclass(frozen=True)
class EnvStep:
    observation: Observation
    reward: int
    done: bool
    info: dict = field(default_factory=dict)


class TextGameEnv:
    """One playable episode at a time over a fixed GameSpec."""

    def __init__(self, spec: GameSpec, config: EnvConfig | None = None):
        self.spec = spec
        self.config = config or EnvConfig()
        self._state = None

    def reset(self, seed: int = 0) -> EnvStep:
        self._state, result = init_world(self.spec, seed)
        return self._wrap(result, reward=0)

    def env_step(self, action_text: str) -> EnvStep:
        """Execute one player command; unparseable text wastes the move."""
        if self._state is None:
            raise EpisodeFinished("reset() must be called first")
        if self._state.done:
            raise EpisodeFinished()
        try:
            cmd = parse_command(action_text, self._state, self.spec)
        except CommandError:
            self._state, result = waste_move(self._state, self.spec)
            return self._finish(result, reward=0)
        penalty = (self.config.failure_penalty
                   if self.config.failure_penalty_enabled else 0)
        self._state, result = step(self._state, cmd, self.spec,
                                   failure_penalty=penalty)
        return self._finish(result, reward=result.score_delta)

    def _finish(self, result: StepResult, reward: int) -> EnvStep:
        if self._state.moves >= self.config.max_steps and not self._state.done:
            self._state.done = True
            result = StepResult(
                feedback=result.feedback,
                score_delta=result.score_delta,
                done=True,
                admissible=(),
                room_description=result.room_description,
                inventory_text=result.inventory_text,
            )
        return self._wrap(result, reward)

    def _wrap(self, result: StepResult, reward: int) -> EnvStep:
        state = self._state
        return EnvStep(
            observation=Observation(
                feedback=result.feedback,
                room_description=result.room_description,
                inventory=result.inventory_text,
                admissible_commands=result.admissible,
            ),
            reward=reward,
            done=state.done,
            info={
                "score": state.score,
                "max_score": max_score(self.spec),
                "moves": state.moves,
                "won": state.done and not state.failed
                       and state.score == max_score(self.spec),
            },
        )

    def normalized_score(self) -> float:
        """Current score as a fraction of the best achievable."""
        if self._state is None:
            raise EpisodeFinished("reset() must be called first")
        total = max_score(self.spec)
        return self._state.score / total if total else 0.0
