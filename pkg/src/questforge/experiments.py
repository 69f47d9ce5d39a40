"""Training and evaluation protocols over bundled game suites.

The building blocks are small and composable: collect one episode, train a
policy over a suite, evaluate it, and race a pretrained agent against a
fresh one on held-out games.  Everything is deterministic given the plan's
seed; repeated calls with equal inputs produce identical numbers.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .agent import (
    AgentParams,
    StepRecord,
    TrainConfig,
    Trajectory,
    Vocab,
    init_params,
    make_optimizer,
    random_policy,
    select_action,
)
from .agent.a2c import clip_gradients, compute_advantages, loss_and_grads
from .gamespec import GameSpec
from .rlenv import EnvConfig, TextGameEnv


@dataclass(frozen=True)
class TrainPlan:
    """One training run: suite-level knobs plus the per-update config.

    reuse_epochs > 1 replays each episode's fresh trajectories through
    extra gradient passes; the data is near-on-policy since each pass
    moves the parameters only slightly.

    self_imitation keeps the best-return trajectory seen on each game
    and replays it after every on-policy update, with advantages clipped
    to their positive part so the stored actions are only ever pushed up,
    never away.  Sparse-reward suites train far more reliably with it:
    one lucky rollout becomes a persistent teacher instead of a single
    gradient step.

    explore_epsilon mixes uniform-random actions into the behavior policy,
    decaying linearly to zero at episode explore_until.  Games whose first
    reward needs a long exact prefix are effectively invisible to a cold
    softmax policy; the forced exploration finds them, and self-imitation
    keeps what it finds.

    unk_dropout randomly masks word ids to the unknown token while
    collecting training trajectories (never during evaluation), so the
    policy learns to fall back on verb structure when nouns are missing,
    which is exactly its situation on games outside its vocabulary.
    """
    episodes: int = 100
    max_steps: int = 50
    seed: int = 0
    optimizer: str = "adam"
    reuse_epochs: int = 1
    self_imitation: bool = True
    sil_passes: int = 1
    sil_value_coef: float = 0.05
    explore_epsilon: float = 0.3
    explore_until: int = 50
    unk_dropout: float = 0.0
    config: TrainConfig = field(default_factory=lambda: TrainConfig(
        learning_rate=3e-3, entropy_coef=0.005))

    def __post_init__(self):
        if self.episodes < 0:
            raise ValueError("episodes must be >= 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.reuse_epochs < 1:
            raise ValueError("reuse_epochs must be >= 1")
        if self.sil_passes < 1:
            raise ValueError("sil_passes must be >= 1")
        if not 0.0 <= self.explore_epsilon <= 1.0:
            raise ValueError("explore_epsilon must be in [0, 1]")
        if not 0.0 <= self.unk_dropout < 1.0:
            raise ValueError("unk_dropout must be in [0, 1)")

    def epsilon_at(self, episode: int) -> float:
        """Uniform-mix probability for the given episode index."""
        if self.explore_until <= 0 or self.explore_epsilon <= 0.0:
            return 0.0
        return max(0.0, self.explore_epsilon * (1 - episode / self.explore_until))

    def sil_config(self) -> TrainConfig:
        """Update config for replaying stored trajectories: no entropy
        bonus (off-policy data should not flatten the policy) and a small
        value weight so stale returns barely tug the critic."""
        return TrainConfig(
            gamma=self.config.gamma,
            learning_rate=self.config.learning_rate,
            value_coef=self.sil_value_coef,
            entropy_coef=0.0,
            grad_clip=self.config.grad_clip,
        )


@dataclass(frozen=True)
class EpisodePoint:
    episode: int
    mean_score: float      # normalized score over this episode's rollouts
    mean_moves: float
    game_scores: dict = field(default_factory=dict)
    game_moves: dict = field(default_factory=dict)


@dataclass
class TrainResult:
    params: AgentParams
    curve: list[EpisodePoint]
    game_ids: tuple[str, ...]


@dataclass(frozen=True)
class EvalSummary:
    mean_normalized: float
    mean_moves: float
    per_game: dict[str, float]
    episodes: int


def split_corpus(specs: list[GameSpec], train_count: int, heldout_count: int,
                 seed: int = 0) -> tuple[list[GameSpec], list[GameSpec]]:
    """Seeded shuffle, then the first slices become train and held-out."""
    if train_count + heldout_count > len(specs):
        raise ValueError("split larger than the corpus")
    order = np.random.default_rng(seed).permutation(len(specs))
    train = [specs[i] for i in order[:train_count]]
    heldout = [specs[i] for i in order[train_count:train_count + heldout_count]]
    return train, heldout


UNK_ID = 1


def _mask_ids(ids, rng, dropout: float):
    # ids 0 and 1 are the pad and unknown reserves; only real words drop
    if dropout <= 0.0:
        return ids
    return tuple(UNK_ID if (i >= 2 and rng.random() < dropout) else i
                 for i in ids)


def collect_episode(env: TextGameEnv, params: AgentParams,
                    rng: np.random.Generator | None = None,
                    mode: str = "sample", epsilon: float = 0.0,
                    unk_dropout: float = 0.0) -> tuple[Trajectory, float, int]:
    """Play one full episode; returns (trajectory, normalized score, moves).

    Encoder activations are memoized per episode, which is safe because the
    parameters do not change mid-episode.  epsilon mixes uniform-random
    action choices into sampling mode; unk_dropout masks word ids in the
    recorded trajectory (the behavior policy always sees the clean text).
    """
    vocab = params.vocab
    cache: dict = {}
    step = env.reset()
    records = []
    while not step.done:
        obs = step.observation
        if mode == "sample" and epsilon > 0.0 and rng.random() < epsilon:
            index = int(rng.integers(len(obs.admissible_commands)))
        else:
            index, _log_prob, _value = select_action(
                params, obs.feedback, obs.inventory, obs.room_description,
                obs.admissible_commands, rng=rng, mode=mode, cache=cache)
        following = env.env_step(obs.admissible_commands[index])
        records.append(StepRecord(
            obs_ids=_mask_ids(vocab.encode(obs.feedback), rng, unk_dropout),
            inv_ids=_mask_ids(vocab.encode(obs.inventory), rng, unk_dropout),
            room_ids=_mask_ids(vocab.encode(obs.room_description), rng, unk_dropout),
            action_ids=tuple(_mask_ids(vocab.encode(a), rng, unk_dropout)
                             for a in obs.admissible_commands),
            chosen=index,
            reward=float(following.reward),
        ))
        step = following
    trajectory = Trajectory(steps=tuple(records), bootstrap=0.0,
                            game_id=env.spec.id)
    return trajectory, env.normalized_score(), step.info["moves"]


def random_episode(env: TextGameEnv, rng: np.random.Generator) -> tuple[float, int]:
    step = env.reset()
    while not step.done:
        commands = step.observation.admissible_commands
        step = env.env_step(commands[random_policy(commands, rng)])
    return env.normalized_score(), step.info["moves"]


class BestTrajectoryBuffer:
    """Per-game store of the highest-return trajectory seen so far.

    Ties are resolved toward the newer trajectory, which tends to be
    shorter once the policy starts finishing games on purpose.
    """

    def __init__(self):
        self._best: dict[str, tuple[float, Trajectory]] = {}

    def offer(self, trajectory: Trajectory) -> None:
        ret = sum(step.reward for step in trajectory.steps)
        if ret <= 0:
            return
        held = self._best.get(trajectory.game_id)
        if held is None or ret >= held[0]:
            self._best[trajectory.game_id] = (ret, trajectory)

    def get(self, game_id: str) -> Trajectory | None:
        held = self._best.get(game_id)
        return held[1] if held else None

    def __len__(self) -> int:
        return len(self._best)


def _self_imitation_update(params, optimizer, trajectory, sil_cfg):
    # positive part only: never push probability away from stored actions
    advantages = compute_advantages(params, [trajectory], sil_cfg)
    advantages = [np.clip(a, 0.0, None) for a in advantages]
    _report, grads = loss_and_grads(params, [trajectory], sil_cfg,
                                    advantages=advantages)
    clip_gradients(grads, sil_cfg.grad_clip)
    return optimizer.step(params, grads)


def train_agent(games: list[GameSpec], plan: TrainPlan | None = None,
                params: AgentParams | None = None) -> TrainResult:
    """A2C over a suite: each episode plays every game once and updates after
    each trajectory.  Pass params to continue training an existing agent
    (its vocabulary is kept; unseen words fall back to the unknown token).
    """
    plan = plan or TrainPlan()
    if not games:
        raise ValueError("need at least one game")
    if params is None:
        params = init_params(Vocab.from_specs(games), seed=plan.seed)
    optimizer = make_optimizer(plan.optimizer, plan.config.learning_rate)
    rng = np.random.default_rng(plan.seed)
    envs = [TextGameEnv(g, EnvConfig(max_steps=plan.max_steps)) for g in games]
    buffer = BestTrajectoryBuffer()
    sil_cfg = plan.sil_config()

    curve: list[EpisodePoint] = []
    for episode in range(plan.episodes):
        epsilon = plan.epsilon_at(episode)
        game_scores, game_moves, fresh = {}, {}, []
        for env in envs:
            trajectory, score, n_moves = collect_episode(
                env, params, rng, epsilon=epsilon,
                unk_dropout=plan.unk_dropout)
            report, grads = loss_and_grads(params, [trajectory], plan.config)
            clip_gradients(grads, plan.config.grad_clip)
            params = optimizer.step(params, grads)
            if plan.self_imitation:
                buffer.offer(trajectory)
                best = buffer.get(env.spec.id)
                if best is not None:
                    for _ in range(plan.sil_passes):
                        params = _self_imitation_update(
                            params, optimizer, best, sil_cfg)
            fresh.append(trajectory)
            game_scores[env.spec.id] = score
            game_moves[env.spec.id] = n_moves
        for _ in range(plan.reuse_epochs - 1):
            for trajectory in fresh:
                report, grads = loss_and_grads(params, [trajectory], plan.config)
                clip_gradients(grads, plan.config.grad_clip)
                params = optimizer.step(params, grads)
        curve.append(EpisodePoint(
            episode=episode,
            mean_score=float(np.mean(list(game_scores.values()))),
            mean_moves=float(np.mean(list(game_moves.values()))),
            game_scores=game_scores,
            game_moves=game_moves,
        ))
    return TrainResult(params=params, curve=curve,
                       game_ids=tuple(g.id for g in games))


def evaluate_agent(games: list[GameSpec], params: AgentParams | None,
                   episodes: int = 1, max_steps: int = 50, seed: int = 0,
                   mode: str = "greedy") -> EvalSummary:
    """Mean performance over a suite; params None plays uniformly at random."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.default_rng(seed)
    per_game: dict[str, float] = {}
    all_scores, all_moves = [], []
    for game in games:
        env = TextGameEnv(game, EnvConfig(max_steps=max_steps))
        scores = []
        for _ in range(episodes):
            if params is None:
                score, n_moves = random_episode(env, rng)
            else:
                _, score, n_moves = collect_episode(env, params, rng, mode=mode)
            scores.append(score)
            all_moves.append(n_moves)
        per_game[game.id] = float(np.mean(scores))
        all_scores.extend(scores)
    return EvalSummary(
        mean_normalized=float(np.mean(all_scores)),
        mean_moves=float(np.mean(all_moves)),
        per_game=per_game,
        episodes=episodes,
    )


@dataclass
class PretrainRun:
    result: TrainResult
    train_games: list[GameSpec]
    heldout_games: list[GameSpec]


def pretrain(plan: TrainPlan | None = None, train_count: int = 10,
             heldout_count: int = 5, split_seed: int = 0) -> PretrainRun:
    """The standard pretraining protocol over the bundled kitchen corpus.

    The corpus is split once with split_seed; the agent's vocabulary covers
    the whole corpus (a tokenizer choice, not a training signal: embedding
    rows for words absent from the training games receive no gradient) so
    held-out games are scored over distinct tokens rather than a shared
    unknown.  Training itself sees only the training slice.
    """
    from .agent import init_params as _init
    from .corpus import pretrain_games

    plan = plan or TrainPlan()
    games = pretrain_games()
    train, heldout = split_corpus(games, train_count, heldout_count,
                                  seed=split_seed)
    params = _init(Vocab.from_specs(games), seed=plan.seed)
    result = train_agent(train, plan, params=params)
    return PretrainRun(result=result, train_games=train,
                       heldout_games=heldout)


@dataclass(frozen=True)
class TransferArm:
    curve: tuple[float, ...]        # per-episode mean rollout score
    episodes_to_threshold: int      # 1-based; episodes+1 when never reached


@dataclass(frozen=True)
class TransferComparison:
    fresh: tuple[TransferArm, ...]         # one per seed
    pretrained: tuple[TransferArm, ...]
    threshold: float
    max_episodes: int

    def mean_fresh_episodes(self) -> float:
        return float(np.mean([a.episodes_to_threshold for a in self.fresh]))

    def mean_pretrained_episodes(self) -> float:
        return float(np.mean([a.episodes_to_threshold for a in self.pretrained]))

    def speedup(self) -> float:
        return self.mean_pretrained_episodes() / self.mean_fresh_episodes()


def _finetune_until(games, params, plan, threshold) -> TransferArm:
    """Train on the suite with the same update rule as train_agent,
    stopping once the per-episode mean rollout score reaches the
    threshold; the budget caps the run either way."""
    optimizer = make_optimizer(plan.optimizer, plan.config.learning_rate)
    rng = np.random.default_rng(plan.seed)
    envs = [TextGameEnv(g, EnvConfig(max_steps=plan.max_steps)) for g in games]
    buffer = BestTrajectoryBuffer()
    sil_cfg = plan.sil_config()
    curve = []
    hit = plan.episodes + 1
    for episode in range(plan.episodes):
        epsilon = plan.epsilon_at(episode)
        scores = []
        for env in envs:
            trajectory, score, _ = collect_episode(
                env, params, rng, epsilon=epsilon,
                unk_dropout=plan.unk_dropout)
            report, grads = loss_and_grads(params, [trajectory], plan.config)
            clip_gradients(grads, plan.config.grad_clip)
            params = optimizer.step(params, grads)
            if plan.self_imitation:
                buffer.offer(trajectory)
                best = buffer.get(env.spec.id)
                if best is not None:
                    for _ in range(plan.sil_passes):
                        params = _self_imitation_update(
                            params, optimizer, best, sil_cfg)
            scores.append(score)
        curve.append(float(np.mean(scores)))
        if curve[-1] >= threshold:
            hit = episode + 1
            break
    return TransferArm(curve=tuple(curve), episodes_to_threshold=hit)


def compare_transfer(pretrained: AgentParams, games: list[GameSpec],
                     plan: TrainPlan | None = None, threshold: float = 0.5,
                     seeds: tuple[int, ...] = (0, 1, 2)) -> TransferComparison:
    """Race a pretrained agent against a fresh one on a held-out suite.

    Both arms get identical budgets and per-seed rng streams.  The fresh
    arm builds its vocabulary from the target games; the pretrained arm
    keeps its own, mapping unseen words to the unknown token.
    """
    plan = plan or TrainPlan()
    fresh_arms, pre_arms = [], []
    for seed in seeds:
        seeded = replace(plan, seed=seed)
        fresh = init_params(Vocab.from_specs(games), seed=seed)
        fresh_arms.append(_finetune_until(games, fresh, seeded, threshold))
        pre_arms.append(_finetune_until(games, pretrained.copy(), seeded,
                                        threshold))
    return TransferComparison(
        fresh=tuple(fresh_arms),
        pretrained=tuple(pre_arms),
        threshold=threshold,
        max_episodes=plan.episodes,
    )


def write_run(directory, run_id: str, result: TrainResult,
              plan: TrainPlan, evals: dict[str, EvalSummary] | None = None,
              agent_name: str = "a2c") -> Path:
    """Persist one training run: summary.json, curves.csv, and a checkpoint.

    curves.csv carries one row per (episode, game) so external plotting
    tools can aggregate however they like.
    """
    from .agent import save_params

    run_dir = Path(directory) / run_id
    run_dir.mkdir(parents=True, exist_ok=True)

    with open(run_dir / "curves.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "agent", "game", "score", "moves"])
        for point in result.curve:
            for game_id in result.game_ids:
                writer.writerow([point.episode, agent_name, game_id,
                                 f"{point.game_scores[game_id]:.6f}",
                                 point.game_moves[game_id]])

    checkpoint = run_dir / "agent.ckpt"
    save_params(result.params, checkpoint)

    summary = {
        "run_id": run_id,
        "agent": agent_name,
        "games": list(result.game_ids),
        "plan": {
            "episodes": plan.episodes,
            "max_steps": plan.max_steps,
            "seed": plan.seed,
            "optimizer": plan.optimizer,
            "reuse_epochs": plan.reuse_epochs,
            "self_imitation": plan.self_imitation,
            "sil_passes": plan.sil_passes,
            "sil_value_coef": plan.sil_value_coef,
            "explore_epsilon": plan.explore_epsilon,
            "explore_until": plan.explore_until,
            "unk_dropout": plan.unk_dropout,
            "learning_rate": plan.config.learning_rate,
            "gamma": plan.config.gamma,
            "value_coef": plan.config.value_coef,
            "entropy_coef": plan.config.entropy_coef,
            "grad_clip": plan.config.grad_clip,
        },
        "final_train_rollout": result.curve[-1].mean_score if result.curve else None,
        "checkpoint": checkpoint.name,
    }
    if evals:
        summary["evals"] = {
            name: {
                "mean_normalized": ev.mean_normalized,
                "mean_moves": ev.mean_moves,
                "episodes": ev.episodes,
                "per_game": ev.per_game,
            }
            for name, ev in evals.items()
        }
    with open(run_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return run_dir
