"""Command-line front end.

One executable covers the whole workflow: generate a game from an idea,
certify it winnable, export it to Inform 7, play it in a terminal REPL,
train an agent on the bundled corpus, evaluate checkpoints, and print
corpus statistics.  Exit codes: 0 success, 1 domain failure, 2 usage.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import corpus
from .agent import load_params
from .errors import QuestForgeError
from .experiments import TrainPlan, evaluate_agent, pretrain, write_run
from .gamespec import GameSpec, parse_spec
from .inform7 import emit_inform7
from .llmgen import FixtureClient, GameIdea, OpenAIChatClient, generate_game
from .rlenv import EnvConfig, TextGameEnv
from .validator import corpus_stats, explore

API_KEY_VAR = "QUESTFORGE_API_KEY"


@dataclasses.dataclass
class PlaySession:
    """Outcome of one interactive or replayed game."""
    spec_id: str
    transcript: list
    score: int
    max_score: int
    moves: int
    won: bool


# --- option plumbing --------------------------------------------------------

def _load_llm_config(path: str | None) -> dict:
    """[llm] section of an INI file as a plain dict; empty when absent."""
    if not path:
        return {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise QuestForgeError(f"config file not found: {path}")
    if parser.has_section("llm"):
        return dict(parser.items("llm"))
    return {}


def _build_client(args, settings: dict):
    """Fixture directory wins over HTTP; flags win over config; the
    environment variable wins over everything for the API key."""
    fixtures = getattr(args, "fixtures", None) or settings.get("fixtures_dir")
    if fixtures:
        return FixtureClient(fixtures)
    base_url = settings.get("base_url")
    if not base_url:
        raise QuestForgeError(
            "no LLM configured: pass --fixtures or set [llm] base_url")
    api_key = os.environ.get(API_KEY_VAR) or settings.get("api_key")
    return OpenAIChatClient(base_url=base_url,
                            model=settings.get("model", "default"),
                            api_key=api_key)


def _load_spec(token: str) -> GameSpec:
    """A positional game argument is a file path or a bundled game id."""
    path = Path(token)
    if path.is_file():
        return parse_spec(path.read_text(encoding="utf-8"))
    try:
        return corpus.load_game(token)
    except FileNotFoundError:
        raise QuestForgeError(f"no such game file or bundled id: {token}")


def _gather_specs(tokens: list[str]) -> list[GameSpec]:
    """Expand files, directories, and bundled ids; no tokens means the
    whole bundled corpus."""
    if not tokens:
        return corpus.all_games()
    specs = []
    for token in tokens:
        path = Path(token)
        if path.is_dir():
            files = sorted(path.rglob("*.game.json"))
            if not files:
                raise QuestForgeError(f"no .game.json files under {token}")
            specs.extend(parse_spec(f.read_text(encoding="utf-8"))
                         for f in files)
        else:
            specs.append(_load_spec(token))
    return specs


# --- subcommands ------------------------------------------------------------

def _cmd_generate(args) -> int:
    settings = _load_llm_config(args.config)
    client = _build_client(args, settings)
    result = generate_game(GameIdea(args.idea), client)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    from .gamespec import serialize_spec
    out_path = out_dir / f"{result.spec.id}.game.json"
    out_path.write_text(serialize_spec(result.spec), encoding="utf-8")
    print(f"wrote {out_path} (attempts: {result.attempts})")
    return 0


def _cmd_validate(args) -> int:
    specs = _gather_specs(args.games)
    header = f"{'game':30} {'winnable':8} {'min':>4} {'states':>7} {'rewards':>8}"
    print(header)
    print("-" * len(header))
    failed = 0
    for spec in specs:
        report = explore(spec)
        ok = report.winnable and not report.unreachable_rewards
        if not ok:
            failed += 1
        rewards = f"{len(report.reachable_rewards)}/{len(spec.rewards)}"
        min_steps = report.min_steps if report.winnable else "-"
        print(f"{spec.id:30} {str(ok).lower():8} {min_steps!s:>4} "
              f"{report.visited_states:>7} {rewards:>8}")
    print(f"{len(specs)} game(s), {failed} failed")
    return 1 if failed else 0


def _cmd_export(args) -> int:
    spec = _load_spec(args.game)
    source = emit_inform7(spec)
    if args.out:
        Path(args.out).write_text(source, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(source, end="")
    return 0


def _cmd_stats(args) -> int:
    specs = corpus.all_games()
    rows = []
    for spec in specs:
        report = explore(spec)
        rows.append((spec.id, report.winnable, report.min_steps,
                     report.visited_states, len(spec.rewards),
                     len(spec.custom_actions)))
    header = (f"{'game':30} {'winnable':8} {'min':>4} {'states':>7} "
              f"{'rewards':>7} {'skills':>6}")
    print(header)
    print("-" * len(header))
    for game_id, winnable, min_steps, states, rewards, skills in rows:
        print(f"{game_id:30} {str(winnable).lower():8} {min_steps!s:>4} "
              f"{states:>7} {rewards:>7} {skills:>6}")
    stats = corpus_stats(specs)
    print(f"{stats.game_count} games; min actions "
          f"{stats.min_actions_mean:.2f} +/- {stats.min_actions_std:.2f}; "
          f"rewards/game {stats.rewards_per_game_mean:.2f} +/- "
          f"{stats.rewards_per_game_std:.2f}; skills/game "
          f"{stats.skills_per_game_mean:.2f} +/- "
          f"{stats.skills_per_game_std:.2f}")
    if args.out:
        import csv
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["game", "winnable", "min_steps", "states",
                             "rewards", "skills"])
            writer.writerows(rows)
        print(f"wrote {args.out}")
    return 0


QUIT_WORDS = frozenset({"quit", "exit", "q"})


def play_repl(spec: GameSpec, show_admissible: bool = False,
              transcript_path: str | None = None, max_steps: int = 50,
              seed: int = 0, stdin=None, stdout=None) -> PlaySession:
    """Interactive loop: print the goal, read commands, print feedback.

    Scripted tests drive the same loop through the stdin/stdout
    parameters.  Any input line is acceptable; unparseable commands
    surface as in-game feedback, never as a crash.
    """
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def say(text=""):
        print(text, file=stdout)

    env = TextGameEnv(spec, EnvConfig(max_steps=max_steps))
    step = env.reset(seed=seed)
    transcript = []
    say(f"== {spec.title or spec.id} ==")
    say(spec.goal_text)
    say()
    say(step.observation.room_description)
    while not step.done:
        if show_admissible:
            say("You can: " + ", ".join(step.observation.admissible_commands))
        stdout.write("> ")
        stdout.flush()
        line = stdin.readline()
        if not line:
            break
        command = line.strip()
        if command.lower() in QUIT_WORDS:
            break
        step = env.env_step(command)
        info = step.info
        transcript.append({
            "moves": info["moves"],
            "command": command,
            "feedback": step.observation.feedback,
            "score": info["score"],
            "done": step.done,
        })
        say(step.observation.feedback)
        say(f"[score {info['score']}/{info['max_score']}  "
            f"moves {info['moves']}]")
    info = step.info
    session = PlaySession(
        spec_id=spec.id,
        transcript=transcript,
        score=info["score"],
        max_score=info["max_score"],
        moves=info["moves"],
        won=info["won"],
    )
    if session.won:
        say("You won!")
    else:
        say("Thanks for playing.")
    say(f"Final score {session.score}/{session.max_score} "
        f"in {session.moves} moves.")
    if transcript_path:
        with open(transcript_path, "w", encoding="utf-8") as fh:
            header = {"game": spec.id, "max_steps": max_steps, "seed": seed}
            fh.write(json.dumps(header) + "\n")
            for record in transcript:
                fh.write(json.dumps(record) + "\n")
        say(f"Transcript saved to {transcript_path}")
    return session


def replay_transcript(spec: GameSpec, path: str, stdout=None) -> int:
    """Re-run a saved transcript; verify the final score and moves match."""
    stdout = stdout if stdout is not None else sys.stdout
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines:
        raise QuestForgeError(f"empty transcript: {path}")
    header, records = lines[0], lines[1:]
    if header.get("game") != spec.id:
        raise QuestForgeError(
            f"transcript is for {header.get('game')!r}, not {spec.id!r}")
    env = TextGameEnv(spec, EnvConfig(max_steps=header.get("max_steps", 50)))
    step = env.reset(seed=header.get("seed", 0))
    for record in records:
        step = env.env_step(record["command"])
    info = step.info
    want_score = records[-1]["score"] if records else 0
    want_moves = records[-1]["moves"] if records else 0
    ok = info["score"] == want_score and info["moves"] == want_moves
    status = "ok" if ok else "MISMATCH"
    print(f"replayed {len(records)} step(s): score {info['score']} "
          f"moves {info['moves']} [{status}]", file=stdout)
    return 0 if ok else 1


def _cmd_play(args) -> int:
    spec = _load_spec(args.game)
    if args.replay:
        return replay_transcript(spec, args.replay)
    play_repl(spec, show_admissible=args.show_admissible,
              transcript_path=args.transcript, max_steps=args.max_steps,
              seed=args.seed)
    return 0


def _cmd_train(args) -> int:
    plan = TrainPlan(episodes=args.episodes, max_steps=args.max_steps,
                     seed=args.seed)
    run = pretrain(plan)
    evals = {
        "train_greedy": evaluate_agent(run.train_games, run.result.params,
                                       max_steps=args.max_steps),
        "heldout_greedy": evaluate_agent(run.heldout_games, run.result.params,
                                         max_steps=args.max_steps),
        "heldout_random": evaluate_agent(run.heldout_games, None, episodes=20,
                                         max_steps=args.max_steps,
                                         seed=args.seed),
    }
    run_dir = write_run(args.out, f"train-seed{args.seed}", run.result, plan,
                        evals=evals)
    for name, summary in evals.items():
        print(f"{name}: {summary.mean_normalized:.3f} "
              f"(moves {summary.mean_moves:.1f})")
    print(f"results in {run_dir}")
    return 0


def _cmd_eval(args) -> int:
    specs = _gather_specs(args.games)
    params = None
    if args.checkpoint:
        params = load_params(args.checkpoint)
    episodes = args.episodes if args.episodes else (20 if params is None else 1)
    summary = evaluate_agent(specs, params, episodes=episodes,
                             max_steps=args.max_steps, seed=args.seed)
    for game_id in sorted(summary.per_game):
        print(f"{game_id:30} {summary.per_game[game_id]:.3f}")
    agent_name = "random" if params is None else "checkpoint"
    print(f"{agent_name} mean normalized {summary.mean_normalized:.3f}, "
          f"mean moves {summary.mean_moves:.1f} "
          f"({episodes} episode(s)/game over {len(specs)} games)")
    return 0


# --- dispatch ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="questforge",
        description="Generate, validate, play, and learn text games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a game from an idea")
    p.add_argument("--idea", required=True, help="natural-language game idea")
    p.add_argument("--fixtures", help="directory of canned LLM responses")
    p.add_argument("--config", help="INI file with an [llm] section")
    p.add_argument("--out", help="output directory (default .)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("validate", help="certify games winnable")
    p.add_argument("games", nargs="*",
                   help="game files, directories, or bundled ids "
                        "(default: bundled corpus)")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("export-inform7", help="emit Inform 7 source")
    p.add_argument("game", help="game file or bundled id")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("play", help="play a game in the terminal")
    p.add_argument("game", help="game file or bundled id")
    p.add_argument("--show-admissible", action="store_true",
                   help="list available commands each turn")
    p.add_argument("--transcript", help="write a JSON-lines transcript here")
    p.add_argument("--replay", metavar="TRANSCRIPT",
                   help="re-run a saved transcript and verify the outcome")
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("train", help="train an agent on the bundled corpus")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results",
                   help="results directory (default results)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint or random play")
    p.add_argument("games", nargs="*",
                   help="game files, directories, or bundled ids "
                        "(default: bundled corpus)")
    p.add_argument("--checkpoint", help="agent checkpoint (default: random)")
    p.add_argument("--episodes", type=int, default=0,
                   help="episodes per game (default 1 greedy, 20 random)")
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("stats", help="corpus statistics report")
    p.add_argument("--out", help="also write per-game rows to this CSV")
    p.set_defaults(func=_cmd_stats)
    return parser


def dispatch(argv: list[str] | None = None) -> int:
    """Route to a subcommand; never raises, returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:       # argparse handles usage errors itself
        return int(exc.code or 0)
    try:
        return args.func(args)
    except QuestForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
