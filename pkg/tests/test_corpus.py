"""Bundled corpus: generation fidelity, committed files, game quality."""

import pytest

from questforge.corpus import (
    PRETRAIN_IDEAS,
    TRANSFER_IDEAS,
    all_games,
    fixtures_dir,
    game_path,
    generate_corpus,
    load_game,
    pretrain_games,
    transfer_games,
)
from questforge.gamespec import max_score, serialize_spec
from questforge.llmgen import slugify
from questforge.rlenv import EnvConfig, TextGameEnv
from questforge.validator import explore

PASTA_WALKTHROUGH = (
    "open cabinet",
    "take pot",
    "fill pot with water",
    "boil water in pot",
    "take pasta",
    "put pasta in pot",
)


@pytest.fixture(scope="module")
def games():
    return {spec.id: spec for spec in all_games()}


@pytest.fixture(scope="module")
def reports(games):
    return {gid: explore(spec) for gid, spec in games.items()}


class TestIdeaLists:
    def test_split_sizes(self):
        assert len(PRETRAIN_IDEAS) == 21
        assert len(TRANSFER_IDEAS) == 6

    def test_slugs_unique(self):
        slugs = [slugify(i) for i in PRETRAIN_IDEAS + TRANSFER_IDEAS]
        assert len(set(slugs)) == len(slugs)

    def test_every_idea_has_a_canned_response(self):
        for idea in PRETRAIN_IDEAS + TRANSFER_IDEAS:
            assert (fixtures_dir() / f"{slugify(idea)}.resp.txt").is_file()


class TestGeneration:
    def test_all_fixtures_parse_first_try(self):
        for result in generate_corpus():
            assert result.attempts == 1, result.spec.id

    def test_committed_files_match_regeneration(self):
        for result in generate_corpus():
            committed = game_path(result.spec.id).read_text(encoding="utf-8")
            assert serialize_spec(result.spec) == committed, result.spec.id


class TestLoading:
    def test_split_counts(self):
        assert len(pretrain_games()) == 21
        assert len(transfer_games()) == 6

    def test_load_game_by_id(self):
        spec = load_game("brewing_tea")
        assert spec.id == "brewing_tea"
        assert spec.title

    def test_unknown_game_raises(self):
        with pytest.raises(FileNotFoundError):
            load_game("knitting_a_scarf")

    def test_ids_match_filenames(self, games):
        for gid in games:
            assert game_path(gid).name == f"{gid}.game.json"


class TestCookingPasta:
    def test_pot_starts_in_cabinet(self, games):
        spec = games["cooking_pasta"]
        assert spec.entity("pot").location == "in cabinet"

    def test_cabinet_opens_before_pot_is_taken(self, games):
        graph = games["cooking_pasta"].task_graph
        assert graph.nodes[0] == "open cabinet"
        assert ("open cabinet", "take pot") in graph.edges

    def test_initial_commands_include_opening_the_cabinet(self, games):
        env = TextGameEnv(games["cooking_pasta"])
        first = env.reset(seed=7)
        assert "open cabinet" in first.observation.admissible_commands
        assert first.info["score"] == 0

    def test_has_fill_and_boil_actions(self, games):
        names = {a.name for a in games["cooking_pasta"].custom_actions}
        assert "fill" in names
        assert "boil" in names

    def test_six_step_walkthrough_wins(self, games):
        spec = games["cooking_pasta"]
        env = TextGameEnv(spec)
        step = env.reset()
        for command in PASTA_WALKTHROUGH:
            assert not step.done
            step = env.env_step(command)
        assert step.done
        assert step.info["won"]
        assert step.info["moves"] == len(PASTA_WALKTHROUGH)
        assert step.info["score"] == max_score(spec)

    def test_shortest_solution_is_six_moves(self, reports):
        assert reports["cooking_pasta"].min_steps == 6


class TestCorpusQuality:
    def test_every_game_winnable(self, reports):
        for gid, report in reports.items():
            assert report.winnable, gid
            assert not report.unreachable_rewards, gid

    def test_shortest_solutions_are_reasonable(self, reports):
        for gid, report in reports.items():
            assert 3 <= report.min_steps <= 20, (gid, report.min_steps)

    def test_solutions_replay_to_full_score(self, games, reports):
        for gid, report in reports.items():
            env = TextGameEnv(games[gid], EnvConfig(max_steps=50))
            step = env.reset()
            for command in report.solution:
                step = env.env_step(command)
            assert step.info["won"], gid
            assert env.normalized_score() == 1.0, gid

    def test_rooms_are_single_and_named_by_setting(self, games):
        for gid, spec in games.items():
            assert len(spec.rooms) == 1, gid
            assert spec.rooms[0].name in ("kitchen", "workshop"), gid

    def test_every_game_rewards_multiple_milestones(self, games):
        for gid, spec in games.items():
            assert len(spec.rewards) >= 3, gid
