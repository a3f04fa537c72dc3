"""End-to-end smoke of the python bindings against the shipped games."""

import os

import pytest

import recert

GAMES = os.environ["RECERT_GAMES_DIR"]


def load(stem):
    return recert.Game.load(os.path.join(GAMES, stem + ".game"))


def test_load_and_shape():
    game = load("signal")
    assert game.name == "signal"
    assert game.initial == "s0"
    assert game.players == ["P1", "P2"]
    assert "m1a" in game.states
    assert game.has_objective
    assert game.validate() == []


def test_json_round_trip():
    game = load("veil_and_reveal")
    again = recert.Game.from_json(game.to_json())
    assert again.states == game.states
    assert again.to_json() == game.to_json()


def test_parse_error():
    with pytest.raises(recert.ParseError):
        recert.Game.from_json("{ not json")
    with pytest.raises(recert.ParseError):
        recert.Game.from_json('{"states": ["a", "a"]}')


def test_certainty_verdicts():
    assert load("signal").certainty() == {
        "recurring": True,
        "minimal_period": 2,
        "automaton_bound": load("signal").certainty()["automaton_bound"],
    }
    fog = load("eternal_fog").certainty()
    assert fog["recurring"] is False
    assert fog["witness"]["prefix"][0] == ["s0", "u1"]


def test_attains_certainty():
    game = load("veil_and_reveal")
    assert game.attains_certainty(["s0"], [])
    assert not game.attains_certainty(["s0", "u1"], [["w", "w"]])
    assert game.attains_certainty(["s0", "u1", "s0"], [["w", "w"], ["w", "w"]])
    with pytest.raises(ValueError):
        game.attains_certainty(["s0", "s0"], [["w", "w"]])


def test_track():
    report = load("signal").track()
    assert report["recurring"] is True
    assert report["nodes"] == 10
    assert report["models"][0] == ["s0"]
    with pytest.raises(recert.NodeLimitError):
        load("eternal_fog").track(node_limit=4)


def test_solve_and_synthesise():
    won = load("signal").solve()
    assert won["coalition_wins"] is True
    assert won["parity_nodes"] == 27

    lost = load("no_signal").solve()
    assert lost["coalition_wins"] is False
    with pytest.raises(ValueError):
        load("no_signal").synthesise()

    game = load("signal")
    strategies = game.synthesise()
    verdict = game.verify(strategies)
    assert verdict["pass"] is True

    run = game.simulate(strategies, steps=12, seed=7)
    assert run["ok"] is True
    assert len(run["play"][0]) == 13
    assert run["gap_histogram"] == {1: 3, 3: 3}


def test_run_cli():
    code, out, err = recert.run_cli(["certainty", os.path.join(GAMES, "signal.game")])
    assert code == 0
    assert "recurring certainty: yes" in out
    assert err == ""

    code, _, err = recert.run_cli(["certainty", "/nonexistent.game"])
    assert code == 2
    assert "cannot open" in err
