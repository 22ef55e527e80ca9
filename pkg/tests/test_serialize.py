import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boundedgames.core import expected_utility, matching_pennies, random_bayesian_game, random_mixed_strategy
from boundedgames.games import build_owf_game
from boundedgames.owf import OwfInstance
from boundedgames.serialize import game_from_json, game_to_json, profile_from_json, profile_to_json


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_game_and_profile_round_trip(seed):
    rng = np.random.default_rng(seed)
    game = random_bayesian_game(rng)
    profile = [random_mixed_strategy(rng, game.type_spaces[i], game.action_spaces[i]) for i in range(2)]
    g2 = game_from_json(json.loads(json.dumps(game_to_json(game))))
    p2 = profile_from_json(g2, json.loads(json.dumps(profile_to_json(game, profile))))
    assert g2.action_spaces == game.action_spaces and g2.type_spaces == game.type_spaces
    assert p2 == profile
    assert expected_utility(g2, p2) == expected_utility(game, profile)


def test_builtin_round_trip():
    doc = game_to_json(matching_pennies())
    assert doc["utility"] == {"builtin": "matching_pennies"}
    assert game_from_json(doc).name == "matching_pennies"


def test_structured_actions_rejected():
    game = build_owf_game(4, OwfInstance("random_table", 1, 0), max_key_len=2, explicit=True)
    with pytest.raises(ValueError):
        game_to_json(game)


def test_sampler_game_rejected():
    with pytest.raises(ValueError):
        game_to_json(build_owf_game(16, OwfInstance()))


def test_schema_checked():
    with pytest.raises(ValueError):
        game_from_json({"schema": "x"})
    with pytest.raises(ValueError):
        profile_from_json(matching_pennies(), {"schema": "x"})
    doc = game_to_json(matching_pennies())
    doc["utility"] = {"builtin": "nope"}
    with pytest.raises(ValueError):
        game_from_json(doc)
