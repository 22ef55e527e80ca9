"""JSON documents for Bayesian games and strategy profiles.

Game document (schema ``boundedgames.bayesian_game/1``)::

    {
      "schema": "boundedgames.bayesian_game/1",
      "name": "...",
      "num_players": 2,
      "action_spaces": [[{"len": 1, "hex": "0"}, ...], ...],
      "type_spaces":   [[{"len": 0, "hex": "0"}], ...],
      "type_dist": [{"types": [0, 0], "p": [1, 1]}, ...],
      "utility": {"builtin": "matching_pennies"}
               | {"table": [{"actions": [0, 1], "types": [0, 0],
                             "payoffs": [[-1, 1], [1, 1]]}, ...]}
    }

Indices in ``type_dist`` and ``utility.table`` point into the per-player
spaces; rationals are ``[numerator, denominator]`` pairs.

Profile document (schema ``boundedgames.profile/1``): one entry per player,
each a list of ``{"type": i, "dist": [[action_index, [num, den]], ...]}``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .core import BayesianGame, BitString, MixedStrategy, TableUtility, TypeTable, matching_pennies

GAME_SCHEMA = "boundedgames.bayesian_game/1"
PROFILE_SCHEMA = "boundedgames.profile/1"

BUILTINS = {"matching_pennies": matching_pennies}


def _rat(x) -> list:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def _unrat(pair) -> Fraction:
    num, den = pair
    return Fraction(int(num), int(den))


def game_to_json(game: BayesianGame) -> dict:
    if not game.explicit or game.action_spaces is None or game.type_spaces is None:
        raise ValueError("only explicit games can be serialized")
    acts, typs = game.action_spaces, game.type_spaces
    if not all(isinstance(x, BitString) for space in (*acts, *typs) for x in space):
        raise ValueError("only games over bitstring action and type spaces can be serialized")
    apos = [{b: j for j, b in enumerate(s)} for s in acts]
    tpos = [{t: j for j, t in enumerate(s)} for s in typs]
    doc = {
        "schema": GAME_SCHEMA,
        "name": game.name,
        "num_players": game.num_players,
        "action_spaces": [[b.to_json() for b in s] for s in acts],
        "type_spaces": [[t.to_json() for t in s] for s in typs],
        "type_dist": [
            {"types": [tpos[i][t] for i, t in enumerate(types)], "p": _rat(p)}
            for types, p in game.type_dist.items()
        ],
    }
    if game.name in BUILTINS:
        doc["utility"] = {"builtin": game.name}
        return doc
    rows = []
    for types in itertools.product(*typs):
        for actions in itertools.product(*acts):
            rows.append(
                {
                    "actions": [apos[i][b] for i, b in enumerate(actions)],
                    "types": [tpos[i][t] for i, t in enumerate(types)],
                    "payoffs": [_rat(v) for v in game.payoffs(actions, types)],
                }
            )
    doc["utility"] = {"table": rows}
    return doc


def game_from_json(doc: dict) -> BayesianGame:
    if doc.get("schema") != GAME_SCHEMA:
        raise ValueError(f"unsupported game schema {doc.get('schema')!r}")
    util = doc["utility"]
    if "builtin" in util:
        try:
            return BUILTINS[util["builtin"]]()
        except KeyError:
            raise ValueError(f"unknown builtin game {util['builtin']!r}") from None
    k = int(doc["num_players"])
    acts = tuple(tuple(BitString.from_json(b) for b in s) for s in doc["action_spaces"])
    typs = tuple(tuple(BitString.from_json(t) for t in s) for s in doc["type_spaces"])
    dist = TypeTable(
        {tuple(typs[i][j] for i, j in enumerate(row["types"])): _unrat(row["p"]) for row in doc["type_dist"]}
    )
    table = {}
    for row in util["table"]:
        actions = tuple(acts[i][j] for i, j in enumerate(row["actions"]))
        types = tuple(typs[i][j] for i, j in enumerate(row["types"]))
        table[(actions, types)] = tuple(_unrat(v) for v in row["payoffs"])
    return BayesianGame(k, acts, typs, dist, TableUtility(table), name=doc.get("name", ""))


def profile_to_json(game: BayesianGame, profile) -> dict:
    out = []
    for i, s in enumerate(profile):
        apos = {b: j for j, b in enumerate(game.action_spaces[i])}
        out.append(
            [
                {"type": ti, "dist": [[apos[b], _rat(p)] for b, p in s.dist(t).items()]}
                for ti, t in enumerate(game.type_spaces[i])
            ]
        )
    return {"schema": PROFILE_SCHEMA, "strategies": out}


def profile_from_json(game: BayesianGame, doc: dict) -> list[MixedStrategy]:
    if doc.get("schema") != PROFILE_SCHEMA:
        raise ValueError(f"unsupported profile schema {doc.get('schema')!r}")
    profile = []
    for i, entries in enumerate(doc["strategies"]):
        acts, typs = game.action_spaces[i], game.type_spaces[i]
        profile.append(
            MixedStrategy({typs[e["type"]]: {acts[a]: _unrat(p) for a, p in e["dist"]} for e in entries})
        )
    return profile
