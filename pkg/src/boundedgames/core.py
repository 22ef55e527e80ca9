"""Finite Bayesian games, mixed strategies, expected utility and epsilon-NE checks.

All equilibrium verdicts use exact ``Fraction`` arithmetic. Floats only
appear inside the Monte Carlo estimator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np


class GameError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GameError, ValueError):
    """A strategy or profile is not defined where the game needs it."""


class UnsupportedModeError(GameError):
    """The requested exact computation needs an explicit table."""


@dataclass(frozen=True)
class BitString:
    """A finite bit sequence. Equality looks at the bits only, so "01" != "010"."""

    bits: str
    max_len: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.bits.strip("01"):
            raise ValueError(f"not a bit string: {self.bits!r}")
        if self.max_len is None:
            object.__setattr__(self, "max_len", len(self.bits))
        elif self.max_len < 0 or len(self.bits) > self.max_len:
            raise ValueError(f"length {len(self.bits)} exceeds max_len {self.max_len}")

    @classmethod
    def from_int(cls, value: int, length: int, max_len: int | None = None) -> BitString:
        if length < 0 or value < 0 or value >> length:
            raise ValueError(f"{value} does not fit in {length} bits")
        return cls(format(value, "b").zfill(length) if length else "", max_len)

    @classmethod
    def zeros(cls, length: int) -> BitString:
        return cls("0" * length)

    def to_int(self) -> int:
        return int(self.bits, 2) if self.bits else 0

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return self.bits

    def __add__(self, other: BitString) -> BitString:
        return BitString(self.bits + other.bits)

    def to_json(self) -> dict:
        return {"len": len(self.bits), "hex": format(self.to_int(), "x")}

    @classmethod
    def from_json(cls, obj: Mapping) -> BitString:
        return cls.from_int(int(obj["hex"], 16), int(obj["len"]))


def bs(bits: str) -> BitString:
    return BitString(bits)


class TypeTable:
    """Explicit joint type distribution with exact probabilities."""

    def __init__(self, probs: Mapping[tuple, Any]):
        table = {tuple(t): Fraction(p) for t, p in probs.items()}
        if any(p < 0 for p in table.values()):
            raise ValueError("negative type probability")
        if sum(table.values(), Fraction(0)) != 1:
            raise ValueError("type probabilities must sum to exactly 1")
        self.probs = table

    def items(self):
        return self.probs.items()

    def sample(self, rng: np.random.Generator) -> tuple:
        keys = list(self.probs)
        weights = np.array([float(self.probs[k]) for k in keys])
        return keys[rng.choice(len(keys), p=weights / weights.sum())]


class TypeSampler:
    """Seeded sampler over a type space too large to tabulate."""

    def __init__(self, draw: Callable[[np.random.Generator], tuple]):
        self.draw = draw

    def sample(self, rng: np.random.Generator) -> tuple:
        return self.draw(rng)


Utility = Callable[[tuple, tuple], Sequence[Fraction]]


@dataclass(frozen=True)
class BayesianGame:
    """A finite Bayesian game ``(J, B, T, P, v)``.

    ``utility(actions, types)`` returns one payoff per player. Sampler-mode
    games may leave ``action_spaces``/``type_spaces`` as ``None``.
    """

    num_players: int
    action_spaces: tuple | None
    type_spaces: tuple | None
    type_dist: TypeTable | TypeSampler
    utility: Utility
    utility_bounds: tuple | None = None
    name: str = ""
    info: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.num_players < 1:
            raise ValueError("need at least one player")
        for spaces in (self.action_spaces, self.type_spaces):
            if spaces is not None and len(spaces) != self.num_players:
                raise ValueError("one space per player required")

    @property
    def explicit(self) -> bool:
        return isinstance(self.type_dist, TypeTable)

    def payoffs(self, actions: tuple, types: tuple) -> tuple:
        return tuple(Fraction(v) for v in self.utility(tuple(actions), tuple(types)))


class MixedStrategy:
    """Per-type distribution over a player's own actions."""

    def __init__(self, table: Mapping[Any, Mapping[Any, Any]]):
        self.table = {
            t: {b: Fraction(p) for b, p in dist.items() if Fraction(p) != 0}
            for t, dist in table.items()
        }
        for t, dist in table.items():
            if any(Fraction(p) < 0 for p in dist.values()):
                raise ValueError(f"negative probability for type {t}")
            if sum((Fraction(p) for p in dist.values()), Fraction(0)) != 1:
                raise ValueError(f"probabilities for type {t} do not sum to 1")

    @classmethod
    def pure(cls, types: Iterable, action) -> MixedStrategy:
        return cls({t: {action: 1} for t in types})

    @classmethod
    def uniform(cls, types: Iterable, actions: Sequence) -> MixedStrategy:
        p = Fraction(1, len(actions))
        return cls({t: {b: p for b in actions} for t in types})

    @classmethod
    def mix(cls, lam, first: MixedStrategy, second: MixedStrategy) -> MixedStrategy:
        lam = Fraction(lam)
        table = {}
        for t in first.table:
            acts = list(dict.fromkeys([*first.table[t], *second.dist(t)]))
            table[t] = {
                b: lam * first.table[t].get(b, 0) + (1 - lam) * second.table[t].get(b, 0)
                for b in acts
            }
        return cls(table)

    def dist(self, t) -> dict:
        try:
            return self.table[t]
        except KeyError:
            raise DomainError(f"strategy undefined for type {t}") from None

    def act(self, t, rng: np.random.Generator):
        dist = self.dist(t)
        actions = list(dist)
        probs = np.array([float(dist[b]) for b in actions])
        return actions[rng.choice(len(actions), p=probs / probs.sum())]

    def __eq__(self, other):
        return isinstance(other, MixedStrategy) and self.table == other.table

    def __hash__(self):
        return hash(frozenset((t, frozenset(d.items())) for t, d in self.table.items()))

    def __repr__(self):
        return f"MixedStrategy({self.table!r})"


def pure_strategies(game: BayesianGame, player: int) -> list[MixedStrategy]:
    """Every type-to-action map for one player, in enumeration order."""
    types = game.type_spaces[player]
    actions = game.action_spaces[player]
    return [
        MixedStrategy({t: {b: 1} for t, b in zip(types, choice)})
        for choice in itertools.product(actions, repeat=len(types))
    ]


def _check_profile(game: BayesianGame, profile: Sequence) -> None:
    if len(profile) != game.num_players:
        raise DomainError(f"profile has {len(profile)} strategies for {game.num_players} players")


def expected_utility(game: BayesianGame, profile: Sequence[MixedStrategy]) -> list[Fraction]:
    """Exact expected utility of every player under ``profile``."""
    _check_profile(game, profile)
    if not game.explicit:
        raise UnsupportedModeError("exact expected utility needs an explicit type table; use estimate_utility")
    total = [Fraction(0)] * game.num_players
    for types, p in game.type_dist.items():
        if p == 0:
            continue
        dists = [s.dist(t) for s, t in zip(profile, types)]
        if game.action_spaces is not None:
            for i, d in enumerate(dists):
                if not set(d) <= set(game.action_spaces[i]):
                    raise DomainError(f"player {i} strategy plays outside its action space")
        for joint in itertools.product(*(d.items() for d in dists)):
            actions = tuple(b for b, _ in joint)
            weight = p * math.prod((q for _, q in joint), start=Fraction(1))
            for i, v in enumerate(game.payoffs(actions, types)):
                total[i] += weight * v
    return total


class Estimate(NamedTuple):
    value: float
    half_width: float


def hoeffding_half_width(samples: int, width: float, alpha: float = 0.01) -> float:
    """Two-sided Hoeffding bound for the mean of ``samples`` draws in a range of size ``width``."""
    return width * math.sqrt(math.log(2 / alpha) / (2 * samples))


def _payoff_widths(game: BayesianGame) -> list[float]:
    if game.utility_bounds is not None:
        lo, hi = game.utility_bounds
        return [float(hi - lo)] * game.num_players
    values = [game.payoffs(b, t) for b, t in _all_outcomes(game)]
    return [float(max(v[i] for v in values) - min(v[i] for v in values)) for i in range(game.num_players)]


def _all_outcomes(game: BayesianGame):
    if game.action_spaces is None or game.type_spaces is None:
        raise UnsupportedModeError("game spaces are not enumerable")
    for types in itertools.product(*game.type_spaces):
        for actions in itertools.product(*game.action_spaces):
            yield actions, types


def estimate_utility(game: BayesianGame, profile: Sequence, samples: int, seed: int) -> list[Estimate]:
    """Monte Carlo estimate of every player's expected utility.

    Profile entries need an ``act(own_type, rng)`` method. The half-width is
    the 99% Hoeffding bound scaled by the payoff range. Output depends only
    on ``(samples, seed)``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _check_profile(game, profile)
    rng = np.random.default_rng(seed)
    if game.explicit and game.action_spaces is not None and all(isinstance(s, MixedStrategy) for s in profile):
        means, widths = _estimate_tabular(game, profile, samples, rng)
    else:
        sums = [[] for _ in range(game.num_players)]
        for _ in range(samples):
            types = game.type_dist.sample(rng)
            actions = tuple(s.act(t, rng) for s, t in zip(profile, types))
            for i, v in enumerate(game.utility(actions, types)):
                sums[i].append(float(v))
        means = [math.fsum(xs) / samples for xs in sums]
        widths = _payoff_widths(game)
    return [Estimate(m, hoeffding_half_width(samples, w)) for m, w in zip(means, widths)]


def _estimate_tabular(game, profile, samples, rng):
    joint_types = [t for t, p in game.type_dist.items() if p > 0]
    probs = np.array([float(game.type_dist.probs[t]) for t in joint_types])
    k = game.num_players
    actions = [list(a) for a in game.action_spaces]
    shape = (len(joint_types),) + tuple(len(a) for a in actions)
    table = np.zeros((k,) + shape)
    for ti, types in enumerate(joint_types):
        for idx in itertools.product(*(range(len(a)) for a in actions)):
            vals = game.payoffs(tuple(actions[i][j] for i, j in enumerate(idx)), types)
            for i in range(k):
                table[(i, ti) + idx] = float(vals[i])

    tidx = rng.choice(len(joint_types), size=samples, p=probs / probs.sum())
    chosen = []
    for i, s in enumerate(profile):
        own = [types[i] for types in joint_types]
        pos = {b: j for j, b in enumerate(actions[i])}
        cum = np.zeros((len(own), len(actions[i])))
        for r, t in enumerate(own):
            row = np.zeros(len(actions[i]))
            for b, q in s.dist(t).items():
                if b not in pos:
                    raise DomainError(f"player {i} strategy plays outside its action space")
                row[pos[b]] = float(q)
            cum[r] = np.cumsum(row)
        u = rng.random(samples)
        a = (u[:, None] >= cum[tidx]).sum(axis=1)
        chosen.append(np.minimum(a, len(actions[i]) - 1))
    means = []
    for i in range(k):
        vals = table[i][(tidx,) + tuple(chosen)]
        means.append(math.fsum(vals.tolist()) / samples)
    widths = [float(table[i].max() - table[i].min()) for i in range(k)]
    if game.utility_bounds is not None:
        widths = _payoff_widths(game)
    return means, widths


@dataclass(frozen=True)
class Witness:
    player: int
    deviation: Any
    gain: Fraction


def is_epsilon_ne(game: BayesianGame, profile: Sequence[MixedStrategy], epsilon, deviations: Sequence[Sequence[MixedStrategy]]):
    """Check the profile against finite per-player deviation lists.

    Returns ``(verdict, witness)``; the witness is a maximal-gain deviation,
    ties going to the lower player index and then to list order.
    """
    epsilon = Fraction(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    base = expected_utility(game, profile)
    best = None
    for i, devs in enumerate(deviations):
        for dev in devs:
            trial = list(profile)
            trial[i] = dev
            gain = expected_utility(game, trial)[i] - base[i]
            if best is None or gain > best.gain:
                best = Witness(i, dev, gain)
    if best is not None and best.gain > epsilon:
        return False, best
    return True, None


def check_bounded(game: BayesianGame, c, C) -> bool:
    """True iff every nonzero payoff has absolute value in ``[c, C]``."""
    c, C = Fraction(c), Fraction(C)
    if c <= 0 or c > C:
        raise ValueError("need 0 < c <= C")
    for actions, types in _all_outcomes(game):
        for v in game.payoffs(actions, types):
            if v != 0 and not c <= abs(v) <= C:
                return False
    return True


def eval_poly(coeffs: Sequence[int], n: int) -> int:
    return sum(a * n**d for d, a in enumerate(coeffs))


@dataclass(frozen=True)
class GameSequenceMeta:
    """Polynomial descriptors for a game sequence indexed by ``n``.

    Coefficient lists are lowest degree first.
    """

    action_len_poly: tuple
    type_len_poly: tuple
    utility_time_poly: tuple
    bounded_range: tuple | None = None

    def __post_init__(self):
        for poly in (self.action_len_poly, self.type_len_poly, self.utility_time_poly):
            if any(not isinstance(a, int) or a < 0 for a in poly):
                raise ValueError("polynomial coefficients must be nonnegative integers")
        if self.bounded_range is not None:
            c, C = self.bounded_range
            if not 0 < c <= C:
                raise ValueError("bounded_range needs 0 < c <= C")

    def action_bound(self, n: int) -> int:
        return eval_poly(self.action_len_poly, n)

    def type_bound(self, n: int) -> int:
        return eval_poly(self.type_len_poly, n)

    def utility_time_bound(self, n: int) -> int:
        return eval_poly(self.utility_time_poly, n)


def matrix_game(payoffs: Mapping[tuple, Sequence], name: str = "") -> BayesianGame:
    """Normal-form game (singleton types) from ``{(b_1, ..., b_k): (v_1, ..., v_k)}``."""
    table = {tuple(b): tuple(Fraction(v) for v in vs) for b, vs in payoffs.items()}
    k = len(next(iter(table)))
    spaces = tuple(tuple(dict.fromkeys(b[i] for b in table)) for i in range(k))
    empty = BitString("")
    return BayesianGame(
        num_players=k,
        action_spaces=spaces,
        type_spaces=tuple((empty,) for _ in range(k)),
        type_dist=TypeTable({(empty,) * k: 1}),
        utility=TableUtility({(b, (empty,) * k): v for b, v in table.items()}),
        name=name,
    )


class TableUtility:
    """Utility backed by an explicit ``{(actions, types): payoffs}`` table."""

    def __init__(self, table: Mapping[tuple, Sequence]):
        self.table = {k: tuple(Fraction(v) for v in vs) for k, vs in table.items()}

    def __call__(self, actions, types):
        try:
            return self.table[(tuple(actions), tuple(types))]
        except KeyError:
            raise DomainError(f"no payoff entry for actions={actions} types={types}") from None


def matching_pennies() -> BayesianGame:
    """Row player wins on a match, column player on a mismatch."""
    zero, one = bs("0"), bs("1")
    return matrix_game(
        {
            (zero, zero): (1, -1),
            (zero, one): (-1, 1),
            (one, zero): (-1, 1),
            (one, one): (1, -1),
        },
        name="matching_pennies",
    )


def random_bayesian_game(rng: np.random.Generator, max_actions: int = 4, max_types: int = 4, max_den: int = 6) -> BayesianGame:
    """Random 2-player game with rational payoffs and a rational type table."""

    def labels(count, width):
        return tuple(BitString.from_int(j, width) for j in range(count))

    acts = [labels(int(rng.integers(1, max_actions + 1)), 2) for _ in range(2)]
    typs = [labels(int(rng.integers(1, max_types + 1)), 2) for _ in range(2)]
    joint = list(itertools.product(*typs))
    weights = [int(w) for w in rng.integers(0, 5, size=len(joint))]
    if sum(weights) == 0:
        weights[0] = 1
    dist = TypeTable({t: Fraction(w, sum(weights)) for t, w in zip(joint, weights)})
    table = {}
    for t in joint:
        for b in itertools.product(*acts):
            table[(b, t)] = tuple(
                Fraction(int(rng.integers(-max_den, max_den + 1)), int(rng.integers(1, max_den + 1)))
                for _ in range(2)
            )
    return BayesianGame(2, tuple(acts), tuple(typs), dist, TableUtility(table), name="random")


def random_mixed_strategy(rng: np.random.Generator, types: Sequence, actions: Sequence, max_weight: int = 4) -> MixedStrategy:
    table = {}
    for t in types:
        w = [int(x) for x in rng.integers(0, max_weight + 1, size=len(actions))]
        if sum(w) == 0:
            w[int(rng.integers(len(actions)))] = 1
        table[t] = {b: Fraction(x, sum(w)) for b, x in zip(actions, w) if x}
    return MixedStrategy(table)
