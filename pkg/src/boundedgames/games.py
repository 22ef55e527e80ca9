"""The concrete games: the one-way-function game, its single-puzzle variant,
and matching pennies with a printing contest (game F)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import BayesianGame, BitString, GameSequenceMeta, TypeSampler, TypeTable, matrix_game
from .machines import DEFAULT_COSTS, StepCostTable, StrategyMachine, enumerate_machines, machine_distribution
from .owf import OwfInstance, random_bits

DEFAULT_BIASES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return (n - 1).bit_length()


def key_lengths(n: int, max_key_len: int | None = None) -> tuple[int, ...]:
    """Key length of puzzle i is i * ceil(log2 n), for i = 1..ceil(log2 n)."""
    L = ceil_log2(n)
    lens = tuple(i * L for i in range(1, L + 1))
    if max_key_len is not None:
        lens = tuple(k for k in lens if k <= max_key_len)
    return lens


@dataclass(frozen=True)
class PuzzleTuple:
    n: int
    key_lens: tuple
    images: tuple

    def __post_init__(self):
        if len(self.images) != len(self.key_lens):
            raise ValueError("one image per key length")


@dataclass(frozen=True)
class OwfGameAction:
    candidates: tuple

    def framed_for(self, key_lens: Sequence[int]) -> bool:
        return len(self.candidates) == len(key_lens) and all(
            len(y) == k for y, k in zip(self.candidates, key_lens)
        )

    def to_bitstring(self) -> BitString:
        return BitString("".join(y.bits for y in self.candidates))

    @classmethod
    def from_bitstring(cls, s: BitString, key_lens: Sequence[int]) -> OwfGameAction:
        if len(s) != sum(key_lens):
            raise ValueError("action length does not match the framing")
        out, pos = [], 0
        for k in key_lens:
            out.append(BitString(s.bits[pos : pos + k]))
            pos += k
        return cls(tuple(out))

    @classmethod
    def zeros(cls, key_lens: Sequence[int]) -> OwfGameAction:
        return cls(tuple(BitString.zeros(k) for k in key_lens))


def count_hits(puzzle: PuzzleTuple, action: OwfGameAction, inst: OwfInstance) -> int:
    """Number of entries where the candidate maps to the puzzle image."""
    if not action.framed_for(puzzle.key_lens):
        raise ValueError("action framing does not match the puzzle tuple")
    return sum(
        inst.eval_int(k, y.to_int()) == img.to_int()
        for k, y, img in zip(puzzle.key_lens, action.candidates, puzzle.images)
    )


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def owf_payoff(a1: int, a2: int) -> tuple[Fraction, Fraction]:
    """Winner of the hit count gets 1 and the loser -1; a tie pays 0 each."""
    if a1 < 0 or a2 < 0:
        raise ValueError("hit counts are nonnegative")
    return Fraction(_sign(a1 - a2)), Fraction(_sign(a2 - a1))


def sample_puzzle_tuple(n: int, key_lens: Sequence[int], inst: OwfInstance, rng: np.random.Generator):
    """Draw independent uniform secrets per entry; returns ``(PuzzleTuple, secrets)``."""
    secrets, images = [], []
    for k in key_lens:
        x = random_bits(rng, k)
        secrets.append(BitString.from_int(x, k))
        images.append(BitString.from_int(inst.eval_int(k, x), inst.output_len(k)))
    return PuzzleTuple(n, tuple(key_lens), tuple(images)), tuple(secrets)


def _owf_utility(inst: OwfInstance):
    def utility(actions, types):
        return owf_payoff(count_hits(types[0], actions[0], inst), count_hits(types[1], actions[1], inst))

    return utility


def _explicit_spaces(n, key_lens, inst, limit=16):
    if sum(key_lens) > limit:
        raise ValueError(f"explicit OWF game needs total key length <= {limit}")
    probs: dict[PuzzleTuple, Fraction] = {}
    weight = Fraction(1, 2 ** sum(key_lens))
    for xs in itertools.product(*(range(1 << k) for k in key_lens)):
        images = tuple(BitString.from_int(inst.eval_int(k, x), inst.output_len(k)) for k, x in zip(key_lens, xs))
        t = PuzzleTuple(n, tuple(key_lens), images)
        probs[t] = probs.get(t, Fraction(0)) + weight
    actions = tuple(
        OwfGameAction(tuple(BitString.from_int(y, k) for k, y in zip(key_lens, ys)))
        for ys in itertools.product(*(range(1 << k) for k in key_lens))
    )
    types = tuple(probs)
    return actions, types, TypeTable({(t, t): p for t, p in probs.items()})


def _puzzle_game(n, key_lens, inst, explicit, name):
    for k in key_lens:
        inst.check_k(k)
    if explicit:
        actions, types, dist = _explicit_spaces(n, key_lens, inst)
        spaces = ((actions, actions), (types, types))
    else:

        def draw(rng):
            t, _ = sample_puzzle_tuple(n, key_lens, inst, rng)
            return (t, t)

        dist = TypeSampler(draw)
        spaces = (None, None)
    return BayesianGame(
        num_players=2,
        action_spaces=spaces[0],
        type_spaces=spaces[1],
        type_dist=dist,
        utility=_owf_utility(inst),
        utility_bounds=(-1, 1),
        name=name,
        info={"n": n, "key_lens": tuple(key_lens), "inst": inst},
    )


def build_owf_game(n: int, inst: OwfInstance, max_key_len: int | None = None, explicit: bool = False) -> BayesianGame:
    """Both players see the same puzzle tuple; payoff is the sign of the hit difference.

    ``max_key_len`` drops entries with longer keys. ``explicit=True``
    tabulates the type distribution (tiny instances only).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    return _puzzle_game(n, key_lengths(n, max_key_len), inst, explicit, "owf")


def build_single_puzzle_game(n: int, inst: OwfInstance, explicit: bool = False) -> BayesianGame:
    """One shared image of an n-bit secret; whoever alone inverts it wins."""
    return _puzzle_game(n, (n,), inst, explicit, "single_puzzle")


def owf_game_meta(inst: OwfInstance) -> GameSequenceMeta:
    """Polynomial length/time bounds for ``build_owf_game`` over n >= 2.

    Key lengths are at most ceil(log2 n)**2 <= n**2, so both the action and
    the type length are bounded by n**(2d+1) + n with d = max(1, ceil(b)).
    """
    b = inst.output_len_exponent
    d = max(1, -(-b.numerator // b.denominator))
    poly = (0, 1) + (0,) * (2 * d - 1) + (1,)
    return GameSequenceMeta(
        action_len_poly=(0, 1, 0, 1),
        type_len_poly=poly,
        utility_time_poly=(0, 2),
        bounded_range=(1, 1),
    )


def owf_action_len(n: int) -> int:
    """Closed form sum_i i*L = L * l(l+1)/2 with l = L = ceil(log2 n)."""
    L = ceil_log2(n)
    return L * L * (L + 1) // 2


# Matching pennies with printing


@dataclass(frozen=True)
class PenniesOutcome:
    a1: int
    b1: int
    chars_A: int
    chars_B: int


def pennies_payoff(outcome: PenniesOutcome) -> tuple[Fraction, Fraction]:
    """Phase 1: A wins 1 on a match, B on a mismatch. Phase 2: more characters wins 1."""
    phase1 = 1 if outcome.a1 == outcome.b1 else -1
    phase2 = _sign(outcome.chars_A - outcome.chars_B)
    return Fraction(phase1 + phase2), Fraction(-phase1 - phase2)


def split_output(out: BitString) -> tuple[int, int]:
    """Machine output -> (phase-1 bit, number of printed characters)."""
    if len(out) < 1:
        raise ValueError("machine produced no phase-1 bit")
    return int(out.bits[0]), len(out) - 1


@dataclass
class PenniesGame:
    T: int
    costs: StepCostTable
    biases: tuple
    family: tuple
    _dists: dict = field(default_factory=dict, repr=False)

    def distribution(self, m: StrategyMachine):
        if m not in self._dists:
            self._dists[m] = {
                split_output(out): p for out, p in machine_distribution(m, self.costs).items()
            }
        return self._dists[m]

    def payoff(self, mA: StrategyMachine, mB: StrategyMachine) -> tuple[Fraction, Fraction]:
        """Exact expected payoff of a machine profile."""
        va = Fraction(0)
        for (a1, ca), pa in self.distribution(mA).items():
            for (b1, cb), pb in self.distribution(mB).items():
                va += pa * pb * pennies_payoff(PenniesOutcome(a1, b1, ca, cb))[0]
        return va, -va

    def payoff_matrix(self) -> list[list[tuple[Fraction, Fraction]]]:
        return [[self.payoff(a, b) for b in self.family] for a in self.family]

    def max_chars(self) -> int:
        return (self.T - self.costs.emit_hardwired_bit - self.costs.halt) // self.costs.print_char

    def outcome_game(self) -> BayesianGame:
        """F in normal form over raw outputs (phase-1 bit plus printed characters)."""
        outs = [BitString(str(bit) + "1" * c) for bit in (0, 1) for c in range(self.max_chars() + 1)]
        table = {}
        for oa, ob in itertools.product(outs, outs):
            a1, ca = split_output(oa)
            b1, cb = split_output(ob)
            table[(oa, ob)] = pennies_payoff(PenniesOutcome(a1, b1, ca, cb))
        return matrix_game(table, name="pennies_outcomes")


def build_pennies_game(T: int, costs: StepCostTable = DEFAULT_COSTS, biases=DEFAULT_BIASES) -> PenniesGame:
    if T <= 2:
        raise ValueError("the pennies game needs T > 2")
    biases = tuple(sorted({Fraction(p) for p in biases}))
    return PenniesGame(T, costs, biases, tuple(enumerate_machines(T, biases, costs=costs)))
