"""Strategy families for the puzzle games, restricted best response, and the
best-response escalation loop ("arms race")."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import BayesianGame, BitString, estimate_utility
from .games import OwfGameAction, PuzzleTuple, build_owf_game, build_single_puzzle_game, key_lengths
from .owf import OwfInstance, preimage_index, random_bits


@dataclass(frozen=True)
class BudgetedInverterStrategy:
    """Greedy exhaustive inverter with a total evaluation budget.

    Entries are processed in increasing index order. An entry whose whole
    domain fits in the remaining budget is scanned until its first preimage.
    Otherwise the remaining budget scans a lexicographic prefix of that entry
    and every later entry gets the all-zero candidate.
    """

    budget: int
    inst: OwfInstance

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")

    def invert(self, puzzle: PuzzleTuple) -> tuple[OwfGameAction, int]:
        """Return the action and the number of function evaluations a literal scan uses."""
        remaining, used_total, stopped = self.budget, 0, False
        cands = []
        for k, img in zip(puzzle.key_lens, puzzle.images):
            if stopped:
                cands.append(BitString.zeros(k))
                continue
            size = 1 << k
            limit = size if remaining >= size else remaining
            z = preimage_index(self.inst, k).first_preimage(img.to_int(), limit) if limit else None
            used = limit if z is None else z + 1
            remaining -= used
            used_total += used
            cands.append(BitString.from_int(z or 0, k))
            if limit < size:
                stopped = True
        return OwfGameAction(tuple(cands)), used_total

    def invert_literal(self, puzzle: PuzzleTuple, evaluator) -> OwfGameAction:
        """Same strategy as ``invert`` written as a plain scan over ``evaluator.eval_int``."""
        remaining, stopped = self.budget, False
        cands = []
        for k, img in zip(puzzle.key_lens, puzzle.images):
            target = img.to_int()
            found = 0
            if not stopped:
                size = 1 << k
                limit = min(size, remaining)
                for z in range(limit):
                    remaining -= 1
                    if evaluator.eval_int(k, z) == target:
                        found = z
                        break
                if limit < size:
                    stopped = True
            cands.append(BitString.from_int(found, k))
        return OwfGameAction(tuple(cands))

    def act(self, puzzle: PuzzleTuple, rng=None) -> OwfGameAction:
        return self.invert(puzzle)[0]

    def __str__(self):
        return f"inverter(budget={self.budget})"


def exhaustive_inverter(budget: int, inst: OwfInstance) -> BudgetedInverterStrategy:
    return BudgetedInverterStrategy(budget, inst)


@dataclass(frozen=True)
class RandomGuessStrategy:
    """Independent uniform candidates with the puzzle's framing."""

    seed: int = 0
    budget: int = 0

    def act(self, puzzle: PuzzleTuple, rng: np.random.Generator) -> OwfGameAction:
        return OwfGameAction(tuple(BitString.from_int(random_bits(rng, k), k) for k in puzzle.key_lens))

    def guess(self, puzzle: PuzzleTuple) -> OwfGameAction:
        return self.act(puzzle, np.random.default_rng(self.seed))

    def __str__(self):
        return f"random_guess(seed={self.seed})"


def random_guess_strategy(seed: int) -> RandomGuessStrategy:
    return RandomGuessStrategy(seed)


class BestResponse(NamedTuple):
    best: object
    value: float
    half_width: float
    index: int


def best_response_in_family(game: BayesianGame, opponent, family: Sequence, samples: int, seed: int, player: int = 0) -> BestResponse:
    """Estimated argmax over ``family`` against a fixed opponent.

    Every member is evaluated on the same seed. Ties go to the smaller
    budget, then to the earlier list position.
    """
    if not family:
        raise ValueError("family must be nonempty")
    best = None
    for idx, member in enumerate(family):
        profile = [member, opponent] if player == 0 else [opponent, member]
        est = estimate_utility(game, profile, samples, seed)[player]
        key = (est.value, -getattr(member, "budget", 0))
        if best is None or key > best[0]:
            best = (key, BestResponse(member, est.value, est.half_width, idx))
    return best[1]


@dataclass(frozen=True)
class ArmsRaceRound:
    round: int
    mover: int
    old_budget: int
    new_budget: int
    value: float
    gain: float
    half_width: float


@dataclass
class ArmsRaceTrace:
    rounds: list = field(default_factory=list)

    def escalations(self) -> list[ArmsRaceRound]:
        return [r for r in self.rounds if r.new_budget > r.old_budget]

    def to_rows(self) -> list[dict]:
        return [asdict(r) for r in self.rounds]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["round", "mover", "budget", "gain", "half_width"])
        for r in self.rounds:
            writer.writerow([r.round, r.mover, r.new_budget, repr(r.gain), repr(r.half_width)])
        return buf.getvalue()

    @classmethod
    def from_rows(cls, rows) -> ArmsRaceTrace:
        return cls([ArmsRaceRound(**row) for row in rows])


def full_search_ladder(n: int, top: int) -> list[int]:
    """Budgets that fully search the first m entries, for m = 0..top."""
    lens = key_lengths(n)
    if top > len(lens):
        raise ValueError(f"n={n} has only {len(lens)} entries")
    return [sum(1 << k for k in lens[:m]) for m in range(top + 1)]


def arms_race(
    n: int,
    inst: OwfInstance,
    family_ladder: Sequence[int],
    max_rounds: int,
    samples: int,
    seed: int,
    max_key_len: int | None = None,
) -> ArmsRaceTrace:
    """Alternating best responses over the budget ladder, starting from the bottom rung.

    Player 0 moves first. Stops after ``max_rounds`` or once both players sit
    on the top rung.
    """
    ladder = list(family_ladder)
    if not ladder or any(b >= c for b, c in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be nonempty and strictly increasing")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    game = build_owf_game(n, inst, max_key_len=max_key_len)
    family = [exhaustive_inverter(b, inst) for b in ladder]
    budgets = [ladder[0], ladder[0]]
    trace = ArmsRaceTrace()
    for r in range(max_rounds):
        mover = r % 2
        round_seed = seed + r
        opponent = exhaustive_inverter(budgets[1 - mover], inst)
        br = best_response_in_family(game, opponent, family, samples, round_seed, player=mover)
        current = exhaustive_inverter(budgets[mover], inst)
        profile = [current, opponent] if mover == 0 else [opponent, current]
        before = estimate_utility(game, profile, samples, round_seed)[mover].value
        trace.rounds.append(
            ArmsRaceRound(r, mover, budgets[mover], br.best.budget, br.value, br.value - before, br.half_width)
        )
        budgets[mover] = br.best.budget
        if budgets == [ladder[-1], ladder[-1]]:
            break
    return trace


@dataclass(frozen=True)
class DeviationGain:
    deviation: str
    budget: int
    value: float
    gain: float
    half_width: float


def single_puzzle_deviation_gains(
    n: int, inst: OwfInstance, budgets: Sequence[int], samples: int, seed: int
) -> tuple[float, list[DeviationGain]]:
    """Player 0's estimated gain from replacing a random guess by each inverter,
    against a random-guessing opponent. All estimates share one seed."""
    game = build_single_puzzle_game(n, inst)
    guess = random_guess_strategy(seed)
    base = estimate_utility(game, [guess, guess], samples, seed)[0].value
    out = []
    for b in budgets:
        inv = exhaustive_inverter(b, inst)
        est = estimate_utility(game, [inv, guess], samples, seed)[0]
        out.append(DeviationGain(str(inv), b, est.value, est.value - base, est.half_width))
    return base, out
