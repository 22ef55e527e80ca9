"""Exhaustive epsilon-NE verification over finite machine families.

The negligible slack term is fixed to zero: a single finite game has no
asymptotics to absorb, and every deviation checked here is an exact rational.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import BayesianGame, BitString, MixedStrategy, TableUtility, TypeTable
from .games import PenniesGame, PenniesOutcome, pennies_payoff, split_output
from .machines import StrategyMachine, machine_from_json, machine_to_json, run_machine, tape_bits_needed, uniform_tapes


@dataclass(frozen=True)
class ProfileWitness:
    player: int
    machine: int
    gain: Fraction


@dataclass
class NeVerificationReport:
    family: list
    epsilon: Fraction
    equilibria: list = field(default_factory=list)
    deviations: dict = field(default_factory=dict)
    T: int | None = None

    @property
    def family_size(self) -> int:
        return len(self.family)

    @property
    def profiles_checked(self) -> int:
        return len(self.equilibria) + len(self.deviations)

    def min_gain(self) -> Fraction | None:
        gains = [w.gain for w in self.deviations.values()]
        return min(gains) if gains else None

    def to_json(self) -> dict:
        return {
            "schema": "boundedgames.ne_report/1",
            "T": self.T,
            "epsilon": str(self.epsilon),
            "family_size": self.family_size,
            "profiles_checked": self.profiles_checked,
            "family": [machine_to_json(m) for m in self.family],
            "equilibria": [list(p) for p in self.equilibria],
            "deviations": [
                {"profile": list(p), "player": w.player, "machine": w.machine, "gain": str(w.gain)}
                for p, w in sorted(self.deviations.items())
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> NeVerificationReport:
        if obj.get("schema") != "boundedgames.ne_report/1":
            raise ValueError(f"unsupported report schema {obj.get('schema')!r}")
        return cls(
            family=[machine_from_json(m) for m in obj["family"]],
            epsilon=Fraction(obj["epsilon"]),
            equilibria=[tuple(p) for p in obj["equilibria"]],
            deviations={
                tuple(d["profile"]): ProfileWitness(d["player"], d["machine"], Fraction(d["gain"]))
                for d in obj["deviations"]
            },
            T=obj.get("T"),
        )

    def table(self) -> str:
        """Human-readable summary, one line per profile."""
        names = [str(m) for m in self.family]
        width = max((len(s) for s in names), default=4)
        lines = [f"family={self.family_size} profiles={self.profiles_checked} epsilon={self.epsilon} equilibria={len(self.equilibria)}"]
        for a, b in itertools.product(range(self.family_size), repeat=2):
            w = self.deviations.get((a, b))
            verdict = "NE" if w is None else f"{'AB'[w.player]} -> {names[w.machine]} gains {w.gain}"
            lines.append(f"{names[a]:<{width}}  {names[b]:<{width}}  {verdict}")
        return "\n".join(lines)


def _best_deviation(payoffs, a: int, b: int) -> ProfileWitness | None:
    base_a, base_b = payoffs[a][b]
    best = None
    for player in (0, 1):
        for j in range(len(payoffs)):
            gain = payoffs[j][b][0] - base_a if player == 0 else payoffs[a][j][1] - base_b
            if best is None or gain > best.gain:
                best = ProfileWitness(player, j, gain)
    return best


def classify_profile(game: PenniesGame, profile: tuple[int, int], family: Sequence[StrategyMachine], epsilon, payoffs=None):
    """Is ``profile`` (indices into ``family``) an epsilon-equilibrium within the family?"""
    epsilon = Fraction(epsilon)
    if payoffs is None:
        payoffs = [[game.payoff(x, y) for y in family] for x in family]
    w = _best_deviation(payoffs, *profile)
    if w is not None and w.gain > epsilon:
        return False, w
    return True, None


def verify_ne_exhaustive(game: PenniesGame, family: Sequence[StrategyMachine] | None = None, epsilon=Fraction(9, 10)) -> NeVerificationReport:
    """Classify every pure machine profile of a 2-player machine game."""
    family = list(game.family if family is None else family)
    if not family:
        raise ValueError("family must be nonempty")
    epsilon = Fraction(epsilon)
    payoffs = [[game.payoff(x, y) for y in family] for x in family]
    report = NeVerificationReport(family, epsilon, T=game.T)
    for a, b in itertools.product(range(len(family)), repeat=2):
        ok, w = classify_profile(game, (a, b), family, epsilon, payoffs)
        if ok:
            report.equilibria.append((a, b))
        else:
            report.deviations[(a, b)] = w
    return report


def _replay_distribution(m: StrategyMachine, costs) -> dict:
    """Output law from replaying every uniform tape; needs dyadic biases."""
    needed = [tape_bits_needed(ins.bias) for ins in m.program if hasattr(ins, "bias")]
    if any(n is None for n in needed):
        raise ValueError("tape replay needs dyadic biases")
    length = sum(needed)
    weight = Fraction(1, 2**length)
    law: dict = {}
    for tape in uniform_tapes(length):
        out = run_machine(m, costs, tape).output
        law[out] = law.get(out, 0) + weight
    return law


def flatten_pennies_game(game: PenniesGame, family: Sequence[StrategyMachine] | None = None) -> BayesianGame:
    """Normal-form game whose actions are machine indices, built by tape replay."""
    family = list(game.family if family is None else family)
    labels = [BitString.from_int(i, max(1, (len(family) - 1).bit_length())) for i in range(len(family))]
    laws = [_replay_distribution(m, game.costs) for m in family]
    table = {}
    empty = BitString("")
    for (i, la), (j, lb) in itertools.product(enumerate(laws), repeat=2):
        va = Fraction(0)
        for oa, pa in la.items():
            for ob, pb in lb.items():
                a1, ca = split_output(oa)
                b1, cb = split_output(ob)
                va += pa * pb * pennies_payoff(PenniesOutcome(a1, b1, ca, cb))[0]
        table[((labels[i], labels[j]), (empty, empty))] = (va, -va)
    return BayesianGame(
        2,
        (tuple(labels), tuple(labels)),
        ((empty,), (empty,)),
        TypeTable({(empty, empty): 1}),
        TableUtility(table),
        name="pennies_flat",
        info={"labels": labels},
    )


def pure_profile(game: BayesianGame, a: int, b: int) -> list[MixedStrategy]:
    labels = game.info["labels"]
    empty = BitString("")
    return [MixedStrategy.pure([empty], labels[a]), MixedStrategy.pure([empty], labels[b])]
