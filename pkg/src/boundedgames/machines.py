"""Step-counted strategy machines over a four-instruction set.

A program is a straight-line list of ``Emit``, ``SampleBit``, ``Print`` and
``Halt`` instructions. ``SampleBit`` draws a biased bit and writes it to the
output, so under the default costs it takes two steps where ``Emit`` takes
one. ``Print`` appends a ``1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .core import BitString, GameError, UnsupportedModeError


class BudgetExhausted(GameError):
    def __init__(self, index: int, steps: int, budget: int):
        super().__init__(f"instruction {index} would use step {steps} of budget {budget}")
        self.index = index
        self.steps = steps
        self.budget = budget


@dataclass(frozen=True)
class Emit:
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError("Emit takes a single bit")

    def __str__(self):
        return f"EMIT({self.bit})"


@dataclass(frozen=True)
class SampleBit:
    """Emit 1 with probability ``bias``."""

    bias: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bias", Fraction(self.bias))
        if not 0 <= self.bias <= 1:
            raise ValueError("bias must lie in [0, 1]")

    def __str__(self):
        return f"SAMPLE({self.bias})"


@dataclass(frozen=True)
class Print:
    def __str__(self):
        return "PRINT"


@dataclass(frozen=True)
class Halt:
    def __str__(self):
        return "HALT"


Instruction = Emit | SampleBit | Print | Halt


@dataclass(frozen=True)
class StepCostTable:
    emit_hardwired_bit: int = 1
    sample_random_bit: int = 1
    print_char: int = 1
    halt: int = 0

    def __post_init__(self):
        if min(self.emit_hardwired_bit, self.sample_random_bit, self.print_char, self.halt) < 0:
            raise ValueError("step costs must be nonnegative")

    def cost(self, ins: Instruction) -> int:
        if isinstance(ins, Emit):
            return self.emit_hardwired_bit
        if isinstance(ins, SampleBit):
            return self.sample_random_bit + self.emit_hardwired_bit
        if isinstance(ins, Print):
            return self.print_char
        return self.halt


DEFAULT_COSTS = StepCostTable()


@dataclass(frozen=True)
class StrategyMachine:
    program: tuple
    budget: int
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "program", tuple(self.program))
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")

    def steps(self, costs: StepCostTable = DEFAULT_COSTS) -> int:
        """Steps used on every tape (programs have no branches)."""
        total = 0
        for ins in self.program:
            total += costs.cost(ins)
            if isinstance(ins, Halt):
                return total
        return total + costs.halt

    def sample_count(self) -> int:
        n = 0
        for ins in self.program:
            if isinstance(ins, Halt):
                break
            n += isinstance(ins, SampleBit)
        return n

    def act(self, own_type, rng: np.random.Generator, costs: StepCostTable = DEFAULT_COSTS) -> BitString:
        """Run on a fresh random tape; lets a machine act as a strategy in a Bayesian game."""

        def coin(p):
            return int(rng.random() < p)

        return _execute(self, costs, coin).output

    def __str__(self):
        return self.label or " ".join(map(str, self.program))


class RunResult(NamedTuple):
    output: BitString
    steps_used: int


def _execute(m: StrategyMachine, costs: StepCostTable, coin) -> RunResult:
    out = []
    steps = 0

    def charge(index, amount):
        nonlocal steps
        if steps + amount > m.budget:
            raise BudgetExhausted(index, steps + amount, m.budget)
        steps += amount

    for index, ins in enumerate(m.program):
        charge(index, costs.cost(ins))
        if isinstance(ins, Halt):
            return RunResult(BitString("".join(out)), steps)
        if isinstance(ins, Emit):
            out.append(str(ins.bit))
        elif isinstance(ins, SampleBit):
            out.append(str(coin(ins.bias)))
        else:
            out.append("1")
    charge(len(m.program), costs.halt)
    return RunResult(BitString("".join(out)), steps)


def _tape_coin(tape: Sequence[int]):
    """Turn uniform tape bits into biased bits: 1 iff U >= 1 - p, reading U lazily."""
    bits = iter(tape)

    def coin(p: Fraction) -> int:
        q = 1 - p
        lo, width = Fraction(0), Fraction(1)
        while True:
            if lo >= q:
                return 1
            if lo + width <= q:
                return 0
            try:
                b = next(bits)
            except StopIteration:
                raise ValueError("random tape underrun") from None
            width /= 2
            if int(b):
                lo += width

    return coin


def tape_bits_needed(bias: Fraction) -> int | None:
    """Worst-case tape bits consumed by one ``SampleBit(bias)``; None if not dyadic."""
    den = Fraction(bias).denominator
    if den & (den - 1):
        return None
    return den.bit_length() - 1


def run_machine(m: StrategyMachine, costs: StepCostTable, random_tape: Sequence[int] | str) -> RunResult:
    """Replay ``m`` deterministically against ``random_tape``.

    Raises ``BudgetExhausted`` if an instruction would exceed the budget and
    ``ValueError`` if the tape runs out.
    """
    return _execute(m, costs, _tape_coin([int(b) for b in random_tape]))


class OutputDistribution(Mapping):
    """Exact output law of a machine: BitString -> Fraction."""

    def __init__(self, probs: Mapping[BitString, Fraction]):
        self.probs = {b: Fraction(p) for b, p in probs.items() if p != 0}
        if sum(self.probs.values(), Fraction(0)) != 1:
            raise ValueError("output distribution must sum to exactly 1")

    def __getitem__(self, key):
        return self.probs[key]

    def __iter__(self):
        return iter(self.probs)

    def __len__(self):
        return len(self.probs)

    def __repr__(self):
        return "OutputDistribution({" + ", ".join(f"{b}: {p}" for b, p in self.probs.items()) + "})"


def machine_distribution(m: StrategyMachine, costs: StepCostTable = DEFAULT_COSTS, max_samples: int = 20) -> OutputDistribution:
    """Enumerate every sampled-bit branch and aggregate identical outputs."""
    n = m.sample_count()
    if n > max_samples:
        raise UnsupportedModeError(f"{n} random bits exceeds the cap of {max_samples}")
    biases = [ins.bias for ins in m.program if isinstance(ins, SampleBit)][:n]
    probs: dict[BitString, Fraction] = {}
    for outcome in itertools.product((0, 1), repeat=n):
        weight = Fraction(1)
        for p, bit in zip(biases, outcome):
            weight *= p if bit else 1 - p
        if weight == 0:
            continue
        draws = iter(outcome)
        out = _execute(m, costs, lambda _p: next(draws)).output
        probs[out] = probs.get(out, Fraction(0)) + weight
    return OutputDistribution(probs)


def canonical_machine(first: Emit | SampleBit, prints: int, budget: int) -> StrategyMachine:
    return StrategyMachine((first,) + (Print(),) * prints, budget, f"{first}+{prints}")


def enumerate_machines(budget: int, biases, phase_structure: str = "pennies", costs: StepCostTable = DEFAULT_COSTS) -> list[StrategyMachine]:
    """All canonical machines: one phase-1 move followed by as many prints as fit."""
    if phase_structure != "pennies":
        raise ValueError(f"unknown phase structure {phase_structure!r}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if costs.print_char < 1:
        raise ValueError("print cost must be positive to bound the family")
    biases = sorted({Fraction(p) for p in biases})
    if any(not 0 <= p <= 1 for p in biases):
        raise ValueError("biases must lie in [0, 1]")
    firsts = [Emit(0), Emit(1)] + [SampleBit(p) for p in biases]
    family = []
    for first in firsts:
        spare = budget - costs.cost(first) - costs.halt
        for c in range(spare // costs.print_char + 1) if spare >= 0 else ():
            family.append(canonical_machine(first, c, budget))
    return family


def instruction_to_json(ins: Instruction) -> dict:
    if isinstance(ins, Emit):
        return {"op": "EMIT", "bit": ins.bit}
    if isinstance(ins, SampleBit):
        return {"op": "SAMPLE_BIT", "bias": str(ins.bias)}
    return {"op": "PRINT" if isinstance(ins, Print) else "HALT"}


def instruction_from_json(obj: Mapping) -> Instruction:
    op = obj["op"]
    if op == "EMIT":
        return Emit(int(obj["bit"]))
    if op == "SAMPLE_BIT":
        return SampleBit(Fraction(obj["bias"]))
    if op == "PRINT":
        return Print()
    if op == "HALT":
        return Halt()
    raise ValueError(f"unknown instruction {op!r}")


def machine_to_json(m: StrategyMachine) -> dict:
    return {"program": [instruction_to_json(i) for i in m.program], "budget": m.budget, "label": m.label}


def machine_from_json(obj: Mapping) -> StrategyMachine:
    return StrategyMachine(tuple(instruction_from_json(i) for i in obj["program"]), int(obj["budget"]), obj.get("label", ""))


def uniform_tapes(length: int) -> Iterator[tuple]:
    return itertools.product((0, 1), repeat=length)
