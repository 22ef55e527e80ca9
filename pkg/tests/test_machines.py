import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from boundedgames.core import BitString, UnsupportedModeError
from boundedgames.machines import (
    DEFAULT_COSTS,
    BudgetExhausted,
    Emit,
    Halt,
    Print,
    SampleBit,
    StepCostTable,
    StrategyMachine,
    enumerate_machines,
    machine_distribution,
    machine_from_json,
    machine_to_json,
    run_machine,
    tape_bits_needed,
)

FREE = StepCostTable(sample_random_bit=0)
GRID = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]


def count_canonical(T, biases, costs=DEFAULT_COSTS):
    """Cost arithmetic: one family member per affordable print count."""
    emit = costs.emit_hardwired_bit
    sample = costs.sample_random_bit + costs.emit_hardwired_bit
    per = lambda first: max(0, (T - first - costs.halt) // costs.print_char + 1) if T >= first + costs.halt else 0
    return 2 * per(emit) + len(set(biases)) * per(sample)


def replay_law(m, costs):
    """Aggregate run_machine over every uniform tape of the needed length."""
    length = sum(tape_bits_needed(i.bias) for i in m.program if isinstance(i, SampleBit))
    law = {}
    for tape in itertools.product((0, 1), repeat=length):
        out = run_machine(m, costs, tape).output
        law[out] = law.get(out, 0) + Fraction(1, 2**length)
    return law


class TestRunMachine:
    def test_emit_then_prints(self):
        m = StrategyMachine((Emit(0), Print(), Print()), 3)
        out, steps = run_machine(m, DEFAULT_COSTS, [])
        assert out == BitString("011") and steps == 3

    def test_sample_costs_two_steps(self):
        m = StrategyMachine((SampleBit(Fraction(1, 2)), Print()), 3)
        out, steps = run_machine(m, DEFAULT_COSTS, "1")
        assert out.bits[0] == "1" and steps == 3
        assert run_machine(m, DEFAULT_COSTS, "0").output.bits[0] == "0"

    def test_budget_zero(self):
        with pytest.raises(BudgetExhausted) as info:
            run_machine(StrategyMachine((Emit(0),), 0), DEFAULT_COSTS, [])
        assert info.value.index == 0

    def test_budget_exhausted_mid_program(self):
        m = StrategyMachine((SampleBit(Fraction(1, 2)), Print(), Print()), 3)
        with pytest.raises(BudgetExhausted) as info:
            run_machine(m, DEFAULT_COSTS, "0")
        assert info.value.index == 2

    def test_tape_underrun(self):
        m = StrategyMachine((SampleBit(Fraction(1, 4)),), 2)
        with pytest.raises(ValueError):
            run_machine(m, DEFAULT_COSTS, "1")

    def test_halt_stops_execution(self):
        m = StrategyMachine((Emit(1), Halt(), Print(), Print()), 1)
        assert run_machine(m, DEFAULT_COSTS, []) == (BitString("1"), 1)

    def test_halt_cost_charged_at_end(self):
        costs = StepCostTable(halt=1)
        assert run_machine(StrategyMachine((Emit(1),), 2), costs, []).steps_used == 2
        with pytest.raises(BudgetExhausted):
            run_machine(StrategyMachine((Emit(1),), 1), costs, [])


class TestDistribution:
    def test_deterministic_point_mass(self):
        m = StrategyMachine((Emit(1), Print()), 2)
        assert dict(machine_distribution(m)) == {BitString("11"): 1}

    def test_fair_coin(self):
        m = StrategyMachine((SampleBit(Fraction(1, 2)),), 2)
        assert dict(machine_distribution(m)) == {BitString("0"): Fraction(1, 2), BitString("1"): Fraction(1, 2)}

    def test_biased_coin_against_monte_carlo(self):
        m = StrategyMachine((SampleBit(Fraction(1, 4)), Print()), 3)
        law = machine_distribution(m)
        assert dict(law) == {BitString("11"): Fraction(1, 4), BitString("01"): Fraction(3, 4)}
        rng = np.random.default_rng(0)
        counts = {}
        for _ in range(10_000):
            out = run_machine(m, DEFAULT_COSTS, rng.integers(0, 2, size=4)).output
            counts[out] = counts.get(out, 0) + 1
        for out, p in law.items():
            assert abs(counts[out] / 10_000 - float(p)) <= 0.02

    def test_cap(self):
        m = StrategyMachine((SampleBit(Fraction(1, 2)),) * 3, 10)
        with pytest.raises(UnsupportedModeError):
            machine_distribution(m, max_samples=2)

    @pytest.mark.parametrize("T", [3, 4, 5])
    @pytest.mark.parametrize("costs", [DEFAULT_COSTS, FREE])
    def test_distribution_matches_tape_replay(self, T, costs):
        for m in enumerate_machines(T, GRID, costs=costs):
            assert dict(machine_distribution(m, costs)) == {k: v for k, v in replay_law(m, costs).items() if v}

    def test_multi_sample_program(self):
        m = StrategyMachine((SampleBit(Fraction(1, 2)), SampleBit(Fraction(3, 4)), Print()), 5)
        assert dict(machine_distribution(m)) == replay_law(m, DEFAULT_COSTS)

    def test_degenerate_bias(self):
        for bit in (0, 1):
            sampled = StrategyMachine((SampleBit(Fraction(bit)), Print()), 5)
            emitted = StrategyMachine((Emit(bit), Print()), 5)
            assert dict(machine_distribution(sampled)) == dict(machine_distribution(emitted))
            assert sampled.steps() > emitted.steps()


class TestEnumerate:
    def test_count_fair_only(self):
        family = enumerate_machines(3, [Fraction(1, 2)])
        assert len(family) == count_canonical(3, [Fraction(1, 2)]) == 8

    def test_t1(self):
        family = enumerate_machines(1, [])
        assert [m.program for m in family] == [(Emit(0),), (Emit(1),)]

    def test_count_three_biases(self):
        biases = [Fraction(0), Fraction(1, 2), Fraction(1)]
        assert len(enumerate_machines(3, biases)) == count_canonical(3, biases) == 12

    @given(st.integers(1, 12), st.sets(st.sampled_from(GRID)), st.integers(0, 2))
    def test_count_matches_arithmetic(self, T, biases, sample_cost):
        costs = StepCostTable(sample_random_bit=sample_cost)
        family = enumerate_machines(T, biases, costs=costs)
        assert len(family) == count_canonical(T, biases, costs)
        assert len(set(family)) == len(family)
        assert family == enumerate_machines(T, biases, costs=costs)

    def test_free_randomness_allows_max_prints(self):
        family = enumerate_machines(3, [Fraction(1, 2)], costs=FREE)
        assert max(m.program.count(Print()) for m in family if isinstance(m.program[0], SampleBit)) == 2

    def test_bad_structure(self):
        with pytest.raises(ValueError):
            enumerate_machines(3, [], phase_structure="chess")


@pytest.mark.parametrize("T", [3, 4, 5, 6])
@pytest.mark.parametrize("costs", [DEFAULT_COSTS, FREE])
def test_budget_soundness_over_all_tapes(T, costs):
    for m in enumerate_machines(T, GRID, costs=costs):
        length = sum(tape_bits_needed(i.bias) for i in m.program if isinstance(i, SampleBit))
        for tape in itertools.product((0, 1), repeat=length):
            out, steps = run_machine(m, costs, tape)
            assert len(out) <= steps <= m.budget


def test_tape_bits_needed():
    assert tape_bits_needed(Fraction(1, 2)) == 1
    assert tape_bits_needed(Fraction(3, 4)) == 2
    assert tape_bits_needed(Fraction(0)) == 0
    assert tape_bits_needed(Fraction(1, 3)) is None


def test_json_round_trip():
    for m in enumerate_machines(4, GRID):
        again = machine_from_json(machine_to_json(m))
        assert again == m and again.label == m.label
    m = StrategyMachine((Emit(1), Halt()), 2, "x")
    assert machine_from_json(machine_to_json(m)) == m
