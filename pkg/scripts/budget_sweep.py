"""Exhaustive equilibrium check of the pennies game over a range of step budgets,
with and without a step cost for random bits. Prints one CSV row per run."""

import argparse
import time

from boundedgames.games import DEFAULT_BIASES, build_pennies_game
from boundedgames.machines import StepCostTable
from boundedgames.verifier import verify_ne_exhaustive

parser = argparse.ArgumentParser()
parser.add_argument("--max-T", type=int, default=8)
parser.add_argument("--epsilon", default="9/10")
args = parser.parse_args()

print("T,sample_cost,epsilon,family,equilibria,min_gain,seconds")
for sample_cost, eps in ((1, args.epsilon), (0, "0")):
    for T in range(3, args.max_T + 1):
        start = time.perf_counter()
        game = build_pennies_game(T, StepCostTable(sample_random_bit=sample_cost), DEFAULT_BIASES)
        report = verify_ne_exhaustive(game, epsilon=eps)
        elapsed = time.perf_counter() - start
        print(f"{T},{sample_cost},{eps},{report.family_size},{len(report.equilibria)},{report.min_gain()},{elapsed:.2f}")
