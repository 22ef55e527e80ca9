"""Games played by resource-bounded strategy machines."""

from .core import (
    BayesianGame,
    BitString,
    DomainError,
    GameSequenceMeta,
    MixedStrategy,
    UnsupportedModeError,
    check_bounded,
    estimate_utility,
    expected_utility,
    is_epsilon_ne,
)
from .machines import StepCostTable, StrategyMachine, enumerate_machines, machine_distribution, run_machine
from .owf import OwfInstance, check_inverts, measure_security, owf_eval, sample_puzzle
from .games import build_owf_game, build_pennies_game, build_single_puzzle_game, count_hits, owf_payoff
from .dynamics import arms_race, best_response_in_family, exhaustive_inverter, random_guess_strategy
from .verifier import classify_profile, verify_ne_exhaustive

__version__ = "0.1.0"
