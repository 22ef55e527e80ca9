"""Best-response escalation in the one-way-function game; writes the trace as CSV."""

import argparse
import sys

from boundedgames.dynamics import arms_race, full_search_ladder
from boundedgames.owf import OwfInstance

parser = argparse.ArgumentParser()
parser.add_argument("--n", type=int, default=16)
parser.add_argument("--top", type=int, default=3)
parser.add_argument("--samples", type=int, default=1000)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--max-key-len", type=int, default=None)
args = parser.parse_args()

inst = OwfInstance("random_table", 1, 0)
ladder = full_search_ladder(args.n, args.top)
trace = arms_race(args.n, inst, ladder, 20, args.samples, args.seed, max_key_len=args.max_key_len)
sys.stdout.write(trace.to_csv())
