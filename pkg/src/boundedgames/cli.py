"""Experiment driver.

    boundedgames verify-pennies --T 3 --epsilon 9/10 --check
    boundedgames arms-race --n 16 --samples 1000 --format csv
    boundedgames owf-security --k 12 --budgets 64,1024,4096
    boundedgames single-puzzle-ne --n 40 --owf-kind hash_truncate
    boundedgames expected-utility --game game.json

Exit codes: 0 success, 1 invalid configuration, 2 failed ``--check``.
A ``--config`` JSON file overrides flags. ``BOUNDEDGAMES_OUT_DIR`` sets the
default output directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .core import MixedStrategy, estimate_utility, expected_utility
from .dynamics import arms_race, full_search_ladder, single_puzzle_deviation_gains
from .games import DEFAULT_BIASES, build_pennies_game, key_lengths
from .machines import StepCostTable
from .owf import OwfInstance, measure_security
from .serialize import game_from_json, profile_from_json
from .verifier import verify_ne_exhaustive

SCHEMA_VERSION = 1
OUT_DIR_ENV = "BOUNDEDGAMES_OUT_DIR"


class ConfigError(Exception):
    pass


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a rational: {text!r}") from None


def parse_int(text) -> int:
    if isinstance(text, bool):
        raise ConfigError(f"not an integer: {text!r}")
    if isinstance(text, int):
        return text
    try:
        return int(str(text), 0)
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    raise ConfigError(f"not a boolean: {text!r}")


def parse_rational_list(text) -> tuple:
    items = text if isinstance(text, list) else [s for s in str(text).split(",") if s.strip()]
    return tuple(parse_rational(s) for s in items)


def parse_int_list(text) -> tuple:
    items = text if isinstance(text, list) else [s for s in str(text).split(",") if s.strip()]
    return tuple(parse_int(s) for s in items)


def parse_kind(text) -> str:
    if text not in ("hash_truncate", "random_table"):
        raise ConfigError(f"unknown OWF kind {text!r}")
    return text


def _optional(conv):
    def parse(text):
        return None if text is None else conv(text)

    return parse


# subcommand -> {parameter: (parser, default)}
PARAMETERS = {
    "verify-pennies": {
        "T": (parse_int, 3),
        "epsilon": (parse_rational, Fraction(9, 10)),
        "sample_cost": (parse_int, 1),
        "biases": (parse_rational_list, DEFAULT_BIASES),
        "check": (parse_bool, False),
        "check_exists": (parse_bool, False),
    },
    "arms-race": {
        "n": (parse_int, 16),
        "owf_kind": (parse_kind, "random_table"),
        "owf_seed": (parse_int, 0),
        "ladder_top": (_optional(parse_int), None),
        "max_key_len": (_optional(parse_int), None),
        "max_rounds": (parse_int, 10),
        "samples": (parse_int, 1000),
        "seed": (parse_int, 0),
    },
    "owf-security": {
        "k": (parse_int, 12),
        "budgets": (parse_int_list, (64, 1024, 4096)),
        "trials": (parse_int, 2000),
        "owf_seed": (parse_int, 0),
        "seed": (parse_int, 0),
    },
    "single-puzzle-ne": {
        "n": (parse_int, 40),
        "owf_kind": (parse_kind, "hash_truncate"),
        "owf_seed": (parse_int, 0),
        "max_budget_log2": (parse_int, 20),
        "samples": (parse_int, 10_000),
        "epsilon": (parse_rational, Fraction(1, 20)),
        "seed": (parse_int, 0),
        "check": (parse_bool, False),
    },
    "expected-utility": {
        "game": (str, None),
        "profile": (_optional(str), None),
        "samples": (_optional(parse_int), None),
        "seed": (parse_int, 0),
    },
}


@dataclass
class ExperimentConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)
    output_format: str = "json"
    out: str | None = None

    def __post_init__(self):
        if self.subcommand not in PARAMETERS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        spec = PARAMETERS[self.subcommand]
        unknown = set(self.parameters) - set(spec)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.subcommand}: {sorted(unknown)}")
        parsed = {}
        for key, (conv, default) in spec.items():
            parsed[key] = conv(self.parameters[key]) if key in self.parameters else default
        if self.subcommand == "expected-utility" and parsed["game"] is None:
            raise ConfigError("expected-utility needs --game")
        self.parameters = parsed

    def output_path(self) -> Path:
        if self.out:
            return Path(self.out)
        base = Path(os.environ.get(OUT_DIR_ENV, "."))
        return base / f"{self.subcommand}.{self.output_format}"


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _run_verify(p):
    costs = StepCostTable(sample_random_bit=p["sample_cost"])
    game = build_pennies_game(p["T"], costs, p["biases"])
    report = verify_ne_exhaustive(game, epsilon=p["epsilon"])
    names = [str(m) for m in report.family]
    rows = []
    for a in range(report.family_size):
        for b in range(report.family_size):
            w = report.deviations.get((a, b))
            if w is None:
                rows.append([a, b, names[a], names[b], 1, "", "", ""])
            else:
                rows.append([a, b, names[a], names[b], 0, "AB"[w.player], names[w.machine], str(w.gain)])
    header = ["profile_a", "profile_b", "machine_a", "machine_b", "is_ne", "deviator", "deviation", "gain"]
    status = 0
    if p["check"] and report.equilibria:
        status = 2
    if p["check_exists"] and not report.equilibria:
        status = 2
    print(report.table())
    return report.to_json(), (header, rows), status


def _run_arms_race(p):
    inst = OwfInstance(p["owf_kind"], 1, p["owf_seed"])
    top = p["ladder_top"] if p["ladder_top"] is not None else len(key_lengths(p["n"], p["max_key_len"]))
    ladder = full_search_ladder(p["n"], top)
    trace = arms_race(p["n"], inst, ladder, p["max_rounds"], p["samples"], p["seed"], max_key_len=p["max_key_len"])
    for r in trace.rounds:
        print(f"round {r.round} mover {r.mover}: {r.old_budget} -> {r.new_budget} value {r.value:.4f} +/- {r.half_width:.4f}")
    rows = [[r.round, r.mover, r.new_budget, repr(r.gain), repr(r.half_width)] for r in trace.rounds]
    doc = {"ladder": ladder, "rounds": trace.to_rows()}
    return doc, (["round", "mover", "budget", "gain", "half_width"], rows), 0


def _run_security(p):
    inst = OwfInstance("random_table", 1, p["owf_seed"])
    rows = []
    for t in p["budgets"]:
        rate = measure_security(inst, p["k"], t, p["trials"], p["seed"])
        rows.append([p["k"], t, repr(rate), repr(t / 2 ** p["k"])])
        print(f"k={p['k']} t={t}: rate {rate:.4f} (t/2^k = {t / 2 ** p['k']:.4f})")
    doc = {"rates": [dict(zip(("k", "budget", "rate", "t_over_2k"), (r[0], r[1], float(r[2]), float(r[3])))) for r in rows]}
    return doc, (["k", "budget", "rate", "t_over_2k"], rows), 0


def _run_single_puzzle(p):
    inst = OwfInstance(p["owf_kind"], 1, p["owf_seed"])
    budgets = [0] + [1 << j for j in range(p["max_budget_log2"] + 1)]
    base, gains = single_puzzle_deviation_gains(p["n"], inst, budgets, p["samples"], p["seed"])
    worst = max(g.gain for g in gains)
    print(f"baseline {base:.6f}; largest deviation gain {worst:.6f} (epsilon {p['epsilon']})")
    rows = [[g.deviation, g.budget, repr(g.value), repr(g.gain), repr(g.half_width)] for g in gains]
    doc = {"baseline": base, "deviations": [asdict(g) for g in gains], "max_gain": worst}
    status = 2 if p["check"] and worst > p["epsilon"] else 0
    return doc, (["deviation", "budget", "value", "gain", "half_width"], rows), status


def _run_expected_utility(p):
    game = game_from_json(json.loads(Path(p["game"]).read_text()))
    if p["profile"]:
        profile = profile_from_json(game, json.loads(Path(p["profile"]).read_text()))
    else:
        profile = [MixedStrategy.uniform(game.type_spaces[i], game.action_spaces[i]) for i in range(game.num_players)]
    values = expected_utility(game, profile)
    doc = {"exact": [str(v) for v in values]}
    rows = [[i, str(v), "", ""] for i, v in enumerate(values)]
    if p["samples"]:
        est = estimate_utility(game, profile, p["samples"], p["seed"])
        doc["estimate"] = [{"value": e.value, "half_width": e.half_width} for e in est]
        rows = [[i, str(v), repr(e.value), repr(e.half_width)] for i, (v, e) in enumerate(zip(values, est))]
    print(" ".join(f"V{i}={v}" for i, v in enumerate(values)))
    return doc, (["player", "exact", "estimate", "half_width"], rows), 0


RUNNERS = {
    "verify-pennies": _run_verify,
    "arms-race": _run_arms_race,
    "owf-security": _run_security,
    "single-puzzle-ne": _run_single_puzzle,
    "expected-utility": _run_expected_utility,
}


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run one experiment, write its artifact, and return the exit code."""
    doc, (header, rows), status = RUNNERS[cfg.subcommand](cfg.parameters)
    path = cfg.output_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    if cfg.output_format == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "subcommand": cfg.subcommand,
            "parameters": _jsonable(cfg.parameters),
            "result": _jsonable(doc),
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        path.write_text(f"# schema={SCHEMA_VERSION} subcommand={cfg.subcommand}\n" + _csv(header, rows))
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boundedgames", description="Games between step-bounded strategy machines.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, spec in PARAMETERS.items():
        sp = sub.add_parser(name)
        for key, (conv, default) in spec.items():
            flag = "--" + key.replace("_", "-")
            if conv is parse_bool:
                sp.add_argument(flag, dest=key, action="store_const", const=True, default=argparse.SUPPRESS)
            else:
                sp.add_argument(flag, dest=key, default=argparse.SUPPRESS)
        sp.add_argument("--config", dest="_config", default=None, help="JSON config file; overrides flags")
        sp.add_argument("--out", dest="_out", default=None)
        sp.add_argument("--format", dest="_format", default=None, choices=("csv", "json"))
    return parser


def config_from_args(argv) -> ExperimentConfig:
    ns = vars(build_parser().parse_args(argv))
    subcommand = ns.pop("subcommand")
    config_path, out, fmt = ns.pop("_config"), ns.pop("_out"), ns.pop("_format")
    params = dict(ns)
    if config_path:
        try:
            doc = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from None
        unknown = set(doc) - {"subcommand", "parameters", "output_format", "out"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if doc.get("subcommand", subcommand) != subcommand:
            raise ConfigError("config subcommand does not match the command line")
        params.update(doc.get("parameters", {}))
        fmt = doc.get("output_format", fmt)
        out = doc.get("out", out)
    return ExperimentConfig(subcommand, params, fmt or "json", out)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        return run_experiment(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
