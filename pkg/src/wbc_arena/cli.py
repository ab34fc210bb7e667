"""``wbc-arena`` command line.

Exit codes: 0 success, 2 configuration error (unknown id, bad value),
3 runtime error.  The seed falls back to ``$WBC_ARENA_SEED`` and then 0.
Every output starts with a header carrying the seed, the zoo version and a
hash of the resolved configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from collections.abc import Sequence

from . import schemes
from .adversaries import ZOO_VERSION, get_adversary, get_learner, zoo_registry
from .core import get_family
from .demos import DEMOS, Scale
from .errors import UnknownId, WbcError
from .games import (
    ADVANTAGE_COLUMNS,
    BLACKBOX,
    MODES,
    WHITEBOX,
    Runner,
    advantage_row,
    estimate_advantage,
    gap_rows,
    gap_seed,
    whitebox_gap,
    write_csv,
)
from .learnability import EXACT, LearnReport, estimate_learnability
from .obfuscation import check_correctness, check_tau_correctness
from .registry import get_obfuscator
from .rng import RngStream, env_seed
from .specs_library import get_spec, spec_ids

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class ConfigError(Exception):
    pass


def config_hash(config: dict) -> str:
    """Hash of the experiment settings; where the output goes is not part of it."""
    settings = {k: v for k, v in config.items() if k != "output_path"}
    blob = json.dumps(settings, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def header_lines(config: dict) -> list[str]:
    return [f"seed={config['seed']} zoo_version={ZOO_VERSION} config_hash={config_hash(config)}"]


def _resolve(args: argparse.Namespace, keys: Sequence[str], defaults: dict) -> dict:
    """Config file values, overridden by any flag given on the command line."""
    config = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(keys)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config.update(loaded)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    if config.get("seed") is None:
        config["seed"] = env_seed()
    for key in ("trials", "k", "samples"):
        if key in config and (not isinstance(config[key], int) or config[key] < 1):
            raise ConfigError(f"{key} must be a positive integer")
    return config


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- run ----------------------------------------------------------------------

RUN_KEYS = ("spec_id", "obfuscator_id", "adversary_ids", "k", "trials", "blackbox_trials", "seed", "mode",
            "index", "index2", "output_path", "format")


def cmd_run(args: argparse.Namespace) -> int:
    config = _resolve(args, RUN_KEYS, {"mode": BLACKBOX, "format": "csv", "trials": 1000, "k": 16,
                                       "obfuscator_id": None, "index": None, "index2": None,
                                       "blackbox_trials": None, "output_path": None})
    if not config.get("spec_id") or not config.get("adversary_ids"):
        raise ConfigError("run needs a spec and at least one adversary")
    if config["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    if config["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    spec = get_spec(config["spec_id"])
    ids = config["adversary_ids"]
    if isinstance(ids, str):
        ids = [a for a in ids.split(",") if a]
    zoo = [get_adversary(a) for a in ids]
    k, trials, seed = config["k"], config["trials"], config["seed"]
    if k < spec.min_k:
        raise ConfigError(f"{spec.spec_id} needs k >= {spec.min_k}")
    rows = []
    if config["mode"] == BLACKBOX:
        for adv in zoo:
            est = estimate_advantage(Runner(spec, adv), k, trials, gap_seed(seed, adv.adversary_id, BLACKBOX))
            rows.append(advantage_row(spec.spec_id, spec.families[0].family_id, "none", adv.adversary_id,
                                      BLACKBOX, k, est))
    else:
        if not config["obfuscator_id"]:
            raise ConfigError("white-box modes need an obfuscator")
        obf = get_obfuscator(config["obfuscator_id"])
        claims = sorted(spec.obfuscatable_claims)
        i = config["index"] or claims[0]
        j = None
        if config["mode"] != WHITEBOX:
            j = config["index2"] or next((c for c in claims if c != i), None)
            if j is None:
                raise ConfigError(f"{spec.spec_id} has no second obfuscatable oracle")
        report = whitebox_gap(spec, i, obf, zoo, k, trials, seed, j=j,
                              blackbox_trials=config["blackbox_trials"], zoo_version=ZOO_VERSION)
        family_id = spec.families[i - 1].family_id
        rows = gap_rows(report, family_id)
        for e in report.entries:
            rows.append([spec.spec_id, family_id, obf.obfuscator_id, e.adversary_id, "gap", k, "", "",
                         f"{e.gap:.6f}", "", ""])
        rows.append([spec.spec_id, family_id, obf.obfuscator_id, "zoo-max", "gap", k, "", "",
                     f"{report.max_gap:.6f}", "", ""])
    if config["format"] == "csv":
        text = write_csv(rows, ADVANTAGE_COLUMNS, header_lines(config))
    else:
        text = json.dumps({"header": {"seed": seed, "zoo_version": ZOO_VERSION, "config_hash": config_hash(config)},
                           "rows": [dict(zip(ADVANTAGE_COLUMNS, r)) for r in rows]}, indent=2) + "\n"
    _emit(text, config["output_path"])
    return EXIT_OK


# -- check-obfuscator ---------------------------------------------------------

CHECK_KEYS = ("family_id", "obfuscator_id", "k", "samples", "seed", "tau", "threshold", "inputs_per_key",
              "output_path")


def cmd_check_obfuscator(args: argparse.Namespace) -> int:
    config = _resolve(args, CHECK_KEYS, {"k": 31, "samples": 1000, "tau": False, "threshold": 0.0,
                                         "inputs_per_key": 1, "output_path": None})
    if not config.get("family_id") or not config.get("obfuscator_id"):
        raise ConfigError("check-obfuscator needs a family and an obfuscator")
    family = get_family(config["family_id"])
    obf = get_obfuscator(config["obfuscator_id"])
    rng = RngStream(config["seed"])
    if config["tau"]:
        if family.family_id != "PE":
            raise ConfigError("tau checks are available for the PE family")
        _, _, decider = schemes.prob_pairing_family(config["k"])
        report = check_tau_correctness(obf, family, decider, config["k"], config["samples"], rng,
                                       config["inputs_per_key"], config["threshold"])
    else:
        report = check_correctness(obf, family, config["k"], config["samples"], rng,
                                   config["inputs_per_key"], config["threshold"])
    out = report.to_dict()
    out["meta"] = {"seed": config["seed"], "zoo_version": ZOO_VERSION, "config_hash": config_hash(config),
                   "tau": config["tau"]}
    _emit(json.dumps(out, indent=2) + "\n", config["output_path"])
    return EXIT_OK


# -- demo ---------------------------------------------------------------------


def cmd_demo(args: argparse.Namespace) -> int:
    if args.name not in DEMOS:
        raise UnknownId("demo", args.name)
    seed = args.seed if args.seed is not None else env_seed()
    scale = Scale.uniform(args.trials) if args.trials else Scale()
    config = {"demo": args.name, "seed": seed, "trials": args.trials}
    lines, rows = DEMOS[args.name](seed, scale)
    sys.stdout.write("\n".join(lines) + "\n")
    csv_text = write_csv(rows, ADVANTAGE_COLUMNS, header_lines(config))
    if args.output:
        _emit(csv_text, args.output)
    else:
        sys.stdout.write("\n" + csv_text)
    return EXIT_OK


# -- learnability -------------------------------------------------------------

LEARN_KEYS = ("family_id", "learner_id", "mode", "k", "trials", "seed", "output_path")


def cmd_learnability(args: argparse.Namespace) -> int:
    config = _resolve(args, LEARN_KEYS, {"mode": EXACT, "k": 8, "trials": 100, "output_path": None})
    if not config.get("family_id") or not config.get("learner_id"):
        raise ConfigError("learnability needs a family and a learner")
    family = get_family(config["family_id"])
    learner = get_learner(config["learner_id"])
    try:
        report = estimate_learnability(family, learner, config["k"], config["trials"], config["mode"],
                                       config["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    text = write_csv([report.csv_row()], LearnReport.CSV_COLUMNS, header_lines(config))
    _emit(text, config["output_path"])
    return EXIT_OK


# -- listings -----------------------------------------------------------------


def cmd_zoo_list(args: argparse.Namespace) -> int:
    sys.stdout.write(json.dumps([e.to_dict() for e in zoo_registry()], indent=2) + "\n")
    return EXIT_OK


def cmd_spec_list(args: argparse.Namespace) -> int:
    out = []
    for sid in spec_ids():
        spec = get_spec(sid)
        out.append({"spec_id": sid, "families": [f.family_id for f in spec.families],
                    "obfuscatable": sorted(spec.obfuscatable_claims), "description": spec.description})
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wbc-arena", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="estimate advantages and white-box gaps")
    run.add_argument("--config")
    run.add_argument("--spec", dest="spec_id")
    run.add_argument("--obfuscator", dest="obfuscator_id")
    run.add_argument("--adversaries", dest="adversary_ids", help="comma-separated zoo ids")
    run.add_argument("--k", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--blackbox-trials", dest="blackbox_trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--index", type=int)
    run.add_argument("--index2", type=int)
    run.add_argument("--output", dest="output_path")
    run.add_argument("--format", choices=("csv", "json"))
    run.set_defaults(func=cmd_run)

    chk = sub.add_parser("check-obfuscator", help="measure an obfuscator's correctness")
    chk.add_argument("--config")
    chk.add_argument("--family", dest="family_id")
    chk.add_argument("--obfuscator", dest="obfuscator_id")
    chk.add_argument("--k", type=int)
    chk.add_argument("--samples", type=int)
    chk.add_argument("--seed", type=int)
    chk.add_argument("--threshold", type=float)
    chk.add_argument("--inputs-per-key", dest="inputs_per_key", type=int)
    chk.add_argument("--tau", action="store_true", default=None)
    chk.add_argument("--output", dest="output_path")
    chk.set_defaults(func=cmd_check_obfuscator)

    demo = sub.add_parser("demo", help="run one of the headline demos")
    demo.add_argument("name", help=", ".join(DEMOS))
    demo.add_argument("--seed", type=int)
    demo.add_argument("--trials", type=int, help="override every trial count (quick runs)")
    demo.add_argument("--output")
    demo.set_defaults(func=cmd_demo)

    learn = sub.add_parser("learnability", help="estimate a learner's success rate")
    learn.add_argument("--config")
    learn.add_argument("--family", dest="family_id")
    learn.add_argument("--learner", dest="learner_id")
    learn.add_argument("--mode", choices=("exact", "approx"))
    learn.add_argument("--k", type=int)
    learn.add_argument("--trials", type=int)
    learn.add_argument("--seed", type=int)
    learn.add_argument("--output", dest="output_path")
    learn.set_defaults(func=cmd_learnability)

    zoo = sub.add_parser("zoo", help="inspect the adversary zoo")
    zoo_sub = zoo.add_subparsers(dest="zoo_command", required=True)
    zoo_sub.add_parser("list").set_defaults(func=cmd_zoo_list)

    spec = sub.add_parser("spec", help="inspect the specification registry")
    spec_sub = spec.add_subparsers(dest="spec_command", required=True)
    spec_sub.add_parser("list").set_defaults(func=cmd_spec_list)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (UnknownId, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (WbcError, ValueError, RuntimeError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
