"""Command-line entry point: ``hlslock analyze|lock|eval``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .explore import ENGINES, DseConfig
from .minic import MiniCError
from .pipeline import KEY_FRACTIONS, ConfigError, RunConfig, analyze, evaluate, lock, read_solution, write_artifacts

_DSE_FLAGS = {
    "population": int,
    "max_generations": int,
    "stagnation_limit": int,
    "crossover_prob": float,
    "mutation_prob": float,
    "gene_mutation_prob": float,
    "elite": int,
    "tournament": int,
    "random_budget": int,
}


def _step_budget(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'auto' or a positive integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected 'auto' or a positive integer")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config; command-line flags take precedence")
    p.add_argument("--src", help="MiniC source file")
    p.add_argument("--top", help="top function (default: the function nobody calls)")
    p.add_argument("--exclude", action="append", metavar="FUNC", help="function to leave unlocked")
    p.add_argument("--force", action="append", type=int, metavar="ID", help="point id that must be locked")


def _run_flags(p: argparse.ArgumentParser) -> None:
    key = p.add_mutually_exclusive_group()
    key.add_argument("--key", help="hex digits (bit i of the number is KEY[i]) or random:<bits>:<seed>")
    key.add_argument("--key-frac", type=int, choices=KEY_FRACTIONS,
                     help="random key of this percentage of the full budget")
    p.add_argument("--tests", help="test-vector JSON file or random:<T>:<seed> (default random:100:0)")
    p.add_argument("--wrong-keys", type=int, metavar="W", help="number of wrong keys (default 100)")
    p.add_argument("--wrong-key-seed", type=int)
    p.add_argument("--seed", type=int, help="search and key seed (default 0)")
    p.add_argument("--cost-model", help="JSON cost table")
    p.add_argument("--step-budget", type=_step_budget, help="per-run loop step budget or 'auto'")
    p.add_argument("--json", action="store_true", help="print machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hlslock", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hlslock {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="list obfuscation points and the full key budget")
    _common(p)
    p.add_argument("--json", action="store_true", help="print machine-readable output")

    p = sub.add_parser("lock", help="explore, select and emit a locked program")
    _common(p)
    _run_flags(p)
    p.add_argument("--engine", choices=sorted(ENGINES))
    p.add_argument("--epsilon", type=float, help="selection band below the best H (default 0.02)")
    p.add_argument("--jobs", type=int, default=1, help="parallel fitness workers (results do not change)")
    p.add_argument("--out", default="hlslock-out", help="output directory")
    p.add_argument("--record-time", action="store_true", help="store wall time in the report")
    for name, kind in _DSE_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), type=kind)

    p = sub.add_parser("eval", help="score one solution vector")
    _common(p)
    _run_flags(p)
    p.add_argument("--solution", required=True, help="JSON list or a run report")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
    dse = dict(data.pop("dse", {}) or {})
    names = {f.name for f in fields(RunConfig)} - {"dse"}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for name in names:
        value = getattr(args, name, None)
        if value is not None and value is not False:
            data[name] = value
    for name in _DSE_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            dse[name] = value
    if "src" not in data:
        raise ConfigError("no source file given (--src)")
    for name in ("exclude", "force"):
        if name in data:
            data[name] = tuple(data[name])
    dse.pop("seed", None)
    dse.pop("jobs", None)
    return RunConfig(dse=replace(DseConfig(), **dse), **data)


def _print_analysis(info: dict) -> None:
    print(f"top: {info['top']}")
    print(info["row"])
    print(f"design space: {info['space']} solutions")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = None
    try:
        config = config_from_args(args)
        if args.command == "analyze":
            info = analyze(config)
            if args.json:
                print(json.dumps(info, indent=2))
            else:
                _print_analysis(info)
        elif args.command == "lock":
            if args.jobs < 1:
                raise ConfigError("--jobs must be positive")
            art = lock(config, jobs=args.jobs)
            paths = write_artifacts(art, args.out)
            sel = art.report["selected"]
            if args.json:
                print(json.dumps({k: str(v) for k, v in paths.items()}))
            else:
                print(art.report["points"]["row"])
                print(f"engine {art.result.engine}: {art.result.evaluations} evaluations, "
                      f"best H {art.result.best_H:.6f}")
                print(f"selected H {sel['H']:.6f} (N*H {sel['NH']:.3f}), "
                      f"{sel['key_bits']} key bits, cost {art.report['cost']['locked']['total']:g}")
                for kind, path in paths.items():
                    print(f"{kind}: {path}")
        else:
            info = evaluate(config, read_solution(args.solution))
            if args.json:
                print(json.dumps(info, indent=2))
            else:
                print(f"H {info['H']:.12f}  N*H {info['NH']:.6f}  key bits {info['key_bits']}")
                print("P " + " ".join(f"{p:.4f}" for p in info["p"]))
                print(f"cost {info['cost']['total']:g}")
    except MiniCError as exc:
        where = f"{config.src}:" if config is not None else ""
        print(f"hlslock: error: {where}{exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"hlslock: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
