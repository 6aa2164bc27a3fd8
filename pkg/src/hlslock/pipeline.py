"""End-to-end runs: analyze, lock, and re-evaluate, producing report artifacts."""
from __future__ import annotations

import csv
import io
import json
import re
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

from . import __version__
from .costsel import CostModel, estimate_cost, select
from .entropy import entropy_report, make_wrong_keys
from .explore import ENGINES, DseConfig, DseResult, DseTrace, Evaluator
from .locker import LockingKey, apply_locking
from .lockpoints import Constraints, find_points, full_budget, summarize, validate_solution
from .minic import emit_source, parse
from .minic.ast import Program
from .simulator import (
    calibrate_step_budget, golden, load_tests, random_tests,
)
from .report import validate_report

KEY_FRACTIONS = (25, 50, 75, 100)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    src: str
    top: Optional[str] = None
    key: Optional[str] = None
    key_frac: Optional[int] = None
    tests: str = "random:100:0"
    wrong_keys: int = 100
    wrong_key_seed: int = 1
    engine: str = "ga"
    seed: int = 0
    epsilon: float = 0.02
    cost_model: Optional[str] = None
    step_budget: Union[int, str] = "auto"
    exclude: tuple[str, ...] = ()
    force: tuple[int, ...] = ()
    dse: DseConfig = field(default_factory=DseConfig)
    record_time: bool = False

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine '{self.engine}'; choose from {', '.join(ENGINES)}")
        if self.key is not None and self.key_frac is not None:
            raise ConfigError("give either a key or a key fraction, not both")
        if self.key_frac is not None and self.key_frac not in KEY_FRACTIONS:
            raise ConfigError(f"key fraction must be one of {KEY_FRACTIONS}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError("epsilon must lie in [0, 1]")
        if self.wrong_keys < 1:
            raise ConfigError("need at least one wrong key")
        if self.step_budget != "auto" and (not isinstance(self.step_budget, int) or self.step_budget < 1):
            raise ConfigError("step budget must be 'auto' or a positive integer")

    def echo(self) -> dict:
        """Everything that determines the results (parallelism excluded)."""
        data = asdict(self)
        data["exclude"] = list(self.exclude)
        data["force"] = list(self.force)
        dse = dict(data.pop("dse"))
        dse.pop("jobs")
        dse["seed"] = self.seed
        data["dse"] = dse
        data.pop("record_time")
        return data


# -- resolution of config fields ---------------------------------------------


def load_program(config: RunConfig) -> Program:
    return parse(Path(config.src).read_text(), top=config.top)


def resolve_key(config: RunConfig, full_bits: int) -> LockingKey:
    text = config.key
    if text is None:
        frac = config.key_frac if config.key_frac is not None else 100
        return LockingKey.random(full_bits * frac // 100, config.seed)
    m = re.fullmatch(r"random:(\d+):(\d+)", text)
    if m:
        return LockingKey.random(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"(?:0x)?([0-9a-fA-F]+)(?::(\d+))?", text)
    if m:
        length = int(m.group(2)) if m.group(2) else None
        try:
            return LockingKey.from_hex(m.group(1), length)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError(f"cannot read key '{text}': expected hex digits or random:<bits>:<seed>")


def resolve_tests(config: RunConfig, program: Program) -> list[dict]:
    m = re.fullmatch(r"random:(\d+):(\d+)", config.tests)
    if m:
        return random_tests(program, int(m.group(1)), int(m.group(2)))
    return load_tests(config.tests)


def resolve_model(config: RunConfig) -> CostModel:
    return CostModel.from_json(config.cost_model) if config.cost_model else CostModel()


@dataclass
class Setup:
    program: Program
    points: list
    key: LockingKey
    tests: list
    golden: list
    wrong_keys: object
    step_budget: int
    model: CostModel


def prepare(config: RunConfig) -> Setup:
    program = load_program(config)
    points = find_points(program, Constraints(config.exclude, config.force))
    key = resolve_key(config, full_budget(points))
    points = find_points(program, Constraints(config.exclude, config.force, len(key)))
    tests = resolve_tests(config, program)
    if config.step_budget == "auto":
        budget = calibrate_step_budget(program, tests)
    else:
        budget = config.step_budget
    gold = golden(program, tests, budget)
    wrong = make_wrong_keys(key, config.wrong_keys, config.wrong_key_seed) if len(key) else None
    return Setup(program, points, key, tests, gold, wrong, budget, resolve_model(config))


# -- commands ----------------------------------------------------------------


def analyze(config: RunConfig) -> dict:
    program = load_program(config)
    points = find_points(program, Constraints(config.exclude, config.force))
    s = summarize(points)
    return {
        "top": program.top_name,
        "branches": s.branches,
        "operations": s.operations,
        "constants": s.constants,
        "full_bits": s.full_bits,
        "space": str(s.space),
        "row": s.row(),
        "points": [
            {"id": p.point_id, "kind": p.kind.value, "function": p.function,
             "alternatives": p.alternatives, "key_cost": p.key_cost, "forced": p.forced}
            for p in points
        ],
    }


@dataclass
class LockArtifacts:
    report: dict
    locked_source: str
    trace_csv: str
    result: DseResult


def _score(setup: Setup, solution) -> tuple:
    locked = apply_locking(setup.program, setup.points, solution, setup.key)
    if setup.wrong_keys is None:
        return locked, None
    return locked, entropy_report(locked, setup.tests, setup.golden, setup.wrong_keys, setup.step_budget)


def _entropy_block(rep) -> dict:
    if rep is None:
        return {"H": 0.0, "NH": 0.0, "N": 0, "runs": 0, "p": [], "statuses": {}}
    return {
        "H": rep.H, "NH": rep.NH, "N": rep.N, "runs": rep.runs,
        "p": [float(x) for x in rep.p], "statuses": dict(rep.statuses),
    }


def trace_csv(result: DseResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["generation", "best", "mean", "std"])
    for g in result.trace.generations:
        writer.writerow([g.generation, repr(g.best), repr(g.mean), repr(g.std)])
    return buf.getvalue()


def _choose(setup: Setup, result: DseResult, epsilon: float):
    cands = [(s, h, apply_locking(setup.program, setup.points, s, setup.key))
             for s, h in result.candidates]
    return select(cands, epsilon, setup.model)


def lock(config: RunConfig, jobs: int = 1) -> LockArtifacts:
    started = time.perf_counter()
    setup = prepare(config)
    dse = replace(config.dse, seed=config.seed, jobs=jobs)
    if setup.wrong_keys is None:
        # zero-length key: nothing can be locked
        zero = tuple(0 for _ in setup.points)
        if any(p.forced for p in setup.points):
            raise ConfigError("forced points need key bits")
        trace = DseTrace()
        trace.record(0, [0.0], 0.0, 1, 0)
        result = DseResult(config.engine, zero, 0.0, [(zero, 0.0)], trace, 1)
        chosen = _choose(setup, result, config.epsilon)
        rep = None
    else:
        with Evaluator(setup.program, setup.points, setup.key, setup.tests, setup.wrong_keys,
                       setup.step_budget, jobs, setup.golden) as ev:
            result = ENGINES[config.engine](ev, dse, config.epsilon)
            chosen = _choose(setup, result, config.epsilon)
            rep = ev.report(chosen.solution)
    locked = apply_locking(setup.program, setup.points, chosen.solution, setup.key)
    baseline = estimate_cost(setup.program, setup.model)
    cost = estimate_cost(locked, setup.model)
    s = summarize(setup.points)
    report = {
        "tool": {"name": "hlslock", "version": __version__},
        "config": config.echo(),
        "points": {
            "branches": s.branches, "operations": s.operations, "constants": s.constants,
            "full_bits": s.full_bits, "space": str(s.space), "row": s.row(),
        },
        "key": {"length": len(setup.key), "hex": setup.key.to_hex() if len(setup.key) else ""},
        "tests": {"count": len(setup.tests), "source": config.tests},
        "wrong_keys": {"count": config.wrong_keys, "seed": config.wrong_key_seed},
        "step_budget": setup.step_budget,
        "search": {
            "engine": result.engine,
            "best_solution": list(result.best),
            "best_H": result.best_H,
            "evaluations": result.evaluations,
            "band_size": chosen.band_size,
        },
        "selected": {
            "solution": list(chosen.solution),
            "key_bits": sum(n for _, n in locked.alloc.values()),
            "alloc": [
                {"point_id": pid, "offset": off, "length": n}
                for pid, (off, n) in sorted(locked.alloc.items())
            ],
            **_entropy_block(rep),
        },
        "cost": {"baseline": baseline.to_dict(), "locked": cost.to_dict(),
                 "overhead": cost.total - baseline.total},
        "trace": result.trace.to_rows(),
        "seeds": {"search": config.seed, "wrong_keys": config.wrong_key_seed, "tests": config.tests,
                  "key": config.key if config.key else f"random:{len(setup.key)}:{config.seed}"},
        "wall_time_s": round(time.perf_counter() - started, 3) if config.record_time else None,
    }
    validate_report(report)
    return LockArtifacts(report, emit_source(locked.ast), trace_csv(result), result)


def write_artifacts(art: LockArtifacts, out: Union[str, Path]) -> dict[str, Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "locked": out / "locked.c",
        "report": out / "report.json",
        "trace": out / "trace.csv",
    }
    paths["locked"].write_text(art.locked_source)
    paths["report"].write_text(json.dumps(art.report, indent=2, sort_keys=True) + "\n")
    paths["trace"].write_text(art.trace_csv)
    return paths


def read_solution(path: Union[str, Path]) -> tuple[int, ...]:
    """A solution from a JSON list, or the selected solution of a run report."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("selected", {}).get("solution")
    if not isinstance(data, list) or not all(isinstance(v, int) for v in data):
        raise ConfigError(f"{path}: expected a list of integers or a run report")
    return tuple(data)


def evaluate(config: RunConfig, solution: Sequence[int]) -> dict:
    setup = prepare(config)
    solution = tuple(int(v) for v in solution)
    try:
        validate_solution(solution, setup.points)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    locked, rep = _score(setup, solution)
    return {
        "solution": list(solution),
        "key_bits": sum(n for _, n in locked.alloc.values()),
        **_entropy_block(rep),
        "cost": estimate_cost(locked, setup.model).to_dict(),
    }


__all__ = [
    "ConfigError", "KEY_FRACTIONS", "LockArtifacts", "RunConfig", "Setup", "analyze",
    "evaluate", "lock", "prepare", "read_solution", "resolve_key", "trace_csv",
    "write_artifacts",
]
