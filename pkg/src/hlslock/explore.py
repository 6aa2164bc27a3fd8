"""Design-space exploration over locking solution vectors.

The genetic algorithm is the main engine; random search, the depth-first
"TAO" heuristic and full locking are baselines.  Every engine works through
an :class:`Evaluator`, which owns the fitness cache and the optional process
pool.  Randomness is drawn from per-(generation, individual) streams so a
run is reproducible whatever the degree of parallelism.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .entropy import EntropyReport, differential_entropy, flip_counts
from .locker import LockingKey, apply_locking
from .lockpoints import (
    ObfuscationPoint, all_ones, full_budget, key_bits, space_size,
    validate_solution,
)
from .minic.ast import Program
from .simulator import DEFAULT_STEP_BUDGET, InputVector, OutputBits, golden

Solution = tuple[int, ...]


class ExploreError(ValueError):
    pass


@dataclass(frozen=True)
class DseConfig:
    population: int = 300
    max_generations: int = 1000
    stagnation_limit: int = 10
    crossover_prob: float = 0.5
    mutation_prob: float = 0.2
    gene_mutation_prob: float = 0.05
    elite: int = 1
    tournament: int = 3
    seed: int = 0
    jobs: int = 1
    random_budget: int = 1000

    def __post_init__(self):
        for name in ("crossover_prob", "mutation_prob", "gene_mutation_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ExploreError(f"{name} must lie in [0, 1]")
        if self.population < 2:
            raise ExploreError("population must be at least 2")
        if not 0 <= self.elite < self.population:
            raise ExploreError("elite count must be below the population size")
        if self.tournament < 1 or self.max_generations < 0 or self.stagnation_limit < 1:
            raise ExploreError("tournament, generation and stagnation limits must be positive")
        if self.jobs < 1 or self.random_budget < 1:
            raise ExploreError("jobs and random_budget must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best: float
    mean: float
    std: float
    evaluations: int
    best_key_bits: int


@dataclass
class DseTrace:
    generations: list[GenerationStats] = field(default_factory=list)

    def record(self, generation: int, scores: Sequence[float], best: float, evaluations: int, bits: int):
        arr = np.asarray(scores, dtype=np.float64)
        self.generations.append(GenerationStats(
            generation, best, float(arr.mean()), float(arr.std()), evaluations, bits,
        ))

    def best_series(self) -> list[float]:
        return [g.best for g in self.generations]

    def to_rows(self) -> list[dict]:
        return [asdict(g) for g in self.generations]


@dataclass
class DseResult:
    engine: str
    best: Solution
    best_H: float
    candidates: list[tuple[Solution, float]]
    trace: DseTrace
    evaluations: int


# -- fitness -----------------------------------------------------------------


class _Fitness:
    """Picklable fitness function: entropy of the locked program for a solution."""

    def __init__(self, program, points, key, tests, golden_out, wrong_keys, step_budget):
        self.program = program
        self.points = points
        self.key = key
        self.tests = tests
        self.golden = golden_out
        self.wrong_keys = wrong_keys
        self.step_budget = step_budget

    def __call__(self, solution: Solution) -> EntropyReport:
        locked = apply_locking(self.program, self.points, solution, self.key)
        counts, statuses = flip_counts(locked, self.tests, self.golden, self.wrong_keys, self.step_budget)
        runs = len(self.tests) * len(self.wrong_keys)
        p = counts / runs
        return EntropyReport(p, differential_entropy(p), runs, dict(sorted(statuses.items())))


_WORKER_FITNESS: Optional[_Fitness] = None


def _worker_init(fitness: _Fitness) -> None:
    global _WORKER_FITNESS
    _WORKER_FITNESS = fitness


def _worker_eval(solution: Solution) -> EntropyReport:
    return _WORKER_FITNESS(solution)


class Evaluator:
    """Caching fitness oracle shared by all engines."""

    def __init__(
        self,
        program: Program,
        points: Sequence[ObfuscationPoint],
        key: LockingKey,
        tests: Sequence[InputVector],
        wrong_keys,
        step_budget: int = DEFAULT_STEP_BUDGET,
        jobs: int = 1,
        golden_out: Optional[Sequence[OutputBits]] = None,
    ):
        self.points = list(points)
        self.key_length = len(key)
        gold = list(golden_out) if golden_out is not None else golden(program, tests, step_budget)
        self.fitness = _Fitness(program, self.points, key, list(tests), gold, wrong_keys, step_budget)
        self.jobs = jobs
        self.cache: dict[Solution, float] = {}
        self.reports: dict[Solution, EntropyReport] = {}
        self._pool: Optional[ProcessPoolExecutor] = None

    @property
    def evaluations(self) -> int:
        return len(self.cache)

    def key_bits(self, solution: Solution) -> int:
        return key_bits(solution, self.points)

    def evaluate(self, solution: Sequence[int]) -> float:
        return self.evaluate_many([tuple(solution)])[0]

    def report(self, solution: Sequence[int]) -> EntropyReport:
        solution = tuple(int(v) for v in solution)
        self.evaluate_many([solution])
        return self.reports[solution]

    def evaluate_many(self, solutions: Sequence[Sequence[int]]) -> list[float]:
        solutions = [tuple(int(v) for v in s) for s in solutions]
        todo = list(dict.fromkeys(s for s in solutions if s not in self.cache))
        for s in todo:
            validate_solution(s, self.points)
            if self.key_bits(s) > self.key_length:
                raise ExploreError(f"solution {s} needs more than {self.key_length} key bits")
        if todo:
            if self.jobs > 1 and len(todo) > 1:
                pool = self._get_pool()
                chunk = max(1, len(todo) // (4 * self.jobs))
                reports = list(pool.map(_worker_eval, todo, chunksize=chunk))
            else:
                reports = [self.fitness(s) for s in todo]
            self.reports.update(zip(todo, reports))
            self.cache.update((s, r.H) for s, r in zip(todo, reports))
        return [self.cache[s] for s in solutions]

    def _get_pool(self) -> ProcessPoolExecutor:
        if self._pool is None:
            self._pool = ProcessPoolExecutor(
                max_workers=self.jobs, initializer=_worker_init, initargs=(self.fitness,)
            )
        return self._pool

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def band(self, epsilon: float) -> list[tuple[Solution, float]]:
        """Every evaluated solution with ``H >= (1 - epsilon) * best``, best first."""
        if not self.cache:
            return []
        best = max(self.cache.values())
        floor = (1.0 - epsilon) * best
        kept = [(s, h) for s, h in self.cache.items() if h >= floor]
        return sorted(kept, key=lambda item: (-item[1], item[0]))

    def result(self, engine: str, trace: DseTrace, epsilon: float) -> DseResult:
        best, best_H = self.band(epsilon)[0]
        return DseResult(engine, best, best_H, self.band(epsilon), trace, self.evaluations)


# -- feasibility -------------------------------------------------------------


def _forced_cost(points: Sequence[ObfuscationPoint]) -> int:
    return sum(p.key_cost for p in points if p.forced)


def make_repair(points: Sequence[ObfuscationPoint], key_length: int) -> Callable[[list[int]], list[int]]:
    """Deactivate non-forced points, costliest (then highest id) first, until feasible."""
    if _forced_cost(points) > key_length:
        raise ExploreError("forced points alone exceed the key length")
    order = sorted(
        (p for p in points if not p.forced), key=lambda p: (-p.key_cost, -p.point_id)
    )

    def repair(values: list[int]) -> list[int]:
        used = key_bits(values, points)
        for p in order:
            if used <= key_length:
                break
            if values[p.point_id]:
                values[p.point_id] = 0
                used -= p.key_cost
        return values

    return repair


def _random_solution(rng: np.random.Generator, points: Sequence[ObfuscationPoint]) -> list[int]:
    return [int(rng.integers(p.low, p.alternatives, endpoint=True)) for p in points]


# -- engines -----------------------------------------------------------------


def tao_baseline(points: Sequence[ObfuscationPoint], key_length: int) -> Solution:
    """Depth-first greedy: lock each affordable point with its first variant.

    Forced points are paid for up front; a point that no longer fits is
    skipped and the walk continues.
    """
    remaining = key_length - _forced_cost(points)
    if remaining < 0:
        raise ExploreError("forced points alone exceed the key length")
    values = []
    for p in points:
        if p.forced:
            values.append(1)
        elif p.key_cost <= remaining:
            values.append(1)
            remaining -= p.key_cost
        else:
            values.append(0)
    return tuple(values)


def full_solution(points: Sequence[ObfuscationPoint], key_length: int) -> Solution:
    need = full_budget(points)
    if need > key_length:
        raise ExploreError(f"full locking needs {need} key bits, key has {key_length}")
    return all_ones(points)


def _single(engine: str, solution: Solution, evaluator: Evaluator, epsilon: float) -> DseResult:
    (h,) = evaluator.evaluate_many([solution])
    trace = DseTrace()
    trace.record(0, [h], h, evaluator.evaluations, evaluator.key_bits(solution))
    return DseResult(engine, solution, h, [(solution, h)], trace, evaluator.evaluations)


def run_tao(evaluator: Evaluator, config: DseConfig, epsilon: float = 0.02) -> DseResult:
    return _single("tao", tao_baseline(evaluator.points, evaluator.key_length), evaluator, epsilon)


def run_full(evaluator: Evaluator, config: DseConfig, epsilon: float = 0.02) -> DseResult:
    return _single("full", full_solution(evaluator.points, evaluator.key_length), evaluator, epsilon)


def run_random(evaluator: Evaluator, config: DseConfig, epsilon: float = 0.02) -> DseResult:
    """Best of ``config.random_budget`` uniform feasible samples.

    When the budget covers the whole design space, every feasible solution
    is evaluated instead.
    """
    points = evaluator.points
    K = evaluator.key_length
    repair = make_repair(points, K)
    budget = config.random_budget
    trace = DseTrace()
    if budget >= space_size(points):
        ranges = [range(p.low, p.alternatives + 1) for p in points]
        batch = [s for s in itertools.product(*ranges) if key_bits(s, points) <= K]
        scores = evaluator.evaluate_many(batch)
    else:
        batch = []
        for i in range(budget):
            rng = np.random.default_rng([config.seed, i])
            for _ in range(64):
                values = _random_solution(rng, points)
                if key_bits(values, points) <= K:
                    break
            else:
                values = repair(values)
            batch.append(tuple(values))
        scores = evaluator.evaluate_many(batch)
    best = max(scores)
    best_sol = min(s for s, h in zip(batch, scores) if h == best)
    trace.record(0, scores, best, evaluator.evaluations, evaluator.key_bits(best_sol))
    return evaluator.result("random", trace, epsilon)


def run_ga(evaluator: Evaluator, config: DseConfig, epsilon: float = 0.02) -> DseResult:
    """Integer-encoded genetic algorithm with tournament selection and elitism."""
    points = evaluator.points
    n = len(points)
    repair = make_repair(points, evaluator.key_length)
    seed = config.seed

    def rng_for(generation: int, individual: int) -> np.random.Generator:
        return np.random.default_rng([seed, generation, individual])

    population = [
        tuple(repair(_random_solution(rng_for(0, i), points))) for i in range(config.population)
    ]
    scores = evaluator.evaluate_many(population)
    trace = DseTrace()

    def best_of(pop, sc):
        i = max(range(len(pop)), key=lambda j: (sc[j], [-v for v in pop[j]]))
        return pop[i], sc[i]

    best_sol, best_H = best_of(population, scores)
    trace.record(0, scores, best_H, evaluator.evaluations, evaluator.key_bits(best_sol))
    stagnant = 0
    generation = 0
    while generation < config.max_generations and stagnant < config.stagnation_limit and n:
        generation += 1
        ranked = sorted(range(len(population)), key=lambda j: (-scores[j], population[j]))
        children = [population[j] for j in ranked[: config.elite]]

        def tournament(rng):
            picks = rng.integers(0, len(population), size=config.tournament)
            return population[min(picks, key=lambda j: (-scores[j], j))]

        for i in range(config.elite, config.population):
            rng = rng_for(generation, i)
            a, b = tournament(rng), tournament(rng)
            if n > 1 and rng.random() < config.crossover_prob:
                cut = int(rng.integers(1, n))
                child = list(a[:cut] + b[cut:])
            else:
                child = list(a)
            if rng.random() < config.mutation_prob:
                hits = rng.random(n) < config.gene_mutation_prob
                for k in np.flatnonzero(hits):
                    p = points[k]
                    child[k] = int(rng.integers(p.low, p.alternatives, endpoint=True))
            children.append(tuple(repair(child)))
        population = children
        scores = evaluator.evaluate_many(population)
        gen_sol, gen_H = best_of(population, scores)
        if gen_H > best_H:
            best_sol, best_H = gen_sol, gen_H
            stagnant = 0
        else:
            stagnant += 1
        trace.record(generation, scores, best_H, evaluator.evaluations, evaluator.key_bits(best_sol))
    return evaluator.result("ga", trace, epsilon)


Engine = Callable[[Evaluator, DseConfig, float], DseResult]

ENGINES: dict[str, Engine] = {
    "ga": run_ga,
    "random": run_random,
    "tao": run_tao,
    "full": run_full,
}


def ga_explore(
    program: Program,
    points: Sequence[ObfuscationPoint],
    key: LockingKey,
    tests: Sequence[InputVector],
    wrong_keys,
    config: DseConfig = DseConfig(),
    epsilon: float = 0.02,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> tuple[list[tuple[Solution, float]], DseTrace]:
    with Evaluator(program, points, key, tests, wrong_keys, step_budget, config.jobs) as ev:
        result = run_ga(ev, config, epsilon)
    return result.candidates, result.trace


def random_search(
    program: Program,
    points: Sequence[ObfuscationPoint],
    key: LockingKey,
    tests: Sequence[InputVector],
    wrong_keys,
    budget_evals: int,
    seed: int,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> tuple[Solution, float]:
    config = DseConfig(seed=seed, random_budget=budget_evals)
    with Evaluator(program, points, key, tests, wrong_keys, step_budget) as ev:
        result = run_random(ev, config)
    return result.best, result.best_H


def exhaustive_optimum(evaluator: Evaluator) -> tuple[Solution, float]:
    """Best feasible solution by full enumeration (small spaces only)."""
    points = evaluator.points
    if space_size(points) > 1 << 16:
        raise ExploreError("design space too large to enumerate")
    ranges = [range(p.low, p.alternatives + 1) for p in points]
    sols = [s for s in itertools.product(*ranges) if key_bits(s, points) <= evaluator.key_length]
    scores = evaluator.evaluate_many(sols)
    best = max(scores)
    return min(s for s, h in zip(sols, scores) if h == best), best


__all__ = [
    "DseConfig", "DseResult", "DseTrace", "ENGINES", "Evaluator", "ExploreError",
    "GenerationStats", "exhaustive_optimum", "full_solution", "ga_explore",
    "make_repair", "random_search", "run_full", "run_ga", "run_random", "run_tao",
    "tao_baseline",
]
