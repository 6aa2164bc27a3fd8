import numpy as np
import pytest

from hlslock import benchmarks
from hlslock.entropy import exhaustive_wrong_keys, make_wrong_keys
from hlslock.explore import (
    DseConfig, Evaluator, ExploreError, exhaustive_optimum, full_solution, ga_explore,
    make_repair, random_search, run_full, run_ga, run_random, run_tao, tao_baseline,
)
from hlslock.locker import LockingKey
from hlslock.lockpoints import Constraints, ObfuscationPoint, PointKind, find_points, key_bits
from hlslock.minic import parse
from hlslock.simulator import random_tests

SMALL = "int top(int a, int b) { if (a < b) a = a + 3; return a; }"


def evaluator(source, key_length, seed=0, tests=30, constraints=None, jobs=1):
    prog = parse(source)
    points = find_points(prog, constraints)
    key = LockingKey.random(key_length, seed)
    wk = make_wrong_keys(key, min(30, (1 << key_length) - 1), 1)
    return Evaluator(prog, points, key, random_tests(prog, tests, 0), wk, jobs=jobs)


def test_twelve_solution_space_is_enumerated():
    ev = evaluator(SMALL, 34)
    res = run_random(ev, DseConfig(random_budget=12))
    assert ev.evaluations == 12
    best, H = exhaustive_optimum(ev)
    assert ev.evaluations == 12
    assert (res.best, res.best_H) == (best, H)
    assert H == max(ev.cache.values())


def test_infeasible_solutions_are_skipped_by_enumeration():
    ev = evaluator(SMALL, 2)
    exhaustive_optimum(ev)
    # the constant needs 32 bits and never fits
    assert all(s[2] == 0 for s in ev.cache)
    assert ev.evaluations == 6
    with pytest.raises(ExploreError):
        ev.evaluate((1, 1, 1))


def test_program_without_points():
    ev = evaluator("int top(int a) { return a; }", 4)
    for engine in (run_ga, run_random, run_tao, run_full):
        res = engine(ev, DseConfig(population=4))
        assert res.best == ()
        assert res.best_H == 0.0


def test_ga_is_deterministic():
    def once():
        ev = evaluator(benchmarks.source("toy_mix"), 5)
        res = run_ga(ev, DseConfig(population=20, seed=3))
        return res.best, res.best_H, res.candidates, res.trace.to_rows()

    assert once() == once()


def test_ga_parallel_matches_serial():
    cfg = DseConfig(population=20, seed=5)
    a = run_ga(evaluator(benchmarks.source("toy_mix"), 5), cfg)
    with evaluator(benchmarks.source("toy_mix"), 5, jobs=2) as ev:
        b = run_ga(ev, cfg)
    assert (a.best, a.best_H, a.candidates) == (b.best, b.best_H, b.candidates)
    assert a.trace.to_rows() == b.trace.to_rows()


def test_ga_elitism_and_trace():
    ev = evaluator(benchmarks.source("toy"), 40)
    res = run_ga(ev, DseConfig(population=30, seed=1, stagnation_limit=5))
    series = res.trace.best_series()
    assert all(b >= a for a, b in zip(series, series[1:]))
    assert res.best_H == max(ev.cache.values()) == series[-1]
    assert res.evaluations == ev.evaluations <= 30 * len(series)
    # stagnation ends the run: the last five generations made no progress
    assert len(series) > 5 and len(set(series[-6:])) == 1


def test_every_engine_returns_feasible_solutions():
    ev = evaluator(benchmarks.source("toy"), 40)
    for engine in (run_ga, run_random, run_tao):
        res = engine(ev, DseConfig(population=20, random_budget=50, seed=2))
        for s, _ in res.candidates:
            assert key_bits(s, ev.points) <= 40
    with pytest.raises(ExploreError):
        run_full(ev, DseConfig())


def test_cache_counts_distinct_solutions():
    ev = evaluator(SMALL, 34)
    ev.evaluate((1, 0, 0))
    ev.evaluate_many([(1, 0, 0), (0, 1, 0), (0, 1, 0)])
    assert ev.evaluations == 2
    assert ev.report((1, 0, 0)).H == ev.cache[(1, 0, 0)]


def _pts(kinds):
    out = []
    for i, k in enumerate(kinds):
        if k == "const":
            out.append(ObfuscationPoint(i, PointKind.CONSTANT, -1, 1, 32))
        else:
            out.append(ObfuscationPoint(i, PointKind.OPERATION, -1, 2, 1))
    return out


def test_tao_examples():
    pts = _pts(["const", "op", "op"])
    assert tao_baseline(pts, 33) == (1, 1, 0)
    assert tao_baseline(pts, 1) == (0, 1, 0)
    assert tao_baseline(pts, 0) == (0, 0, 0)
    assert full_solution(pts, 34) == (1, 1, 1)
    with pytest.raises(ExploreError):
        full_solution(pts, 33)


def test_tao_pays_for_forced_points_first():
    pts = _pts(["op", "const"])
    pts[1] = ObfuscationPoint(1, PointKind.CONSTANT, -1, 1, 32, forced=True)
    assert tao_baseline(pts, 32) == (0, 1)
    with pytest.raises(ExploreError):
        tao_baseline(pts, 31)


def test_repair_order():
    pts = _pts(["const", "op", "const", "op"])
    # const 2 goes first (same cost, higher id), then const 0
    assert make_repair(pts, 34)([1, 1, 1, 1]) == [1, 1, 0, 1]
    assert make_repair(pts, 33)([1, 1, 1, 1]) == [0, 1, 0, 1]
    assert make_repair(pts, 1)([1, 2, 1, 1]) == [0, 2, 0, 0]
    assert make_repair(pts, 66)([1, 1, 1, 1]) == [1, 1, 1, 1]


def test_random_search_examples():
    prog = parse(benchmarks.source("toy_mix"))
    points = find_points(prog)
    key = LockingKey.random(5, 0)
    tests = random_tests(prog, 30, 0)
    wk = exhaustive_wrong_keys(key)
    a = random_search(prog, points, key, tests, wk, 40, 7)
    assert a == random_search(prog, points, key, tests, wk, 40, 7)
    with Evaluator(prog, points, key, tests, wk) as ev:
        _, opt = exhaustive_optimum(ev)
    assert a[1] <= opt
    full = random_search(prog, points, key, tests, wk, 10_000, 7)
    assert full[1] == opt


def test_ga_explore_wrapper_band():
    prog = parse(benchmarks.source("cancel"))
    points = find_points(prog, Constraints(excluded_functions=("same",)))
    key = LockingKey.random(8, 0)
    cands, trace = ga_explore(prog, points, key, random_tests(prog, 30, 0),
                              exhaustive_wrong_keys(key), DseConfig(population=10), epsilon=0.5)
    best = cands[0][1]
    assert all(h >= 0.5 * best for _, h in cands)
    assert [h for _, h in cands] == sorted((h for _, h in cands), reverse=True)
    assert trace.best_series()[-1] == best


def test_config_validation():
    with pytest.raises(ValueError):
        DseConfig(population=0)
    with pytest.raises(ValueError):
        DseConfig(crossover_prob=1.5)
    assert "jobs" not in DseConfig().to_dict() or DseConfig().to_dict()["jobs"] == 1
    assert np.isclose(DseConfig().mutation_prob, 0.2)
