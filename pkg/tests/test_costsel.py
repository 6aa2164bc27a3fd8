import itertools
import json

import pytest

from hlslock import benchmarks
from hlslock.costsel import (
    CATEGORIES, DEFAULT_UNITS, Candidate, CostModel, CostModelError, estimate_cost, select,
)
from hlslock.locker import LockingKey, apply_locking
from hlslock.lockpoints import find_points, key_bits
from hlslock.minic import parse


def test_toy_baseline_by_hand():
    # x + 3, r > y, r * y, r - y, x & 5, ^
    est = estimate_cost(parse(benchmarks.source("toy")))
    assert est.breakdown == {"add": 64.0, "mul": 250.0, "compare": 20.0, "bitwise": 32.0}
    assert est.total == 366.0
    assert est.key_bits == 0


def test_locking_add_with_fake_mul():
    prog = parse("int top(int a, int b) { return a + b; }")
    points = find_points(prog)
    base = estimate_cost(prog)
    # variant 2 of `+` is `*` (variant 1 is `-`)
    locked = apply_locking(prog, points, (2,), LockingKey((1,)))
    est = estimate_cost(locked)
    assert est.total - base.total == DEFAULT_UNITS["mul"] + DEFAULT_UNITS["select"] + DEFAULT_UNITS["key_reg"]
    assert est.key_bits == 1


def test_constant_and_branch_overheads():
    prog = parse("int top(int a) { if (a < 4) return 7; return 0; }")
    points = find_points(prog)
    sol = tuple(1 if p.kind.value != "Operation" else 0 for p in points)
    key = LockingKey.random(key_bits(sol, points), 0)
    locked = apply_locking(prog, points, sol, key)
    n_const = sum(1 for p, v in zip(points, sol) if v and p.kind.value == "Constant")
    extra = estimate_cost(locked).total - estimate_cost(prog).total
    assert extra == n_const * 64 + 2


def test_overhead_is_monotone_in_the_active_set():
    prog = parse(benchmarks.source("toy_mix"))
    points = find_points(prog)
    key = LockingKey.random(16, 0)
    costs = {}
    for sol in itertools.product((0, 1), repeat=len(points)):
        costs[sol] = estimate_cost(apply_locking(prog, points, sol, key)).total
    for sol, c in costs.items():
        for i, v in enumerate(sol):
            if not v:
                more = sol[:i] + (1,) + sol[i + 1:]
                assert costs[more] > c


def test_model_validation_and_json(tmp_path):
    with pytest.raises(CostModelError):
        CostModel({"add": 1.0})
    bad = dict(DEFAULT_UNITS, extra=1.0)
    with pytest.raises(CostModelError):
        CostModel(bad)
    with pytest.raises(CostModelError):
        CostModel(dict(DEFAULT_UNITS, mul=-1.0))
    path = tmp_path / "m.json"
    path.write_text(json.dumps(dict(DEFAULT_UNITS, mul=10.0)))
    model = CostModel.from_json(path)
    assert model["mul"] == 10.0
    assert set(model.to_dict()) == set(CATEGORIES)


def _candidates():
    prog = parse(benchmarks.source("toy_mix"))
    points = find_points(prog)
    key = LockingKey.random(16, 0)
    out = []
    for sol, H in [((1, 0, 0, 0, 0), 0.90), ((0, 0, 0, 0, 1), 0.895), ((1, 1, 1, 1, 1), 0.91),
                   ((1, 1, 0, 0, 0), 0.70)]:
        out.append(Candidate(sol, H, apply_locking(prog, points, sol, key)))
    return prog, out


def test_selection_band_by_hand():
    _, cands = _candidates()
    best = 0.91
    band = [c for c in cands if c.H >= 0.98 * best]
    assert {c.solution for c in band} == {(1, 0, 0, 0, 0), (0, 0, 0, 0, 1), (1, 1, 1, 1, 1)}
    cheapest = min(band, key=lambda c: (estimate_cost(c.locked).total, c.solution))
    sel = select(cands, 0.02)
    assert sel.band_size == 3
    assert sel.solution == cheapest.solution
    assert sel.H == cheapest.H


def test_selection_epsilon_zero_keeps_only_the_best():
    _, cands = _candidates()
    sel = select(cands, 0.0)
    assert sel.solution == (1, 1, 1, 1, 1) and sel.band_size == 1


def test_selection_ties_prefer_fewer_bits_then_smaller_vector():
    prog = parse("int top(int a, int b) { return (a + b) - (a + b); }")
    points = find_points(prog)
    key = LockingKey((0, 0))
    cands = [((0, 1, 0), 0.5), ((1, 0, 0), 0.5)]
    cands = [Candidate(s, h, apply_locking(prog, points, s, key)) for s, h in cands]
    assert estimate_cost(cands[0].locked).total == estimate_cost(cands[1].locked).total
    assert select(cands).solution == (0, 1, 0)


def test_selection_errors():
    with pytest.raises(ValueError):
        select([])
    _, cands = _candidates()
    with pytest.raises(ValueError):
        select(cands, 1.5)
