import copy
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlslock import benchmarks
from hlslock.locker import (
    LockingError, LockingKey, add_key_plumbing, allocate_bits, apply_locking, lock_point,
)
from hlslock.lockpoints import (
    ObfuscationPoint, PointKind, find_points, key_bits, points_from_counts,
)
from hlslock.minic import emit_source, parse, same_shape
from hlslock.minic.ast import LockedCond, LockedConst, LockedOp, number_nodes, walk
from hlslock.simulator import golden, random_tests, run


def locked_nodes(program, cls):
    return [n for n in walk(program) if isinstance(n, cls)]


def test_constant_xor_involution():
    prog = parse("int top(void) { return 5; }")
    points = find_points(prog)
    key = LockingKey.from_int(3, 32)
    locked = apply_locking(prog, points, (1,), key)
    (node,) = locked_nodes(locked.ast, LockedConst)
    assert node.stored == 6
    assert run(locked.ast, {}, key).value == 5
    assert run(locked.ast, {}, LockingKey.from_int(0, 32)).value == 6


def test_operation_select_arms():
    prog = parse("int top(void) { return 7 + 3; }")
    points = find_points(prog)
    assert points[0].op == "+"
    locked = apply_locking(prog, points, (1, 0, 0), LockingKey((1,)))
    (node,) = locked_nodes(locked.ast, LockedOp)
    assert (node.op_one, node.op_zero) == ("+", "-")
    assert run(locked.ast, {}, LockingKey((1,))).value == 10
    assert run(locked.ast, {}, LockingKey((0,))).value == 4


def test_operation_second_variant():
    prog = parse("int top(void) { return 7 + 3; }")
    locked = apply_locking(prog, find_points(prog), (2, 0, 0), LockingKey((0,)))
    assert run(locked.ast, {}, LockingKey((0,))).value == 10
    assert run(locked.ast, {}, LockingKey((1,))).value == 21


@pytest.mark.parametrize("correct", [0, 1])
def test_branch_polarity_exhaustive(correct):
    prog = parse("int top(int x) { if (x < 10) return 1; return 0; }")
    points = find_points(prog)
    assert points[0].kind is PointKind.BRANCH
    sol = tuple(1 if i == 0 else 0 for i in range(len(points)))
    key = LockingKey((correct,))
    locked = apply_locking(prog, points, sol, key)
    (node,) = locked_nodes(locked.ast, LockedCond)
    assert node.invert == bool(correct)
    wrong = LockingKey((1 - correct,))
    for x in range(21):
        expected = int(x < 10)
        assert run(locked.ast, {"x": x}, key).value == expected
        assert run(locked.ast, {"x": x}, wrong).value == 1 - expected


def test_allocate_bits_examples():
    pts = [
        ObfuscationPoint(0, PointKind.CONSTANT, -1, 1, 32),
        ObfuscationPoint(1, PointKind.OPERATION, -1, 2, 1),
        ObfuscationPoint(2, PointKind.OPERATION, -1, 2, 1),
    ]
    assert allocate_bits(pts, (1, 0, 2)) == {0: (0, 32), 2: (32, 1)}
    assert allocate_bits(pts, (0, 0, 0)) == {}


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_allocation_matches_key_budget(data):
    pts = points_from_counts(*data.draw(st.tuples(*[st.integers(0, 5)] * 3)))
    sol = [data.draw(st.integers(0, p.alternatives)) for p in pts]
    alloc = allocate_bits(pts, sol)
    assert sum(n for _, n in alloc.values()) == key_bits(sol, pts)
    offset = 0
    for pid in sorted(alloc):
        assert alloc[pid][0] == offset
        offset += alloc[pid][1]


def test_errors():
    prog = parse(benchmarks.source("toy"))
    points = find_points(prog)
    with pytest.raises(LockingError):
        apply_locking(prog, points, (1,) * len(points), LockingKey((0,) * 10))
    with pytest.raises(LockingError):
        apply_locking(prog, points, (3,) + (0,) * (len(points) - 1), LockingKey((0,) * 80))
    with pytest.raises(LockingError):
        apply_locking(prog, points, (1,), LockingKey((0,) * 80))


def test_original_program_untouched():
    prog = parse(benchmarks.source("patricia"))
    before = emit_source(prog)
    apply_locking(prog, find_points(prog), (1,) * 14, LockingKey.random(107, 0))
    assert emit_source(prog) == before


def _random_case(rng, points, full):
    sol = tuple(rng.randint(p.low, p.alternatives) for p in points)
    length = key_bits(sol, points) + rng.randint(0, 4)
    return sol, LockingKey.random(length, rng.randint(0, 10**6))


@pytest.mark.parametrize("name", benchmarks.BENCHMARKS)
def test_correct_key_fidelity(name):
    prog = parse(benchmarks.source(name))
    points = find_points(prog)
    tests = random_tests(prog, 10, 1)
    gold = golden(prog, tests)
    rng = random.Random(name)
    for _ in range(10):
        sol, key = _random_case(rng, points, None)
        locked = apply_locking(prog, points, sol, key)
        reparsed = parse(emit_source(locked.ast))
        assert same_shape(reparsed, locked.ast)
        for t, g in zip(tests, gold):
            assert run(reparsed, t, key) == g


def test_single_bit_sensitivity():
    # operation: both arms differ for some 8-bit operands
    for op in ["+", "-", "*", "^", "&", "|", "<<", ">>", "<", ">=", ">", "<=", "==", "!="]:
        prog = parse(f"unsigned char top(unsigned char a, unsigned char b) {{ return a {op} (b & 7); }}")
        points = find_points(prog)
        for variant in range(1, points[0].alternatives + 1):
            sol = (variant,) + (0,) * (len(points) - 1)
            locked = apply_locking(prog, points, sol, LockingKey((1,)))
            assert any(
                run(locked.ast, {"a": a, "b": b}, LockingKey((1,))).value
                != run(locked.ast, {"a": a, "b": b}, LockingKey((0,))).value
                for a in range(256) for b in range(8)
            ), (op, variant)
    # constant: every one of the 32 bits matters
    prog = parse("int top(void) { return 200; }")
    key = LockingKey.random(32, 5)
    locked = apply_locking(prog, find_points(prog), (1,), key)
    base = run(locked.ast, {}, key).value
    for i in range(32):
        bits = list(key.bits)
        bits[i] ^= 1
        assert run(locked.ast, {}, LockingKey(tuple(bits))).value != base
    # branch: flipping its bit changes the decision for every input
    prog = parse("unsigned char top(unsigned char x) { return x < 100 ? 1 : 2; }")
    locked = apply_locking(prog, find_points(prog), (1, 0, 0, 0), LockingKey((0,)))
    assert all(
        run(locked.ast, {"x": x}, LockingKey((0,))).value != run(locked.ast, {"x": x}, LockingKey((1,))).value
        for x in range(256)
    )


@pytest.mark.parametrize("name", ["toy", "patricia", "toy_mix"])
def test_transforms_commute(name):
    prog = parse(benchmarks.source(name))
    points = find_points(prog)
    sol = tuple(p.alternatives for p in points)
    key = LockingKey.random(key_bits(sol, points), 11)
    reference = apply_locking(prog, points, sol, key).ast
    alloc = allocate_bits(points, sol)
    rng = random.Random(0)
    for _ in range(5):
        order = list(points)
        rng.shuffle(order)
        work = copy.deepcopy(prog)
        for p in order:
            lock_point(work, p, sol[p.point_id], alloc[p.point_id][0], key)
        add_key_plumbing(work)
        number_nodes(work)
        assert same_shape(work, reference)


def test_purity_under_unallocated_bits():
    prog = parse(benchmarks.source("toy_mix"))
    points = find_points(prog)
    sol = (1, 0, 1, 0, 2)
    key = LockingKey.random(12, 3)
    locked = apply_locking(prog, points, sol, key)
    used = {off + j for off, n in locked.alloc.values() for j in range(n)}
    tests = random_tests(prog, 20, 2)
    for free_bits in itertools.product((0, 1), repeat=2):
        bits = list(key.bits)
        for i, b in zip([i for i in range(12) if i not in used][:2], free_bits):
            bits[i] = b
        other = LockingKey(tuple(bits))
        for t in tests:
            assert run(locked.ast, t, other) == run(locked.ast, t, key)
