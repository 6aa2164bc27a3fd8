"""Output-corruption metric: per-bit flip probabilities and their mean binary entropy."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .locker import LockedProgram, LockingKey
from .simulator import (
    DEFAULT_STEP_BUDGET, InputVector, OutputBits, Status, compile_program,
    unpack_bits,
)


class EntropyError(ValueError):
    pass


@dataclass(frozen=True)
class WrongKeySet:
    keys: np.ndarray  # (W, key length) uint8
    seed: int

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self):
        return iter(self.keys)


@dataclass
class EntropyReport:
    p: np.ndarray
    H: float
    runs: int
    statuses: dict[str, int] = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.p)

    @property
    def NH(self) -> float:
        return self.N * self.H


def make_wrong_keys(correct: LockingKey, count: int, seed: int) -> WrongKeySet:
    """``count`` distinct random keys, each different from ``correct``."""
    length = len(correct)
    if count < 1:
        raise EntropyError("need at least one wrong key")
    if length < 64 and count > (1 << length) - 1:
        raise EntropyError(f"only {(1 << length) - 1} wrong keys exist for a {length}-bit key")
    rng = np.random.default_rng(seed)
    if length <= 20:
        # small key space: sample without replacement from the enumeration
        correct_value = correct.to_int()
        choice = rng.choice((1 << length) - 1, size=count, replace=False)
        values = [int(v) + (v >= correct_value) for v in choice]
        keys = np.array([[(v >> i) & 1 for i in range(length)] for v in values], dtype=np.uint8)
        return WrongKeySet(keys.reshape(count, length), seed)
    correct_bits = np.array(correct.bits, dtype=np.uint8)
    seen = {correct_bits.tobytes()}
    rows = []
    while len(rows) < count:
        candidate = rng.integers(0, 2, size=length, dtype=np.uint8)
        tag = candidate.tobytes()
        if tag not in seen:
            seen.add(tag)
            rows.append(candidate)
    return WrongKeySet(np.stack(rows), seed)


def exhaustive_wrong_keys(correct: LockingKey) -> WrongKeySet:
    """Every key of the same length except the correct one, in numeric order."""
    length = len(correct)
    if length > 20:
        raise EntropyError("key too long to enumerate")
    c = correct.to_int()
    keys = [[(v >> i) & 1 for i in range(length)] for v in range(1 << length) if v != c]
    return WrongKeySet(np.array(keys, dtype=np.uint8).reshape(len(keys), length), -1)


def flip_counts(
    locked: LockedProgram,
    tests: Sequence[InputVector],
    golden: Sequence[OutputBits],
    wrong_keys,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> tuple[np.ndarray, Counter]:
    """Integer count of output flips per bit, plus run status tallies."""
    if not len(tests):
        raise EntropyError("no test vectors")
    if len(tests) != len(golden):
        raise EntropyError("tests and golden outputs differ in length")
    if not len(wrong_keys):
        raise EntropyError("no wrong keys")
    exe = compile_program(locked.ast)
    width = exe.width
    args = [exe.prepare_inputs(t) for t in tests]
    gold = [g.value for g in golden]
    counts = np.zeros(width, dtype=np.int64)
    statuses: Counter = Counter()
    for key in wrong_keys:
        kctx = exe.prepare_key([int(b) for b in key])
        xors = []
        for a, g in zip(args, gold):
            value, status = exe.run_prepared(a, kctx, step_budget)
            if status is not Status.NORMAL:
                statuses[status.value] += 1
            xors.append(value ^ g)
        counts += unpack_bits(xors, width).sum(axis=0, dtype=np.int64)
    return counts, statuses


def flip_probabilities(
    locked: LockedProgram,
    tests: Sequence[InputVector],
    golden: Sequence[OutputBits],
    wrong_keys,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> np.ndarray:
    """Fraction of (test, wrong key) runs in which each output bit differs from golden."""
    counts, _ = flip_counts(locked, tests, golden, wrong_keys, step_budget)
    return counts / (len(tests) * len(wrong_keys))


def binary_entropy_deficit(p) -> np.ndarray:
    """``1 - h(p)`` computed stably around ``p = 0.5``; ``h`` is base-2 binary entropy."""
    p = np.asarray(p, dtype=np.float64)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise EntropyError("probabilities must lie in [0, 1]")
    d = 2.0 * p - 1.0
    out = np.ones_like(d)
    inner = np.abs(d) < 1.0
    di = d[inner]
    out[inner] = ((1 + di) * np.log1p(di) + (1 - di) * np.log1p(-di)) / (2 * np.log(2.0))
    return out


def binary_entropy(p) -> np.ndarray:
    return 1.0 - binary_entropy_deficit(p)


def differential_entropy(p) -> float:
    """Mean binary entropy of the flip probabilities, in [0, 1].

    Rounded toward zero so the result equals 1.0 only when every
    probability is exactly 0.5.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.size == 0:
        return 0.0
    deficit = float(np.mean(binary_entropy_deficit(p)))
    H = 1.0 - deficit
    if deficit > 0.0 and H >= 1.0:
        H = float(np.nextafter(1.0, 0.0))
    return max(H, 0.0)


def entropy_report(
    locked: LockedProgram,
    tests: Sequence[InputVector],
    golden: Sequence[OutputBits],
    wrong_keys,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> EntropyReport:
    counts, statuses = flip_counts(locked, tests, golden, wrong_keys, step_budget)
    runs = len(tests) * len(wrong_keys)
    p = counts / runs
    return EntropyReport(p, differential_entropy(p), runs, dict(sorted(statuses.items())))
