"""Source-level locking transforms and key-bit allocation."""
from __future__ import annotations

import copy
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from .lockpoints import (
    FAKE_OPS, ConstraintError, ObfuscationPoint, PointKind, key_bits,
    validate_solution,
)
from .minic.ast import (
    KEY_NAME, UCHAR, Binary, Call, IntLit, LockedCond, LockedConst, LockedOp,
    Node, Param, Program, Var, number_nodes, walk,
)
from .minic.idioms import CONST_KEY_BITS


class LockingError(ValueError):
    pass


@dataclass(frozen=True)
class LockingKey:
    """Bit string; ``bits[i]`` is the value of ``KEY[i]``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("key bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def length(self) -> int:
        return len(self.bits)

    @classmethod
    def from_int(cls, value: int, length: int) -> "LockingKey":
        if value < 0 or value >> length:
            raise ValueError(f"key value does not fit in {length} bits")
        return cls(tuple((value >> i) & 1 for i in range(length)))

    @classmethod
    def from_hex(cls, text: str, length: Optional[int] = None) -> "LockingKey":
        """Hex digits of an integer whose bit ``i`` is ``KEY[i]``."""
        digits = text.lower().removeprefix("0x")
        value = int(digits, 16) if digits else 0
        return cls.from_int(value, length if length is not None else 4 * len(digits))

    @classmethod
    def random(cls, length: int, seed: int) -> "LockingKey":
        rng = np.random.default_rng(seed)
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=length)))

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def to_hex(self) -> str:
        return format(self.to_int(), "x").zfill(max(1, (self.length + 3) // 4))

    def segment(self, offset: int, length: int) -> int:
        return sum(self.bits[offset + j] << j for j in range(length))


@dataclass
class LockedProgram:
    ast: Program
    alloc: dict[int, tuple[int, int]]
    correct_key: LockingKey
    solution: tuple[int, ...]


def allocate_bits(points: Sequence[ObfuscationPoint], solution: Sequence[int]) -> dict[int, tuple[int, int]]:
    """Pack active points' key slices in ascending point order from offset 0."""
    alloc = {}
    offset = 0
    for p, v in zip(points, solution):
        if v:
            alloc[p.point_id] = (offset, p.key_cost)
            offset += p.key_cost
    return alloc


def _replace(root: Node, node_id: int, make) -> bool:
    """Replace the (unique) node with ``node_id`` below ``root`` by ``make(node)``."""
    for parent in walk(root):
        for f in fields(parent):
            if f.name in ("node_id", "span"):
                continue
            value = getattr(parent, f.name)
            if isinstance(value, Node) and value.node_id == node_id:
                setattr(parent, f.name, make(value))
                return True
            if isinstance(value, list):
                for i, item in enumerate(value):
                    if isinstance(item, Node) and item.node_id == node_id:
                        value[i] = make(item)
                        return True
    return False


def lock_point(
    program: Program,
    point: ObfuscationPoint,
    variant: int,
    offset: int,
    key: LockingKey,
) -> None:
    """Apply one point's transform in place, addressing the node by its original id."""

    def make(node):
        if point.kind is PointKind.CONSTANT:
            if not isinstance(node, IntLit):
                raise LockingError(f"point {point.point_id} is not a literal")
            stored = (node.value & 0xFFFFFFFF) ^ key.segment(offset, CONST_KEY_BITS)
            return LockedConst(stored, offset, node.unsigned, node_id=node.node_id, span=node.span)
        bit = key.bits[offset]
        if point.kind is PointKind.OPERATION:
            if not isinstance(node, Binary) or node.op not in FAKE_OPS:
                raise LockingError(f"point {point.point_id} is not a lockable operation")
            fake = FAKE_OPS[node.op][variant - 1]
            one, zero = (node.op, fake) if bit else (fake, node.op)
            return LockedOp(offset, one, zero, node.left, node.right, node_id=node.node_id, span=node.span)
        return LockedCond(node, bool(bit), offset, node_id=node.node_id, span=node.span)

    if not _replace(program, point.node_id, make):
        raise LockingError(f"node {point.node_id} of point {point.point_id} not found")


def add_key_plumbing(program: Program) -> None:
    """Give every function a trailing ``const unsigned char KEY[]`` and pass it on calls."""
    for fn in program.functions:
        if any(p.name == KEY_NAME for p in fn.params):
            raise LockingError(f"function '{fn.name}' already has a {KEY_NAME} parameter")
        fn.params.append(Param(KEY_NAME, UCHAR, 0, const=True))
    for node in walk(program):
        if isinstance(node, Call):
            node.args.append(Var(KEY_NAME))


def apply_locking(
    program: Program,
    points: Sequence[ObfuscationPoint],
    solution: Sequence[int],
    key: LockingKey,
) -> LockedProgram:
    """Rewrite a copy of ``program`` with every active point locked."""
    solution = tuple(int(v) for v in solution)
    try:
        validate_solution(solution, points)
    except ConstraintError as exc:
        raise LockingError(str(exc)) from exc
    need = key_bits(solution, points)
    if need > len(key):
        raise LockingError(f"solution needs {need} key bits, key has {len(key)}")
    alloc = allocate_bits(points, solution)
    locked = copy.deepcopy(program)
    if any(p.name == KEY_NAME for p in locked.top.params):
        raise LockingError("program is already locked")
    for p, v in zip(points, solution):
        if v:
            lock_point(locked, p, v, alloc[p.point_id][0], key)
    add_key_plumbing(locked)
    number_nodes(locked)
    return LockedProgram(locked, alloc, key, solution)
