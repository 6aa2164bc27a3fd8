"""Obfuscation points, solution vectors, and key-bit budgets."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .minic.ast import (
    Binary, FunctionDef, If, IntLit, LockedCond, LockedConst, LockedOp,
    Program, Ternary, walk,
)

CONST_BITS = 32

# Fake operations offered for each lockable operator.  Division and modulo
# are neither locked nor used as fakes.
FAKE_OPS: dict[str, tuple[str, ...]] = {
    "+": ("-", "*"),
    "-": ("+", "*"),
    "*": ("+", "-"),
    "^": ("&", "|"),
    "&": ("|", "^"),
    "|": ("&", "^"),
    "<<": (">>",),
    ">>": ("<<",),
    "<": (">=",),
    ">=": ("<",),
    ">": ("<=",),
    "<=": (">",),
    "==": ("!=",),
    "!=": ("==",),
}


class PointKind(str, enum.Enum):
    CONSTANT = "Constant"
    OPERATION = "Operation"
    BRANCH = "Branch"


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class ObfuscationPoint:
    point_id: int
    kind: PointKind
    node_id: int
    alternatives: int
    key_cost: int
    function: str = ""
    forced: bool = False
    op: Optional[str] = None

    @property
    def fakes(self) -> tuple[str, ...]:
        return FAKE_OPS.get(self.op, ()) if self.kind is PointKind.OPERATION else ()

    @property
    def low(self) -> int:
        """Smallest admissible solution entry."""
        return 1 if self.forced else 0


@dataclass(frozen=True)
class Constraints:
    excluded_functions: tuple[str, ...] = ()
    forced_points: tuple[int, ...] = ()
    key_length: Optional[int] = None


def find_points(
    program: Program,
    constraints: Optional[Constraints] = None,
    const_bits: int = CONST_BITS,
) -> list[ObfuscationPoint]:
    """Lockable sites of ``program`` in depth-first (preorder) AST order.

    Integer literals become Constant points, operators with a fake-op set
    become Operation points, and ``if``/ternary conditions become Branch
    points (the condition node is never also an Operation or Constant).
    Loop conditions are not branches.
    """
    constraints = constraints or Constraints()
    if any(isinstance(n, (LockedConst, LockedOp, LockedCond)) for n in walk(program)):
        raise ConstraintError("program is already locked")
    unknown = set(constraints.excluded_functions) - {f.name for f in program.functions}
    if unknown:
        raise ConstraintError(f"excluded function(s) not found: {', '.join(sorted(unknown))}")

    points: list[ObfuscationPoint] = []
    for fn in program.functions:
        if fn.name in constraints.excluded_functions:
            continue
        points.extend(_function_points(fn, len(points), const_bits))

    forced = set(constraints.forced_points)
    bad = [i for i in forced if not 0 <= i < len(points)]
    if bad:
        raise ConstraintError(f"forced point id(s) out of range: {sorted(bad)}")
    points = [
        ObfuscationPoint(p.point_id, p.kind, p.node_id, p.alternatives, p.key_cost,
                         p.function, p.point_id in forced, p.op)
        for p in points
    ]
    if constraints.key_length is not None:
        need = sum(p.key_cost for p in points if p.forced)
        if need > constraints.key_length:
            raise ConstraintError(
                f"forced points need {need} key bits, key has {constraints.key_length}"
            )
    return points


def _function_points(fn: FunctionDef, start: int, const_bits: int) -> list[ObfuscationPoint]:
    conds = set()
    for node in walk(fn.body):
        if isinstance(node, (If, Ternary)):
            conds.add(id(node.cond))
    points = []
    for node in walk(fn.body):
        pid = start + len(points)
        if id(node) in conds:
            points.append(ObfuscationPoint(pid, PointKind.BRANCH, node.node_id, 1, 1, fn.name))
        elif isinstance(node, Binary) and node.op in FAKE_OPS:
            points.append(ObfuscationPoint(
                pid, PointKind.OPERATION, node.node_id, len(FAKE_OPS[node.op]), 1, fn.name,
                op=node.op,
            ))
        elif isinstance(node, IntLit):
            points.append(ObfuscationPoint(pid, PointKind.CONSTANT, node.node_id, 1, const_bits, fn.name))
    return points


def points_from_counts(
    branches: int,
    operations: int,
    constants: int,
    op_alternatives: int = 2,
    const_bits: int = CONST_BITS,
) -> list[ObfuscationPoint]:
    """Synthetic point list for a benchmark characterized only by its counts."""
    kinds = (
        [(PointKind.BRANCH, 1, 1)] * branches
        + [(PointKind.OPERATION, op_alternatives, 1)] * operations
        + [(PointKind.CONSTANT, 1, const_bits)] * constants
    )
    return [ObfuscationPoint(i, k, -1, alt, cost) for i, (k, alt, cost) in enumerate(kinds)]


def validate_solution(solution: Sequence[int], points: Sequence[ObfuscationPoint]) -> None:
    if len(solution) != len(points):
        raise ConstraintError(f"solution has {len(solution)} entries, expected {len(points)}")
    for value, p in zip(solution, points):
        if not p.low <= value <= p.alternatives:
            raise ConstraintError(
                f"entry {value} for point {p.point_id} outside [{p.low}, {p.alternatives}]"
            )


def key_bits(solution: Sequence[int], points: Sequence[ObfuscationPoint]) -> int:
    """Key bits a solution consumes: each nonzero entry costs its point's key_cost."""
    if len(solution) != len(points):
        raise ConstraintError(f"solution has {len(solution)} entries, expected {len(points)}")
    return sum(p.key_cost for v, p in zip(solution, points) if v)


def full_budget(points: Sequence[ObfuscationPoint]) -> int:
    return sum(p.key_cost for p in points)


def space_size(points: Iterable[ObfuscationPoint]) -> int:
    return math.prod(p.alternatives if p.forced else p.alternatives + 1 for p in points)


def is_feasible(solution: Sequence[int], points: Sequence[ObfuscationPoint], key_length: int) -> bool:
    return key_bits(solution, points) <= key_length


def all_ones(points: Sequence[ObfuscationPoint]) -> tuple[int, ...]:
    return tuple(1 for _ in points)


def zero_solution(points: Sequence[ObfuscationPoint]) -> tuple[int, ...]:
    return tuple(p.low for p in points)


@dataclass(frozen=True)
class PointSummary:
    branches: int
    operations: int
    constants: int
    full_bits: int
    space: int = field(repr=False, default=0)

    def row(self) -> str:
        return (
            f"{self.branches} ctrl, {self.operations} op, "
            f"{self.constants} const, {self.full_bits} bits"
        )


def summarize(points: Sequence[ObfuscationPoint]) -> PointSummary:
    count = lambda k: sum(1 for p in points if p.kind is k)  # noqa: E731
    return PointSummary(
        count(PointKind.BRANCH), count(PointKind.OPERATION), count(PointKind.CONSTANT),
        key_bits(all_ones(points), points), space_size(points),
    )
