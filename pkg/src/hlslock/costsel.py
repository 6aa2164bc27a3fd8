"""Static resource-cost model and final selection among near-best solutions."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .lockpoints import CONST_BITS
from .minic.ast import (
    Assign, Binary, IncDec, LockedCond, LockedConst, LockedOp, Node, Ternary,
    Unary, walk,
)

CATEGORIES = (
    "add", "mul", "div", "bitwise", "shift", "compare", "logic", "select",
    "key_xor", "key_reg",
)

# Rough FPGA-flavoured area units for 32-bit datapaths: multipliers and
# dividers dominate, adders sit in the middle, bitwise logic is cheap.
DEFAULT_UNITS: dict[str, float] = {
    "add": 32.0,
    "mul": 250.0,
    "div": 1000.0,
    "bitwise": 16.0,
    "shift": 48.0,
    "compare": 20.0,
    "logic": 2.0,
    "select": 32.0,
    "key_xor": 1.0,
    "key_reg": 1.0,
}

OP_CATEGORY: dict[str, str] = {
    "+": "add", "-": "add",
    "*": "mul",
    "/": "div", "%": "div",
    "&": "bitwise", "|": "bitwise", "^": "bitwise", "~": "bitwise",
    "<<": "shift", ">>": "shift",
    "<": "compare", "<=": "compare", ">": "compare", ">=": "compare",
    "==": "compare", "!=": "compare",
    "&&": "logic", "||": "logic", "!": "logic",
}


class CostModelError(ValueError):
    pass


@dataclass(frozen=True)
class CostModel:
    units: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_UNITS))

    def __post_init__(self):
        missing = [c for c in CATEGORIES if c not in self.units]
        if missing:
            raise CostModelError(f"cost model lacks categories: {', '.join(missing)}")
        unknown = sorted(set(self.units) - set(CATEGORIES))
        if unknown:
            raise CostModelError(f"unknown cost categories: {', '.join(unknown)}")
        bad = [c for c, v in self.units.items() if not isinstance(v, (int, float)) or v < 0]
        if bad:
            raise CostModelError(f"cost entries must be non-negative numbers: {', '.join(bad)}")

    def __getitem__(self, category: str) -> float:
        return self.units[category]

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "CostModel":
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict):
            raise CostModelError(f"{path}: expected a JSON object")
        return cls({k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict[str, float]:
        return {c: float(self.units[c]) for c in CATEGORIES}


@dataclass(frozen=True)
class CostEstimate:
    total: float
    breakdown: dict[str, float]
    key_bits: int

    def to_dict(self) -> dict:
        return {"total": self.total, "breakdown": dict(self.breakdown), "key_bits": self.key_bits}


def _counts(root: Node) -> tuple[Counter, int]:
    counts: Counter = Counter()
    bits = 0
    for node in walk(root):
        if isinstance(node, Binary):
            counts[OP_CATEGORY[node.op]] += 1
        elif isinstance(node, Unary) and node.op in OP_CATEGORY:
            counts[OP_CATEGORY[node.op]] += 1
        elif isinstance(node, Ternary):
            counts["select"] += 1
        elif isinstance(node, Assign) and node.op != "=":
            counts[OP_CATEGORY[node.op[:-1]]] += 1
        elif isinstance(node, IncDec):
            counts["add"] += 1
        elif isinstance(node, LockedOp):
            counts[OP_CATEGORY[node.op_one]] += 1
            counts[OP_CATEGORY[node.op_zero]] += 1
            counts["select"] += 1
            counts["key_reg"] += 1
            bits += 1
        elif isinstance(node, LockedConst):
            counts["key_xor"] += CONST_BITS
            counts["key_reg"] += CONST_BITS
            bits += CONST_BITS
        elif isinstance(node, LockedCond):
            counts["key_xor"] += 1
            counts["key_reg"] += 1
            bits += 1
    return counts, bits


def estimate_cost(program, model: Optional[CostModel] = None) -> CostEstimate:
    """Additive area estimate of a program or locked program.

    Locking overheads: a locked operation adds its fake operator, a 2-way
    select and one key register bit; a locked constant adds 32 key XORs and
    32 key register bits; a locked branch adds one XOR and one register bit.
    """
    model = model or CostModel()
    ast = getattr(program, "ast", program)
    counts, bits = _counts(ast)
    breakdown = {c: counts[c] * float(model[c]) for c in CATEGORIES if counts[c]}
    return CostEstimate(sum(breakdown.values()), breakdown, bits)


@dataclass(frozen=True)
class Candidate:
    solution: tuple[int, ...]
    H: float
    locked: object


@dataclass(frozen=True)
class Selection:
    solution: tuple[int, ...]
    H: float
    cost: CostEstimate
    band_size: int


def _as_candidate(c) -> Candidate:
    return c if isinstance(c, Candidate) else Candidate(tuple(c[0]), float(c[1]), c[2])


def select(
    candidates: Sequence,
    epsilon: float = 0.02,
    model: Optional[CostModel] = None,
) -> Selection:
    """Cheapest candidate whose entropy is within ``epsilon`` of the best.

    Ties go to fewer key bits, then fewer active points, then the
    lexicographically smallest solution vector.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    model = model or CostModel()
    cands = [_as_candidate(c) for c in candidates]
    best = max(c.H for c in cands)
    band = [c for c in cands if c.H >= (1.0 - epsilon) * best]
    scored = []
    for c in band:
        est = estimate_cost(c.locked, model)
        active = sum(1 for v in c.solution if v)
        scored.append(((est.total, est.key_bits, active, c.solution), c, est))
    _, chosen, est = min(scored, key=lambda item: item[0])
    return Selection(chosen.solution, chosen.H, est, len(band))
