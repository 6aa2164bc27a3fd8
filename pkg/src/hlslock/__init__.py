"""Optimized behavioral logic locking for a C subset.

The pipeline finds lockable points in a MiniC program, searches for the
subset whose locking maximizes output corruption under wrong keys, and
picks the cheapest near-best solution under a static cost model.
"""
__version__ = "0.1.0"

from .costsel import CostEstimate, CostModel, estimate_cost, select  # noqa: E402
from .entropy import (  # noqa: E402
    EntropyReport, WrongKeySet, differential_entropy, flip_probabilities,
    make_wrong_keys,
)
from .explore import DseConfig, DseTrace, ga_explore, random_search, tao_baseline  # noqa: E402
from .locker import LockedProgram, LockingKey, allocate_bits, apply_locking  # noqa: E402
from .lockpoints import (  # noqa: E402
    Constraints, ObfuscationPoint, PointKind, find_points, is_feasible, key_bits,
    space_size,
)
from .minic import emit_source, parse  # noqa: E402
from .simulator import OutputBits, Status, golden, run  # noqa: E402

__all__ = [
    "Constraints", "CostEstimate", "CostModel", "DseConfig", "DseTrace", "EntropyReport",
    "LockedProgram", "LockingKey", "ObfuscationPoint", "OutputBits", "PointKind", "Status",
    "WrongKeySet", "allocate_bits", "apply_locking", "differential_entropy", "emit_source",
    "estimate_cost", "find_points", "flip_probabilities", "ga_explore", "golden",
    "is_feasible", "key_bits", "make_wrong_keys", "parse", "random_search", "run",
    "select", "space_size", "tao_baseline",
]
