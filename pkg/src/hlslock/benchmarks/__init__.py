"""Bundled MiniC benchmarks and published key-budget descriptors.

``bubblesort``, ``arf`` and ``patricia`` reproduce the published point counts;
``cancel`` is a crafted instance where locking every point is worse than
locking one; the ``toy*`` programs are small enough to enumerate.
"""
from __future__ import annotations

import json
from importlib import resources

from ..lockpoints import ObfuscationPoint, points_from_counts

BENCHMARKS = ("bubblesort", "arf", "patricia", "cancel", "toy", "toy_sel", "toy_mix")

# Functions kept out of locking for each benchmark.
EXCLUDED = {"cancel": ("same",)}


def source(name: str) -> str:
    if name not in BENCHMARKS:
        raise KeyError(f"unknown benchmark '{name}'")
    return resources.files(__name__).joinpath(f"{name}.c").read_text()


def path(name: str):
    source(name)
    return resources.files(__name__).joinpath(f"{name}.c")


def table1() -> dict[str, dict[str, int]]:
    """Published (ctrl, op, const, bits) rows; ``crc`` is left out as inconsistent."""
    return json.loads(resources.files(__name__).joinpath("table1.json").read_text())


def descriptor_points(name: str) -> list[ObfuscationPoint]:
    row = table1()[name]
    return points_from_counts(row["ctrl"], row["op"], row["const"])
