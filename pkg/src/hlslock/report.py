"""Run-report schema validation."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema


@lru_cache(maxsize=None)
def report_schema() -> dict:
    text = resources.files("hlslock.schemas").joinpath("report.schema.json").read_text()
    return json.loads(text)


def validate_report(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``report`` breaks the shipped schema."""
    jsonschema.validate(report, report_schema())
