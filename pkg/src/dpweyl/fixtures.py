"""Bundled reference matrices."""

from __future__ import annotations

from importlib import resources

from .errors import DomainError
from .lattice import Isometry, parse_matrix

NAMES = ("w_d4_3a1", "w_d4_3a1_sq", "w_a7", "w_a7_4", "r", "r3")


def fixture_path(name: str):
    if name not in NAMES:
        raise DomainError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
    return resources.files("dpweyl") / "data" / "fixtures" / f"{name}.txt"


def load_fixture(name: str) -> Isometry:
    return parse_matrix(fixture_path(name).read_text())


SCHEMAS = ("enumerate", "classes", "classify", "verdict", "counts", "gsig", "report")


def load_schema(name: str) -> dict:
    """JSON schema for a CLI output record."""
    import json

    if name not in SCHEMAS:
        raise DomainError(f"unknown schema {name!r}")
    return json.loads((resources.files("dpweyl") / "data" / "schemas" / f"{name}.schema.json").read_text())
