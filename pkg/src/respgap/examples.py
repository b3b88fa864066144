"""Bundled example mechanisms."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .errors import UnknownExample
from .mechanism import Mechanism
from .text import parse
from .mechanism import validate

NAMES = (
    "two-person-rule",
    "senate",
    "academic",
    "confusion",
    "drawing-straws",
    "mechanism-M",
    "mechanism-N",
)


def example_text(name: str) -> str:
    if name not in NAMES:
        raise UnknownExample(f"unknown example {name!r}; choose from {', '.join(NAMES)}")
    return resources.files(__package__).joinpath("catalog", f"{name}.mech").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def example(name: str) -> Mechanism:
    return validate(parse(example_text(name)))


def describe(name: str) -> str:
    """The leading comment block of the example's source."""
    lines = []
    for line in example_text(name).splitlines():
        if not line.startswith("#"):
            break
        lines.append(line.lstrip("# ").rstrip())
    return " ".join(lines)


def catalog() -> dict[str, Mechanism]:
    return {name: example(name) for name in NAMES}
