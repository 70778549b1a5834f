"""Packaged group fixtures: permutation-generator specs for named test groups.

Regenerated by scripts/build_fixtures.py; each file is a full group spec
(kind "perm") with a comment recording the construction.
"""

from __future__ import annotations

import json
from importlib import resources


def fixture_names() -> list[str]:
    names = []
    for entry in resources.files(__package__).iterdir():
        if entry.name.endswith(".json") and entry.name != "index.json":
            names.append(entry.name[:-5])
    return sorted(names)


def load_fixture(name: str) -> dict:
    path = resources.files(__package__) / f"{name}.json"
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise KeyError(f"no fixture named {name!r}; available: {fixture_names()}") from None
    return json.loads(text)


def order81_index() -> dict[str, list[str]]:
    """Fixture names for the order-81 corpus, split by 3-centrality."""
    text = (resources.files(__package__) / "index.json").read_text()
    return json.loads(text)
