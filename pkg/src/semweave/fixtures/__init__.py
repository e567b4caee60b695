"""Bundled fixture files: sample catalogs, queries, data files and specs."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def fixture_text(name: str) -> str:
    """Return the named fixture file as text."""
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def fixture_path(name: str) -> Path:
    """Filesystem path of a fixture; works for installed and editable layouts."""
    path = resources.files(__package__).joinpath(name)
    return Path(str(path))
