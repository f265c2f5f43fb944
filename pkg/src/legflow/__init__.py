"""Planner-guided layer-execution-graph runtime and evaluation harness."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def data_path(*parts: str) -> Path:
    """Path to a bundled data file."""
    root = resources.files(__name__) / "data"
    return Path(str(root.joinpath(*parts)))
