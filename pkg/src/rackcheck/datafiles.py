"""Locate packaged data files (schemas, hazard tables, prompts, fixtures)."""

from importlib import resources
from pathlib import Path


def data_root() -> Path:
    """Filesystem path of the packaged data directory."""
    return Path(str(resources.files("rackcheck").joinpath("data")))


def data_path(*parts: str) -> Path:
    return data_root().joinpath(*parts)
