"""Bundled triangulation fixtures, addressable as corpus:<name>.

The environment variable TYINV_CORPUS_DIR overrides the bundled directory.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from ..triangulation import Triangulation

__all__ = ["list_names", "load", "corpus_dir"]


def corpus_dir() -> Path | None:
    override = os.environ.get("TYINV_CORPUS_DIR")
    return Path(override) if override else None


def list_names() -> list[str]:
    override = corpus_dir()
    if override is not None:
        return sorted(p.stem for p in override.glob("*.json"))
    pkg = resources.files(__name__)
    return sorted(
        p.name[: -len(".json")]
        for p in pkg.iterdir()
        if p.name.endswith(".json")
    )


def load(name: str) -> Triangulation:
    override = corpus_dir()
    if override is not None:
        path = override / f"{name}.json"
        if not path.exists():
            raise FileNotFoundError(f"no corpus fixture {name!r} in {override}")
        with open(path, "r", encoding="utf-8") as fh:
            return Triangulation.from_json(json.load(fh))
    pkg = resources.files(__name__)
    candidate = pkg / f"{name}.json"
    if not candidate.is_file():
        raise FileNotFoundError(
            f"no corpus fixture {name!r}; available: {', '.join(list_names())}"
        )
    return Triangulation.from_json(json.loads(candidate.read_text()))
