"""Bundled regression problems with known global behavior.

Each .cqr file in this directory is a self-describing problem document (see
probfile); the comment line states the expected verdict so the files double
as human-readable documentation.  bundled() maps id -> filesystem path.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

__all__ = ["bundled", "bundled_path"]


def bundled() -> dict[str, Path]:
    root = resources.files(__name__)
    out: dict[str, Path] = {}
    for entry in root.iterdir():
        if entry.name.endswith(".cqr"):
            out[entry.name[: -len(".cqr")]] = Path(str(entry))
    return dict(sorted(out.items()))


def bundled_path(name: str) -> Path:
    paths = bundled()
    if name not in paths:
        known = ", ".join(paths)
        raise KeyError(f"no bundled problem {name!r} (have: {known})")
    return paths[name]
