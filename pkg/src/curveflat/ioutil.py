"""Small I/O and formatting helpers used by the CLI and serializers."""

from __future__ import annotations

import math
import os
from pathlib import Path


def round_half_up(x: float) -> int:
    """Round to the nearest integer, halves away from zero for positives."""
    return math.floor(x + 0.5)


def fmt6(x: float) -> str:
    """Format a float with 6 significant digits (count columns stay integers)."""
    return f"{x:.6g}"


def atomic_write_text(path: str | os.PathLike, text: str) -> Path:
    """Write `text` to `path` via a temp file + rename so readers never see
    a partially written file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path
