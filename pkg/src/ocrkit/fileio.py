"""Small filesystem helpers shared across modules."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path


def atomic_write_text(path: Path, data: str) -> None:
    """Write ``data`` to ``path`` via a temp file and rename.

    Readers never observe a half-written file; an existing file is replaced
    in one step.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        dir=path.parent, prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise


def read_ingested_text(path: Path) -> str:
    """Read UTF-8 text with carriage returns converted to newlines."""
    raw = Path(path).read_text(encoding="utf-8")
    return raw.replace("\r\n", "\n").replace("\r", "\n")
