"""Deterministic experiment artifacts.

CSV files carry floats at 17 significant digits (round-trip exact for
IEEE doubles), the manifest lists every artifact with its SHA-256, and
nothing written here contains timestamps or machine state, so reruns of
identical configs produce byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger("aniso")

_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def setup_logging(env: str | None = None) -> None:
    name = (env if env is not None else os.environ.get("ANISO_LOG", "info")).lower()
    if name not in _LEVELS:
        raise ValueError(f"ANISO_LOG must be one of {sorted(_LEVELS)}, got {name!r}")
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(_LEVELS[name])


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def write_manifest(out_dir: Path) -> Path:
    """Hash every artifact in the directory (the manifest lists itself
    by name only)."""
    files = sorted(p.name for p in out_dir.iterdir()
                   if p.is_file() and p.name != "manifest.json")
    manifest = {"files": {name: sha256_of(out_dir / name) for name in files}}
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path
