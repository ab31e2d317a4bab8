"""CSV tables with a provenance header line."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

import pandas as pd

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

HASH_PREFIX = "# config_hash="
FLOAT_FORMAT = "%.12g"


def write_table(frame: pd.DataFrame, path: PathLike, config_hash: Optional[str] = None) -> Path:
    """Write ``frame`` as CSV, preceded by ``# config_hash=<hash>`` when given.

    Floats use a fixed format so identical inputs give byte-identical files.
    """
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="") as fh:
        if config_hash is not None:
            fh.write(f"{HASH_PREFIX}{config_hash}\n")
        frame.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {out}")
    return out


def read_table(path: PathLike) -> tuple[pd.DataFrame, Optional[str]]:
    """Read a table written by :func:`write_table`; returns ``(frame, config_hash)``."""
    in_path = Path(path)
    config_hash = None
    with in_path.open("r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith(HASH_PREFIX):
        config_hash = first[len(HASH_PREFIX):].strip()
    return pd.read_csv(in_path, comment="#"), config_hash


__all__ = ["read_table", "write_table"]
