"""Process-level settings read from the environment (and an optional ``.env``)."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

# Honour a .env in the working tree the same way the database layer does.
load_dotenv()

ROOT_DIR = Path(__file__).resolve().parents[1]


@dataclass(frozen=True)
class Settings:
    """Environment-derived defaults for the CLI and library entry points.

    Attributes
    ----------
    config_path : Optional[str]
        Run-config file used when ``--config`` is omitted (``DTCSIM_CONFIG``).
    db_url : str
        Results database URL (``DTCSIM_DB_URL``).
    log_level : str
        Root log level applied by the CLI (``DTCSIM_LOG_LEVEL``).
    threads : int
        Default worker cap (``DTCSIM_THREADS``).
    runlog_path : str
        Calibration run-log file (``DTCSIM_RUNLOG``).
    """

    config_path: Optional[str]
    db_url: str
    log_level: str
    threads: int
    runlog_path: str


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"Environment variable '{name}' must be an integer") from exc
    if value < 1:
        raise ValueError(f"Environment variable '{name}' must be >= 1")
    return value


def get_settings() -> Settings:
    """Read the current environment into a :class:`Settings` instance."""
    return Settings(
        config_path=os.getenv("DTCSIM_CONFIG") or None,
        db_url=os.getenv("DTCSIM_DB_URL", "sqlite:///./dtcsim.db"),
        log_level=os.getenv("DTCSIM_LOG_LEVEL", "INFO").upper(),
        threads=_int_env("DTCSIM_THREADS", os.cpu_count() or 1),
        runlog_path=os.getenv("DTCSIM_RUNLOG", "runlog.jsonl"),
    )


__all__ = ["ROOT_DIR", "Settings", "get_settings"]
