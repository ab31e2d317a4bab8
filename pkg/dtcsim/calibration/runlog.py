"""Append-only JSON-lines log of calibration runs."""

from __future__ import annotations

import json
import logging
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Union

from ..db.utils import dt_iso

logger = logging.getLogger(__name__)


class RunLog:
    """One JSON object per line; each :meth:`append` adds a timestamped record."""

    def __init__(self, path: Union[str, Path]) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: Mapping[str, Any]) -> dict[str, Any]:
        entry = {"logged_at": dt_iso(datetime.now(timezone.utc)), **record}
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        logger.debug(f"Appended run-log record to {self.path}")
        return entry

    def records(self) -> list[dict[str, Any]]:
        if not self.path.exists():
            return []
        with self.path.open("r", encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]


__all__ = ["RunLog"]
