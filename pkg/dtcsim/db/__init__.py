"""Results-database plumbing."""

from .engine import default_database_url, make_engine
from .metadata import metadata_obj
from .utils import dt_iso, resolve_sqlite_url

__all__ = ["default_database_url", "dt_iso", "make_engine", "metadata_obj", "resolve_sqlite_url"]
