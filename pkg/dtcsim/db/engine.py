from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine

from ..settings import ROOT_DIR, get_settings
from .utils import resolve_sqlite_url


def default_database_url() -> str:
    """``DTCSIM_DB_URL`` (default ``sqlite:///./dtcsim.db``) with relative SQLite paths
    resolved against the project root."""
    return resolve_sqlite_url(get_settings().db_url, ROOT_DIR)


def make_engine(database_url: Optional[str] = None, echo: bool = False) -> Engine:
    """Create a SQLAlchemy engine for the results database.

    Parameters
    ----------
    database_url : Optional[str]
        Database URL. Defaults to :func:`default_database_url`.
    echo : bool
        Enable SQL logging for debugging. Defaults to ``False``.

    Returns
    -------
    Engine
        Configured SQLAlchemy engine instance.
    """
    url = resolve_sqlite_url(database_url, ROOT_DIR) if database_url else default_database_url()
    return create_engine(url, echo=echo)
