"""Create or upgrade the results database to the latest migration."""

from __future__ import annotations

from pathlib import Path

from alembic import command
from alembic.config import Config
from sqlalchemy import inspect

from dtcsim.db.engine import make_engine


def print_tables() -> None:
    engine = make_engine()
    insp = inspect(engine)
    print(f"Results database: {engine.url.render_as_string(hide_password=True)}")
    print("Current tables:", ", ".join(sorted(insp.get_table_names())))


def main() -> None:
    """Apply Alembic migrations to ``DTCSIM_DB_URL`` and list the resulting tables."""
    config_path = Path(__file__).resolve().parents[1] / "alembic.ini"
    alembic_cfg = Config(str(config_path))
    command.upgrade(alembic_cfg, "head")
    print_tables()


if __name__ == "__main__":
    main()
