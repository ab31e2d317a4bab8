from .base import Base

# import models so Alembic/autoloaders can discover mappers
from .simulation_run import SimulationRun  # noqa: F401

__all__ = ["Base", "SimulationRun"]
