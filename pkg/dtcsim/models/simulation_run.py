"""Persisted gate simulations and calibration results."""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any, Optional

from sqlalchemy import JSON, DateTime, Float, String, UniqueConstraint
from sqlalchemy.orm import Mapped, mapped_column

from ..db.utils import dt_iso
from .base import Base
from .id_type import ID_TYPE


class SimulationRun(Base):
    """One scored gate simulation, keyed by what produced it."""

    __tablename__ = "simulation_runs"

    id: Mapped[int] = mapped_column(ID_TYPE, primary_key=True, autoincrement=True)
    """Primary key."""

    created_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True),
        nullable=False,
        default=lambda: datetime.now(timezone.utc),
    )
    """Timestamp of the first simulation with this key."""

    updated_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True),
        nullable=False,
        default=lambda: datetime.now(timezone.utc),
        onupdate=lambda: datetime.now(timezone.utc),
    )
    """Timestamp bumped when a re-run overwrites the row."""

    command: Mapped[str] = mapped_column(String(32), nullable=False)
    """CLI command that produced the row: ``"gate"`` or ``"calibrate"``."""

    gate_kind: Mapped[str] = mapped_column(String(32), nullable=False)
    """Gate-kind registry key, e.g. ``"sqiswap"``."""

    config_hash: Mapped[str] = mapped_column(String(40), nullable=False)
    """Short SHA-1 of the run configuration."""

    gate_time_ns: Mapped[float] = mapped_column(Float, nullable=False)

    target_angle: Mapped[Optional[float]] = mapped_column(Float, nullable=True)
    """Calibration target in rad; ``None`` for plain gate runs."""

    angle: Mapped[float] = mapped_column(Float, nullable=False)
    avg_fidelity: Mapped[float] = mapped_column(Float, nullable=False)
    total_leakage: Mapped[float] = mapped_column(Float, nullable=False)

    leakage: Mapped[list[float]] = mapped_column(JSON, nullable=False)
    """Leakage per initial state ``00, 01, 10, 11``."""

    report: Mapped[dict[str, Any]] = mapped_column(JSON, nullable=False)
    """Full serialized gate report."""

    __table_args__ = (
        UniqueConstraint(
            "command",
            "gate_kind",
            "config_hash",
            "gate_time_ns",
            name="uq_simulation_runs_key",
        ),
    )

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "created_at": dt_iso(self.created_at),
            "updated_at": dt_iso(self.updated_at),
            "command": self.command,
            "gate_kind": self.gate_kind,
            "config_hash": self.config_hash,
            "gate_time_ns": self.gate_time_ns,
            "target_angle": self.target_angle,
            "angle": self.angle,
            "avg_fidelity": self.avg_fidelity,
            "total_leakage": self.total_leakage,
            "leakage": list(self.leakage),
        }

    def __repr__(self) -> str:
        return (
            f"<SimulationRun {self.command}/{self.gate_kind} T={self.gate_time_ns} "
            f"F={self.avg_fidelity:.6f}>"
        )
