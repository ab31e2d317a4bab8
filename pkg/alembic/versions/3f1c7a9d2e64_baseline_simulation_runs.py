"""baseline simulation runs

Revision ID: 3f1c7a9d2e64
Revises: 
Create Date: 2026-10-18 09:12:41.208311

"""
from __future__ import annotations
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '3f1c7a9d2e64'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('simulation_runs',
    sa.Column('id', sa.BigInteger().with_variant(sa.Integer(), 'sqlite'), autoincrement=True, nullable=False),
    sa.Column('created_at', sa.DateTime(timezone=True), nullable=False),
    sa.Column('updated_at', sa.DateTime(timezone=True), nullable=False),
    sa.Column('command', sa.String(length=32), nullable=False),
    sa.Column('gate_kind', sa.String(length=32), nullable=False),
    sa.Column('config_hash', sa.String(length=40), nullable=False),
    sa.Column('gate_time_ns', sa.Float(), nullable=False),
    sa.Column('target_angle', sa.Float(), nullable=True),
    sa.Column('angle', sa.Float(), nullable=False),
    sa.Column('avg_fidelity', sa.Float(), nullable=False),
    sa.Column('total_leakage', sa.Float(), nullable=False),
    sa.Column('leakage', sa.JSON(), nullable=False),
    sa.Column('report', sa.JSON(), nullable=False),
    sa.PrimaryKeyConstraint('id', name=op.f('pk_simulation_runs')),
    sa.UniqueConstraint('command', 'gate_kind', 'config_hash', 'gate_time_ns', name='uq_simulation_runs_key')
    )


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_table('simulation_runs')
