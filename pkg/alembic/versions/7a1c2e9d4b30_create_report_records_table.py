"""create report_records table

Revision ID: 7a1c2e9d4b30
Revises:
Create Date: 2026-10-12 10:14:37.512004

"""

from collections.abc import Sequence

import sqlalchemy as sa
from alembic import op

# revision identifiers, used by Alembic.
revision: str = "7a1c2e9d4b30"
down_revision: str | None = None
branch_labels: str | Sequence[str] | None = None
depends_on: str | Sequence[str] | None = None


def upgrade() -> None:
    op.create_table(
        "report_records",
        sa.Column("id", sa.Integer(), autoincrement=True, nullable=False),
        sa.Column("command", sa.String(length=50), nullable=False),
        sa.Column("check_name", sa.String(length=50), nullable=True),
        sa.Column("verdict", sa.String(length=20), nullable=False),
        sa.Column("exit_code", sa.Integer(), nullable=False),
        sa.Column("seed", sa.Integer(), nullable=True),
        sa.Column("mode", sa.String(length=20), nullable=False),
        sa.Column("config_json", sa.Text(), nullable=False),
        sa.Column("report_json", sa.Text(), nullable=False),
        sa.Column("created_at", sa.DateTime(), nullable=False),
        sa.PrimaryKeyConstraint("id"),
        sa.CheckConstraint(
            "verdict IN ('pass', 'plausible', 'violation', 'stable', 'growing', 'inconclusive')",
            name="ck_report_records_verdict",
        ),
    )
    op.create_index("ix_report_records_created_at", "report_records", ["created_at"])
    op.create_index(
        "ix_report_records_command_check", "report_records", ["command", "check_name"]
    )
    op.create_index("ix_report_records_verdict", "report_records", ["verdict"])


def downgrade() -> None:
    op.drop_index("ix_report_records_verdict", table_name="report_records")
    op.drop_index("ix_report_records_command_check", table_name="report_records")
    op.drop_index("ix_report_records_created_at", table_name="report_records")
    op.drop_table("report_records")
