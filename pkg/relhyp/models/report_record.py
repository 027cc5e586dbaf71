"""SQLAlchemy ORM model for stored run reports."""

from datetime import datetime

from sqlalchemy import CheckConstraint, DateTime, Index, Integer, String, Text
from sqlalchemy.orm import Mapped, mapped_column

from relhyp.db.base import Base
from relhyp.models.reports import VERDICTS

_VERDICT_SQL = ", ".join(f"'{v}'" for v in VERDICTS)


class ReportRecord(Base):
    """One emitted report; ``report_json`` is a copy of the JSON file."""

    __tablename__ = "report_records"
    __table_args__ = (
        Index("ix_report_records_created_at", "created_at"),
        Index("ix_report_records_command_check", "command", "check_name"),
        Index("ix_report_records_verdict", "verdict"),
        CheckConstraint(f"verdict IN ({_VERDICT_SQL})", name="ck_report_records_verdict"),
    )

    id: Mapped[int] = mapped_column(primary_key=True, autoincrement=True)
    command: Mapped[str] = mapped_column(String(50), nullable=False)
    check_name: Mapped[str | None] = mapped_column(String(50), nullable=True)
    verdict: Mapped[str] = mapped_column(String(20), nullable=False)
    exit_code: Mapped[int] = mapped_column(Integer, nullable=False)
    seed: Mapped[int | None] = mapped_column(Integer, nullable=True)
    mode: Mapped[str] = mapped_column(String(20), nullable=False, default="exhaustive")
    config_json: Mapped[str] = mapped_column(Text, nullable=False)
    report_json: Mapped[str] = mapped_column(Text, nullable=False)
    created_at: Mapped[datetime] = mapped_column(DateTime, nullable=False)
