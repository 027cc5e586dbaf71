"""Repository for ReportRecord CRUD operations.

All functions operate on a caller-supplied SQLAlchemy ``Session`` so that
transaction boundaries remain under the caller's control.
"""

from __future__ import annotations

import json
import logging
from datetime import datetime, timezone

UTC = timezone.utc
from typing import Any

from sqlalchemy.exc import OperationalError
from sqlalchemy.orm import Query, Session

from relhyp.core.errors import RelHypError
from relhyp.core.logging import EVENT_DB_READ_FAILED, EVENT_REPORT_PERSISTED, log_event
from relhyp.models.report_record import ReportRecord
from relhyp.models.reports import Report
from relhyp.services.report_writer import dumps_json

logger = logging.getLogger(__name__)

DEFAULT_PAGE_SIZE = 20


class RecordNotFoundError(RelHypError):
    """Raised when a ReportRecord cannot be found by id."""

    error_category = "db"


class DatabaseLockedError(RelHypError):
    """Raised when the database is locked by another process (retryable)."""

    error_category = "db"


def _handle_operational_error(exc: OperationalError, operation: str) -> None:
    """Check for database-locked errors and raise a categorized exception."""
    msg = str(exc).lower()
    if "locked" in msg or "busy" in msg:
        logger.warning(
            "db_write_failed: operation=%s reason=database_locked (retryable)",
            operation,
        )
        raise DatabaseLockedError(
            f"Database is locked during '{operation}'. "
            f"Another process may be writing. Please retry."
        ) from exc
    raise exc


# ---------------------------------------------------------------------------
# Repository methods
# ---------------------------------------------------------------------------


def save_report(
    db: Session, report: Report, *, created_at: datetime | None = None
) -> ReportRecord:
    """Store a finished report and flush to obtain an id."""
    record = ReportRecord(
        command=report.command,
        check_name=report.check,
        verdict=report.verdict,
        exit_code=report.exit_code,
        seed=report.config.get("seed"),
        mode=str(report.config.get("mode", "exhaustive")),
        config_json=dumps_json(report.config),
        report_json=dumps_json(report.deterministic_dump()),
        created_at=created_at or datetime.now(UTC).replace(tzinfo=None),
    )
    db.add(record)
    try:
        db.flush()
    except OperationalError as exc:
        _handle_operational_error(exc, "save_report")
    log_event(
        logger, "info", EVENT_REPORT_PERSISTED,
        id=record.id, command=record.command, check=record.check_name, verdict=record.verdict,
    )
    return record


def get_by_id(db: Session, record_id: int) -> ReportRecord:
    """Fetch a ReportRecord by primary key.

    Raises:
        RecordNotFoundError: If no record with *record_id* exists.
    """
    record = db.get(ReportRecord, record_id)
    if record is None:
        raise RecordNotFoundError(f"ReportRecord not found: id={record_id}")
    return record


def _filtered(
    db: Session,
    *,
    command: str | None,
    check: str | None,
    verdict: str | None,
) -> Query[ReportRecord]:
    query = db.query(ReportRecord)
    if command is not None:
        query = query.filter(ReportRecord.command == command)
    if check is not None:
        query = query.filter(ReportRecord.check_name == check)
    if verdict is not None:
        query = query.filter(ReportRecord.verdict == verdict)
    return query


def list_reports(
    db: Session,
    *,
    command: str | None = None,
    check: str | None = None,
    verdict: str | None = None,
    offset: int = 0,
    limit: int = DEFAULT_PAGE_SIZE,
) -> list[ReportRecord]:
    """List stored reports, newest first, with optional filters."""
    query = _filtered(db, command=command, check=check, verdict=verdict).order_by(
        ReportRecord.created_at.desc(), ReportRecord.id.desc()
    )
    return list(query.offset(offset).limit(limit).all())


def count_reports(
    db: Session,
    *,
    command: str | None = None,
    check: str | None = None,
    verdict: str | None = None,
) -> int:
    """Return total count matching the same filters as :func:`list_reports`."""
    return _filtered(db, command=command, check=check, verdict=verdict).count()


def delete_report(db: Session, record_id: int) -> None:
    """Permanently delete a ReportRecord by primary key.

    Raises:
        RecordNotFoundError: If no record with *record_id* exists.
    """
    record = get_by_id(db, record_id)
    db.delete(record)
    try:
        db.flush()
    except OperationalError as exc:
        _handle_operational_error(exc, "delete_report")
    logger.info("report_record_deleted: id=%d", record_id)


def _trail(payload: dict[str, Any], symbol: str) -> list[tuple[int | None, float]]:
    radius = payload.get("config", {}).get("radius")
    series = payload.get("series") or []
    if series:
        return [
            (point["radius"], float(point["constants"][symbol]))
            for point in series
            if symbol in point.get("constants", {})
        ]
    out: list[tuple[int | None, float]] = []
    for item in payload.get("payloads", []):
        constants = item.get("constants") or {}
        if symbol in constants:
            out.append((radius, float(constants[symbol])))
        elif item.get("kind") == "bcp" and symbol == "K":
            out.append((radius, float(item["K"])))
    return out


def constant_history(
    db: Session, command: str, check: str | None, symbol: str
) -> list[tuple[int | None, float]]:
    """(radius, value) trail of one constant across stored runs, oldest first."""
    rows = (
        _filtered(db, command=command, check=check, verdict=None)
        .order_by(ReportRecord.created_at.asc(), ReportRecord.id.asc())
        .all()
    )
    trail: list[tuple[int | None, float]] = []
    for row in rows:
        try:
            payload = json.loads(row.report_json)
        except json.JSONDecodeError:
            log_event(logger, "warning", EVENT_DB_READ_FAILED, id=row.id, reason="bad_json")
            continue
        trail.extend(_trail(payload, symbol))
    return trail
