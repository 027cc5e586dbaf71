"""Tests for the report store schema, repository and report writer.

Covers:
  - schema: table, columns and the verdict constraint
  - save / get / list / count / delete with filters and newest-first order
  - constant trails from single-radius reports and radius series
  - locked-database categorization
  - atomic JSON / CSV emission
"""

import json
from datetime import datetime
from pathlib import Path

import pytest
from relhyp.models.report_record import ReportRecord
from relhyp.models.reports import (
    BCPReport,
    ConstantsReport,
    DivergenceRecord,
    DivergenceReport,
    Report,
    SeriesPoint,
)
from relhyp.models.run_config import RunConfig
from relhyp.services.report_repository import (
    DatabaseLockedError,
    RecordNotFoundError,
    _handle_operational_error,
    constant_history,
    count_reports,
    delete_report,
    get_by_id,
    list_reports,
    save_report,
)
from relhyp.services.report_writer import (
    atomic_write_text,
    divergence_csv,
    dumps_json,
    series_csv,
    write_report,
)
from sqlalchemy import text
from sqlalchemy.exc import IntegrityError, OperationalError
from sqlalchemy.orm import Session

_NOW = datetime(2026, 6, 1, 12, 0, 0)
_LATER = datetime(2026, 6, 1, 12, 5, 0)


def _report(
    check: str = "alpha1",
    B: float = 1.0,
    radius: int = 3,
    verdict: str = "pass",
    **config: object,
) -> Report:
    cfg = RunConfig(command="check", check=check, group="free2", radius=radius, cosets=("a",),
                    **config)
    return Report(
        command="check",
        check=check,
        config=cfg.echo(),
        payloads=[ConstantsReport(condition=check, constants={"B": B})],
        verdict=verdict,  # type: ignore[arg-type]
        exit_code=0 if verdict == "pass" else 1,
        wall_time=0.25,
    )


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------


class TestSchema:
    def test_columns(self, db: Session) -> None:
        rows = db.execute(text("PRAGMA table_info('report_records')")).fetchall()
        assert {row[1] for row in rows} == {
            "id", "command", "check_name", "verdict", "exit_code", "seed", "mode",
            "config_json", "report_json", "created_at",
        }

    def test_verdict_constraint(self, db: Session) -> None:
        db.add(ReportRecord(command="gen", verdict="maybe", exit_code=0, mode="exhaustive",
                            config_json="{}", report_json="{}", created_at=_NOW))
        with pytest.raises(IntegrityError):
            db.flush()


# ---------------------------------------------------------------------------
# CRUD
# ---------------------------------------------------------------------------


class TestSaveAndGet:
    def test_save_copies_report_fields(self, db: Session) -> None:
        record = save_report(db, _report(mode="sample", seed=7), created_at=_NOW)
        fetched = get_by_id(db, record.id)
        assert (fetched.command, fetched.check_name, fetched.verdict) == ("check", "alpha1", "pass")
        assert (fetched.seed, fetched.mode, fetched.exit_code) == (7, "sample", 0)
        assert json.loads(fetched.config_json)["group"] == "free2"

    def test_stored_json_has_no_wall_time(self, db: Session) -> None:
        record = save_report(db, _report(), created_at=_NOW)
        stored = json.loads(record.report_json)
        assert "wall_time" not in stored
        assert stored["payloads"][0]["constants"] == {"B": 1.0}

    def test_missing_record(self, db: Session) -> None:
        with pytest.raises(RecordNotFoundError):
            get_by_id(db, 999)


class TestListAndCount:
    def test_newest_first(self, db: Session) -> None:
        old = save_report(db, _report(), created_at=_NOW)
        new = save_report(db, _report(), created_at=_LATER)
        assert [r.id for r in list_reports(db)] == [new.id, old.id]

    def test_filters(self, db: Session) -> None:
        save_report(db, _report("alpha1"), created_at=_NOW)
        save_report(db, _report("rh3", verdict="violation"), created_at=_NOW)
        save_report(db, _report("rh3"), created_at=_LATER)
        assert count_reports(db) == 3
        assert count_reports(db, check="rh3") == 2
        assert count_reports(db, check="rh3", verdict="violation") == 1
        assert count_reports(db, command="gen") == 0

    def test_paging(self, db: Session) -> None:
        for minute in range(5):
            save_report(db, _report(), created_at=datetime(2026, 6, 1, 12, minute))
        page = list_reports(db, offset=1, limit=2)
        assert [r.created_at.minute for r in page] == [3, 2]


class TestDelete:
    def test_delete(self, db: Session) -> None:
        record = save_report(db, _report(), created_at=_NOW)
        delete_report(db, record.id)
        assert count_reports(db) == 0

    def test_delete_missing(self, db: Session) -> None:
        with pytest.raises(RecordNotFoundError):
            delete_report(db, 1)


# ---------------------------------------------------------------------------
# Constant trails
# ---------------------------------------------------------------------------


class TestConstantHistory:
    def test_single_radius_reports(self, db: Session) -> None:
        save_report(db, _report(B=1.0, radius=2), created_at=_NOW)
        save_report(db, _report(B=2.0, radius=3), created_at=_LATER)
        assert constant_history(db, "check", "alpha1", "B") == [(2, 1.0), (3, 2.0)]

    def test_series_report(self, db: Session) -> None:
        cfg = RunConfig(command="check", check="alpha1", group="free2", radii=(2, 3))
        report = Report(
            command="check", check="alpha1", config=cfg.echo(),
            series=[SeriesPoint(radius=2, constants={"alpha1.B": 1.0}),
                    SeriesPoint(radius=3, constants={"alpha1.B": 1.5})],
            verdict="stable", exit_code=0,
        )
        save_report(db, report, created_at=_NOW)
        assert constant_history(db, "check", "alpha1", "alpha1.B") == [(2, 1.0), (3, 1.5)]

    def test_bcp_K(self, db: Session) -> None:
        cfg = RunConfig(command="check", check="bcp", group="free2", radius=3)
        report = Report(command="check", check="bcp", config=cfg.echo(),
                        payloads=[BCPReport(K=2.0)], verdict="pass", exit_code=0)
        save_report(db, report, created_at=_NOW)
        assert constant_history(db, "check", "bcp", "K") == [(3, 2.0)]

    def test_bad_json_is_skipped(self, db: Session) -> None:
        save_report(db, _report(B=4.0), created_at=_NOW)
        db.add(ReportRecord(command="check", check_name="alpha1", verdict="pass", exit_code=0,
                            mode="exhaustive", config_json="{}", report_json="{not json",
                            created_at=_LATER))
        db.flush()
        assert constant_history(db, "check", "alpha1", "B") == [(3, 4.0)]


class TestOperationalErrors:
    def test_locked_is_categorized(self) -> None:
        exc = OperationalError("INSERT", {}, Exception("database is locked"))
        with pytest.raises(DatabaseLockedError, match="save_report"):
            _handle_operational_error(exc, "save_report")

    def test_other_errors_propagate(self) -> None:
        exc = OperationalError("INSERT", {}, Exception("disk I/O error"))
        with pytest.raises(OperationalError):
            _handle_operational_error(exc, "save_report")


# ---------------------------------------------------------------------------
# Writer
# ---------------------------------------------------------------------------


class TestWriter:
    def test_canonical_json(self) -> None:
        assert dumps_json({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'

    def test_nan_is_rejected(self) -> None:
        with pytest.raises(ValueError):
            dumps_json({"x": float("nan")})

    def test_atomic_write_leaves_no_temp_files(self, tmp_path: Path) -> None:
        target = atomic_write_text(tmp_path / "nested" / "out.json", "{}\n")
        assert target.read_text(encoding="utf-8") == "{}\n"
        assert [p.name for p in target.parent.iterdir()] == ["out.json"]

    def test_write_report(self, tmp_path: Path) -> None:
        path = write_report(_report(), tmp_path / "r.json")
        loaded = json.loads(path.read_text(encoding="utf-8"))
        assert loaded["verdict"] == "pass"
        assert loaded["config"]["radius"] == 3
        assert "out" not in loaded["config"]

    def test_divergence_csv(self) -> None:
        report = DivergenceReport(delta=0.5, gamma=0.0, records=[
            DivergenceRecord(n=1, div_sup=1.0, samples=4),
            DivergenceRecord(n=2, infinite_count=3, samples=3),
        ])
        assert divergence_csv(report).splitlines() == [
            "n,div_sup,infinite_count,samples", "1,1.0,0,4", "2,,3,3",
        ]

    def test_series_csv(self) -> None:
        report = Report(command="check", check="rh3", config={}, verdict="stable", exit_code=0,
                        series=[SeriesPoint(radius=2, constants={"a.K": 1.0}),
                                SeriesPoint(radius=3, constants={"a.K": 1.0, "b.R": 2.0})])
        assert series_csv(report).splitlines() == ["radius,a.K,b.R", "2,1.0,", "3,1.0,2.0"]
