"""Tests for the report-store lifecycle: engine checks and migrations.

Covers:
  - a single migration head creating report_records
  - already-at-head is a no-op
  - migration failure raises MigrationError with revision context
  - schema drift detection
  - unreachable database gives a controlled DatabaseInitError
"""

from unittest.mock import MagicMock, patch

import pytest
from relhyp.db.engine import DatabaseInitError, init_db
from relhyp.db.migrations import (
    MigrationError,
    check_schema_current,
    get_head_revision,
    run_migrations,
)

HEAD = "7a1c2e9d4b30"


class TestHead:
    def test_single_head(self) -> None:
        assert get_head_revision() == HEAD


class TestRunMigrations:
    def test_at_head_is_noop(self) -> None:
        with (
            patch("relhyp.db.migrations.get_current_revision", return_value=HEAD),
            patch("relhyp.db.migrations.command.upgrade") as upgrade,
        ):
            run_migrations()
        upgrade.assert_not_called()

    def test_fresh_database_upgrades(self) -> None:
        with (
            patch("relhyp.db.migrations.get_current_revision", return_value=None),
            patch("relhyp.db.migrations.command.upgrade") as upgrade,
        ):
            run_migrations()
        upgrade.assert_called_once()
        assert upgrade.call_args.args[1] == "head"

    def test_failure_carries_revision(self) -> None:
        with (
            patch("relhyp.db.migrations.get_current_revision", return_value="old_rev"),
            patch(
                "relhyp.db.migrations.command.upgrade",
                side_effect=RuntimeError("table report_records already exists"),
            ),
            pytest.raises(MigrationError, match="current=old_rev, target=head"),
        ):
            run_migrations()


class TestSchemaDrift:
    def test_current(self) -> None:
        with patch("relhyp.db.migrations.get_current_revision", return_value=HEAD):
            assert check_schema_current() is True

    def test_behind(self, caplog: pytest.LogCaptureFixture) -> None:
        with patch("relhyp.db.migrations.get_current_revision", return_value=None):
            assert check_schema_current() is False
        assert "db_schema_drift" in caplog.text


class TestInitDb:
    def test_unreachable_database(self) -> None:
        broken = MagicMock()
        broken.connect.side_effect = OSError("unable to open database file")
        with (
            patch("relhyp.db.engine.engine", broken),
            pytest.raises(DatabaseInitError, match="APP_DB_PATH"),
        ):
            init_db()
