"""Tests for run settings.

Covers:
  - defaults when neither env vars nor .env are present
  - env vars and explicit values override defaults
  - limit validation with the offending variable named
  - DB path handling: parent directory creation and a controlled error
  - safe_dump carries every field needed to reproduce a run
"""

import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest
from pydantic import ValidationError
from relhyp.core.settings import _DEFAULT_DB_PATH, Settings

# ---------------------------------------------------------------------------
# Defaults
# ---------------------------------------------------------------------------


class TestDefaults:
    def test_db_path(self) -> None:
        s = Settings(_env_file=None)  # type: ignore[call-arg]
        assert s.app_db_path == _DEFAULT_DB_PATH
        assert "relhyp.db" in s.app_db_path
        assert s.database_url == f"sqlite:///{s.app_db_path}"

    def test_ball_limits(self) -> None:
        s = Settings(_env_file=None)  # type: ignore[call-arg]
        assert s.max_radius == 12
        assert s.max_ball_vertices == 200_000
        assert s.boundary_margin == 2
        assert s.min_coset_size == 3

    def test_sampling_policy(self) -> None:
        s = Settings(_env_file=None)  # type: ignore[call-arg]
        assert s.exhaustive_pool_limit == 40
        assert s.exhaustive_quadruple_limit == 60
        assert s.default_threads == 1
        assert s.distance_tolerance == 1e-9

    def test_reports_are_not_persisted_by_default(self) -> None:
        s = Settings(_env_file=None)  # type: ignore[call-arg]
        assert s.persist_reports is False
        assert s.report_dir == "reports"


# ---------------------------------------------------------------------------
# Overrides
# ---------------------------------------------------------------------------


class TestOverrides:
    def test_env_var_overrides_default(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("MAX_RADIUS", "5")
        monkeypatch.setenv("PERSIST_REPORTS", "true")
        s = Settings(_env_file=None)  # type: ignore[call-arg]
        assert s.max_radius == 5
        assert s.persist_reports is True

    def test_env_file_is_read(self, tmp_path: Path) -> None:
        env_file = tmp_path / ".env"
        env_file.write_text("GG_CAP=3.5\nLOG_LEVEL=DEBUG\n", encoding="utf-8")
        s = Settings(_env_file=str(env_file))  # type: ignore[call-arg]
        assert s.gg_cap == 3.5
        assert s.log_level == "DEBUG"

    def test_explicit_value_wins(self) -> None:
        s = Settings(tree_tolerance=1.0, _env_file=None)  # type: ignore[call-arg]
        assert s.tree_tolerance == 1.0


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


class TestValidation:
    @pytest.mark.parametrize(
        ("field", "name"),
        [
            ("max_radius", "MAX_RADIUS"),
            ("max_ball_vertices", "MAX_BALL_VERTICES"),
            ("exhaustive_pool_limit", "EXHAUSTIVE_POOL_LIMIT"),
            ("default_threads", "DEFAULT_THREADS"),
        ],
    )
    def test_non_positive_limits(self, field: str, name: str) -> None:
        with pytest.raises(ValidationError, match=name):
            Settings(**{field: 0}, _env_file=None)  # type: ignore[call-arg]

    def test_negative_margin(self) -> None:
        with pytest.raises(ValidationError, match="BOUNDARY_MARGIN"):
            Settings(boundary_margin=-1, _env_file=None)  # type: ignore[call-arg]

    @pytest.mark.parametrize("fraction", [0.0, 1.5])
    def test_alpha1_fraction_range(self, fraction: float) -> None:
        with pytest.raises(ValidationError, match="ALPHA1_VIOLATION_FRACTION"):
            Settings(alpha1_violation_fraction=fraction, _env_file=None)  # type: ignore[call-arg]


class TestDbPath:
    def test_parent_directory_is_created(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "new", "nested", "reports.db")
            Settings(app_db_path=path, _env_file=None)  # type: ignore[call-arg]
            assert Path(path).parent.exists()

    def test_unwritable_path_raises_with_guidance(self) -> None:
        with pytest.raises(ValidationError, match="APP_DB_PATH"):
            with patch("pathlib.Path.mkdir", side_effect=OSError("Permission denied")):
                Settings(
                    app_db_path="/nonexistent/readonly/path/reports.db",
                    _env_file=None,  # type: ignore[call-arg]
                )


class TestSafeDump:
    def test_includes_run_relevant_fields(self) -> None:
        dump = Settings(_env_file=None).safe_dump()  # type: ignore[call-arg]
        for key in ("app_db_path", "log_level", "max_radius", "distance_tolerance", "gg_cap"):
            assert key in dump
