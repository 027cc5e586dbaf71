"""Run settings loaded from environment / .env file.

Config precedence (highest to lowest):
    1. Environment variables
    2. ``.env`` file in project root
    3. Defaults defined in this module

Library functions accept explicit keyword arguments; when an argument is
left as ``None`` the corresponding value below is used.
"""

from pathlib import Path

from pydantic import model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Project root is two levels up from this file (relhyp/core/settings.py)
_PROJECT_ROOT = Path(__file__).resolve().parents[2]
_DEFAULT_DB_PATH = str(_PROJECT_ROOT / "data" / "relhyp.db")


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=str(_PROJECT_ROOT / ".env"),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    debug: bool = False
    log_level: str = "INFO"

    # Report store; override via APP_DB_PATH env var
    app_db_path: str = _DEFAULT_DB_PATH
    persist_reports: bool = False
    report_dir: str = "reports"

    # Ball generation
    max_radius: int = 12
    max_ball_vertices: int = 200_000
    boundary_margin: int = 2
    min_coset_size: int = 3

    # Numerics
    distance_tolerance: float = 1e-9
    distance_cache_rows: int = 4096

    # Sampling policy
    exhaustive_pool_limit: int = 40
    exhaustive_quadruple_limit: int = 60
    geodesic_variants: int = 3
    default_threads: int = 1

    # Verdict thresholds
    alpha1_violation_fraction: float = 0.5
    gg_cap: float = 10.0
    tree_tolerance: float = 4.0
    n_max_configuration: int = 6

    @property
    def database_url(self) -> str:
        """SQLite connection URL derived from ``app_db_path``."""
        return f"sqlite:///{self.app_db_path}"

    @model_validator(mode="after")
    def _validate_limits(self) -> "Settings":
        """Reject non-positive caps and make sure the DB directory exists."""
        positive = {
            "MAX_RADIUS": self.max_radius,
            "MAX_BALL_VERTICES": self.max_ball_vertices,
            "DISTANCE_TOLERANCE": self.distance_tolerance,
            "DISTANCE_CACHE_ROWS": self.distance_cache_rows,
            "EXHAUSTIVE_POOL_LIMIT": self.exhaustive_pool_limit,
            "EXHAUSTIVE_QUADRUPLE_LIMIT": self.exhaustive_quadruple_limit,
            "DEFAULT_THREADS": self.default_threads,
            "GG_CAP": self.gg_cap,
            "N_MAX_CONFIGURATION": self.n_max_configuration,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.boundary_margin < 0 or self.min_coset_size < 0:
            raise ValueError("BOUNDARY_MARGIN and MIN_COSET_SIZE must be >= 0")
        if not 0 < self.alpha1_violation_fraction <= 1:
            raise ValueError(
                "ALPHA1_VIOLATION_FRACTION must lie in (0, 1], "
                f"got {self.alpha1_violation_fraction}"
            )

        parent = Path(self.app_db_path).parent
        try:
            parent.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            msg = (
                f"Cannot create database directory '{parent}': {exc}. "
                f"Set APP_DB_PATH to a writable location."
            )
            raise ValueError(msg) from exc
        return self

    def safe_dump(self) -> dict[str, object]:
        """Return the settings as a flat dict suitable for logging."""
        return self.model_dump()


settings = Settings()
