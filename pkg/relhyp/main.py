"""Command-line entry point: ``relhyp <command> [flags]``.

Exit codes: 0 pass or plausible, 1 violation or growing constants,
2 configuration, parse or precondition error, 3 internal or report-store error.
"""

from __future__ import annotations

import logging
import sys

from pydantic import ValidationError
from sqlalchemy.exc import SQLAlchemyError

from relhyp.cli.commands.history import replay_config, run_history
from relhyp.cli.parser import build_parser, to_config
from relhyp.cli.runner import run
from relhyp.core.errors import (
    NormalizedError,
    RelHypError,
    normalize_db_error,
    normalize_domain_error,
    normalize_unknown_error,
    normalize_validation_error,
)
from relhyp.core.logging import EVENT_APP_START, EVENT_CONFIG_LOADED, log_event, setup_logging
from relhyp.core.settings import settings
from relhyp.db.engine import DatabaseInitError
from relhyp.db.migrations import MigrationError
from relhyp.services.report_repository import DatabaseLockedError

logger = logging.getLogger(__name__)


def _fail(error: NormalizedError) -> int:
    print(error.user_message, file=sys.stderr)
    return error.exit_code


def main(argv: list[str] | None = None) -> int:
    setup_logging(level=getattr(logging, settings.log_level.upper(), logging.INFO))
    ns = build_parser().parse_args(argv)
    log_event(logger, "info", EVENT_APP_START, command=ns.command)
    operation = ns.command
    try:
        if ns.command == "history":
            return run_history(ns)
        config = replay_config(ns) if ns.command == "replay" else to_config(ns)
        operation = config.command if config.check is None else f"check {config.check}"
        log_event(logger, "info", EVENT_CONFIG_LOADED, command=config.command,
                  check=config.check, mode=config.mode, seed=config.seed, threads=config.threads)
        logger.debug("settings: %s", settings.safe_dump())
        report, exit_code = run(config)
    except (DatabaseLockedError, DatabaseInitError, MigrationError, SQLAlchemyError) as exc:
        return _fail(normalize_db_error(exc, operation=operation))
    except RelHypError as exc:
        return _fail(normalize_domain_error(exc, operation=operation))
    except ValidationError as exc:
        return _fail(normalize_validation_error(exc))
    except Exception as exc:
        return _fail(normalize_unknown_error(exc, operation=operation))

    print(f"{operation}: {report.verdict}")
    return exit_code


if __name__ == "__main__":
    raise SystemExit(main())
