"""Error root class and centralized error normalization for the CLI.

Every error surfaced to the terminal passes through this module to ensure:
- Consistent structure (user_message, error_category, retryable, exit_code)
- No stack traces in user-facing output
- Detailed info logged for debugging
"""

import logging
from dataclasses import dataclass

from pydantic import ValidationError

from relhyp.core.logging import EVENT_DB_WRITE_FAILED, EVENT_RUN_FAILED, log_event

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG_ERROR = 2
EXIT_INTERNAL_ERROR = 3


class RelHypError(Exception):
    """Base class for every named error raised by the library."""

    error_category = "domain"


class ParameterError(RelHypError):
    """A numeric parameter lies outside its documented range."""

    error_category = "validation"


@dataclass(frozen=True)
class NormalizedError:
    """Standardized error representation for CLI output."""

    user_message: str
    error_category: str
    retryable: bool
    exit_code: int = EXIT_CONFIG_ERROR


def normalize_domain_error(exc: RelHypError, *, operation: str) -> NormalizedError:
    """Normalize a named library error; these are input or precondition problems."""
    error = NormalizedError(
        user_message=f"{type(exc).__name__}: {exc}",
        error_category=exc.error_category,
        retryable=False,
        exit_code=EXIT_CONFIG_ERROR,
    )
    log_event(
        logger, "error", EVENT_RUN_FAILED,
        operation=operation,
        error_category=error.error_category,
        detail=str(exc),
    )
    return error


def normalize_validation_error(exc: ValidationError | list[str]) -> NormalizedError:
    """Normalize pydantic validation failures into a single message."""
    if isinstance(exc, ValidationError):
        messages = [
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        ]
    else:
        messages = exc
    joined = "; ".join(messages)
    log_event(logger, "warning", EVENT_RUN_FAILED, error_category="validation", detail=joined)
    return NormalizedError(
        user_message=f"Validation failed: {joined}",
        error_category="validation",
        retryable=False,
        exit_code=EXIT_CONFIG_ERROR,
    )


def normalize_db_error(exc: Exception, *, operation: str) -> NormalizedError:
    """Normalize a report-store error into a user-friendly message."""
    exc_msg = str(exc).lower()

    if "locked" in exc_msg or "busy" in exc_msg:
        error = NormalizedError(
            user_message="The report database is temporarily busy. Please try again.",
            error_category="db",
            retryable=True,
            exit_code=EXIT_INTERNAL_ERROR,
        )
    elif "readonly" in exc_msg or "read-only" in exc_msg or "permission" in exc_msg:
        error = NormalizedError(
            user_message=(
                "A database permission error occurred. "
                "Check APP_DB_PATH points to a writable location."
            ),
            error_category="db",
            retryable=False,
            exit_code=EXIT_INTERNAL_ERROR,
        )
    else:
        error = NormalizedError(
            user_message="A report database error occurred.",
            error_category="db",
            retryable=True,
            exit_code=EXIT_INTERNAL_ERROR,
        )

    log_event(
        logger, "error", EVENT_DB_WRITE_FAILED,
        operation=operation,
        error_category=error.error_category,
        retryable=error.retryable,
        detail=str(exc),
    )
    return error


def normalize_unknown_error(exc: Exception, *, operation: str) -> NormalizedError:
    """Normalize an unexpected error into a safe generic message."""
    log_event(
        logger, "exception", EVENT_RUN_FAILED,
        operation=operation,
        error_category="unknown",
        detail=f"{type(exc).__name__}: {exc}",
    )
    return NormalizedError(
        user_message="An unexpected internal error occurred; see the log for details.",
        error_category="unknown",
        retryable=False,
        exit_code=EXIT_INTERNAL_ERROR,
    )
