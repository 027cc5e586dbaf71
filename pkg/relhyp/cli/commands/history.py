"""``history`` and ``replay``: stored reports and re-running an echoed config."""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from relhyp.core.errors import EXIT_OK
from relhyp.db.engine import init_db
from relhyp.db.migrations import run_migrations
from relhyp.db.session import session_scope
from relhyp.models.run_config import ConfigurationError, RunConfig
from relhyp.services.report_repository import (
    constant_history,
    count_reports,
    delete_report,
    list_reports,
)


def replay_config(ns: argparse.Namespace) -> RunConfig:
    """Config echoed in ``ns.report`` with fresh output destinations."""
    try:
        payload = json.loads(Path(ns.report).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigurationError(f"report not found: {ns.report}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{ns.report} is not a JSON report: {exc}") from exc
    if not isinstance(payload, dict) or "config" not in payload:
        raise ConfigurationError(f"{ns.report} carries no config echo")
    outputs = {key: getattr(ns, key) for key in ("out", "csv", "store")}
    return RunConfig.model_validate(
        {**payload["config"], **{k: v for k, v in outputs.items() if v is not None}}
    )


def run_history(ns: argparse.Namespace) -> int:
    init_db()
    run_migrations()
    with session_scope() as db:
        if ns.history_action == "list":
            filters = {"command": ns.history_command, "check": ns.check, "verdict": ns.verdict}
            total = count_reports(db, **filters)
            rows = list_reports(db, **filters, offset=ns.offset, limit=ns.limit)
            print(f"{total} stored report(s)")
            for row in rows:
                name = row.command if row.check_name is None else f"{row.command} {row.check_name}"
                seed = "exhaustive" if row.seed is None else f"seed={row.seed}"
                print(f"{row.id:>5}  {row.created_at:%Y-%m-%d %H:%M}  {name:<18} "
                      f"{row.verdict:<12} {seed}")
        elif ns.history_action == "trail":
            for radius, value in constant_history(db, ns.history_command, ns.check, ns.symbol):
                print(f"{'-' if radius is None else radius}\t{value:g}")
        else:
            delete_report(db, ns.record_id)
            db.commit()
            print(f"deleted report {ns.record_id}")
    return EXIT_OK
