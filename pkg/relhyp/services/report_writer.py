"""Atomic JSON / CSV emission for reports and plot series."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from relhyp.core.logging import EVENT_REPORT_WRITTEN, log_event
from relhyp.models.reports import DivergenceReport, Report

logger = logging.getLogger(__name__)


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write ``text`` to a temporary sibling, then rename it over ``path``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return target


def dumps_json(payload: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def report_json(report: Report) -> str:
    return dumps_json(report.model_dump(mode="json"))


def write_report(report: Report, path: str | Path) -> Path:
    target = atomic_write_text(path, report_json(report))
    log_event(
        logger, "info", EVENT_REPORT_WRITTEN,
        path=target, command=report.command, check=report.check, verdict=report.verdict,
    )
    return target


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if cell is None else cell for cell in row])
    return buffer.getvalue()


def divergence_csv(report: DivergenceReport) -> str:
    """``n,div_sup,infinite_count,samples`` per radius; unreached sups stay empty."""
    return csv_text(
        ("n", "div_sup", "infinite_count", "samples"),
        ((r.n, r.div_sup, r.infinite_count, r.samples) for r in report.records),
    )


def series_csv(report: Report) -> str:
    """One row per radius of a multi-radius run, one column per constant."""
    symbols = sorted({s for point in report.series for s in point.constants})
    return csv_text(
        ("radius", *symbols),
        ((p.radius, *(p.constants.get(s) for s in symbols)) for p in report.series),
    )


def write_csv(text: str, path: str | Path) -> Path:
    target = atomic_write_text(path, text)
    log_event(logger, "info", EVENT_REPORT_WRITTEN, path=target, format="csv")
    return target
