"""Run one command end to end: build models, dispatch, derive the verdict, write outputs."""

from __future__ import annotations

import time
from collections.abc import Callable
from pathlib import Path

from relhyp.cli.commands.checks import run_check
from relhyp.cli.commands.divergence import run_divergence
from relhyp.cli.commands.result import CommandResult, flatten_constants, has_violation
from relhyp.cli.commands.spaces import run_bowditch, run_coneoff, run_cosets, run_gen
from relhyp.cli.commands.treeapprox import run_treeapprox
from relhyp.cli.inputs import Model, load_model
from relhyp.core.errors import EXIT_OK, EXIT_VIOLATION
from relhyp.core.settings import settings
from relhyp.db.engine import init_db
from relhyp.db.migrations import run_migrations
from relhyp.db.session import session_scope
from relhyp.models.reports import ConstantsReport, Payload, Report, SeriesPoint, Verdict
from relhyp.models.run_config import RunConfig
from relhyp.services.report_repository import save_report
from relhyp.services.report_writer import (
    atomic_write_text,
    csv_text,
    series_csv,
    write_csv,
    write_report,
)
from relhyp.services.sampling import classify_trend

Handler = Callable[[RunConfig, Model], CommandResult]

HANDLERS: dict[str, Handler] = {
    "gen": run_gen,
    "cosets": run_cosets,
    "bowditch": run_bowditch,
    "coneoff": run_coneoff,
    "check": run_check,
    "divergence": run_divergence,
    "treeapprox": run_treeapprox,
}

PASSING_VERDICTS: frozenset[str] = frozenset({"pass", "plausible", "stable", "inconclusive"})


def exit_code_for(verdict: str) -> int:
    return EXIT_OK if verdict in PASSING_VERDICTS else EXIT_VIOLATION


def default_report_path(config: RunConfig) -> Path:
    name = config.command if config.check is None else f"{config.command}-{config.check}"
    return Path(settings.report_dir) / f"{name}.json"


# ---------------------------------------------------------------------------
# Multi-radius protocol
# ---------------------------------------------------------------------------


def _tagged(payloads: list[Payload], radius: int) -> list[Payload]:
    return [
        p.model_copy(update={"details": {**p.details, "radius": radius}})
        if isinstance(p, ConstantsReport)
        else p
        for p in payloads
    ]


def stabilization(series: list[SeriesPoint]) -> tuple[ConstantsReport, Verdict]:
    """Per-symbol trend across radii and the combined verdict.

    ``growing`` if any constant grows, ``stable`` if all of them settle,
    ``inconclusive`` otherwise.
    """
    radii = [p.radius for p in series]
    symbols = sorted({s for p in series for s in p.constants})
    trends: dict[str, str] = {}
    gaps: dict[str, float] = {}
    for symbol in symbols:
        values = [p.constants[symbol] for p in series if symbol in p.constants]
        rs = [p.radius for p in series if symbol in p.constants]
        trends[symbol] = classify_trend(rs, values)
        if len(values) >= 2:
            gaps[symbol] = abs(values[-1] - values[-2])
    labels = set(trends.values())
    verdict: Verdict
    if "growing" in labels:
        verdict = "growing"
    elif labels == {"stable"}:
        verdict = "stable"
    else:
        verdict = "inconclusive"
    report = ConstantsReport(
        condition="stabilization",
        constants=gaps,
        details={"radii": radii, "trends": trends},
    )
    return report, verdict


# ---------------------------------------------------------------------------
# Run
# ---------------------------------------------------------------------------


def _execute(config: RunConfig) -> tuple[list[Payload], list[SeriesPoint], CommandResult]:
    handler = HANDLERS[config.command]
    radii = config.radius_list()
    if len(radii) <= 1:
        result = handler(config, load_model(config, radii[0] if radii else None))
        return result.payloads, [], result

    payloads: list[Payload] = []
    series: list[SeriesPoint] = []
    verdicts: list[Verdict | None] = []
    for radius in radii:
        result = handler(config, load_model(config, radius))
        payloads.extend(_tagged(result.payloads, radius))
        series.append(SeriesPoint(radius=radius, constants=flatten_constants(result.payloads)))
        verdicts.append(result.verdict)
    trend_report, trend = stabilization(series)
    payloads.append(trend_report)
    merged = CommandResult(
        payloads=payloads,
        verdict="violation" if "violation" in verdicts else trend,
        artifacts=result.artifacts,
    )
    return payloads, series, merged


def _verdict(result: CommandResult) -> Verdict:
    if result.verdict == "violation" or has_violation(result.payloads):
        return "violation"
    return result.verdict or "pass"


def _write_outputs(config: RunConfig, report: Report, result: CommandResult) -> None:
    for path, text in result.artifacts.items():
        atomic_write_text(path, text)
    write_report(report, config.out or default_report_path(config))
    if config.csv is None:
        return
    if result.csv is not None and not report.series:
        write_csv(result.csv, config.csv)
    elif report.series:
        write_csv(series_csv(report), config.csv)
    else:
        constants = flatten_constants(report.payloads)
        write_csv(csv_text(("symbol", "value"), sorted(constants.items())), config.csv)


def persist(report: Report) -> int:
    """Store ``report`` in the report database and return its id."""
    init_db()
    run_migrations()
    with session_scope() as db:
        try:
            record = save_report(db, report)
            db.commit()
        except Exception:
            db.rollback()
            raise
        return record.id


def run(config: RunConfig) -> tuple[Report, int]:
    """Execute ``config`` and return the written report with its exit code."""
    started = time.perf_counter()
    payloads, series, result = _execute(config)
    verdict = _verdict(result)
    exit_code = exit_code_for(verdict)
    report = Report(
        command=config.command,
        check=config.check,
        config=config.echo(),
        payloads=payloads,
        series=series,
        verdict=verdict,
        exit_code=exit_code,
        wall_time=time.perf_counter() - started,
    )
    _write_outputs(config, report, result)
    if config.store or settings.persist_reports:
        persist(report)
    return report, exit_code
