"""Handler for ``divergence``: the detour curve and, given an axis, the log-detour constant."""

from __future__ import annotations

from relhyp.cli.commands.result import CommandResult, sample_spec
from relhyp.cli.inputs import Model
from relhyp.models.reports import Payload
from relhyp.models.run_config import ConfigurationError, RunConfig
from relhyp.services.divergence import DivergenceParams, check_log_detour, div_function
from relhyp.services.graph_io import load_paths
from relhyp.services.report_writer import divergence_csv


def run_divergence(config: RunConfig, model: Model) -> CommandResult:
    params = DivergenceParams(delta=config.delta, gamma=config.gamma)
    report = div_function(
        model.graph,
        config.n_max,
        params,
        sample_spec(config),
        closed=config.closed_ball,
        margin=config.margin,
        threads=config.threads,
    )
    payloads: list[Payload] = [report]
    if config.paths is not None:
        paths = load_paths(config.paths, model.graph)
        if not paths:
            raise ConfigurationError(f"{config.paths} holds no axis path")
        payloads.append(
            check_log_detour(
                model.graph, paths[0], config.count, config.seed or 0, threads=config.threads
            )
        )
    return CommandResult(payloads=payloads, csv=divergence_csv(report))
