"""Handlers that build and save models: ``gen``, ``cosets``, ``bowditch``, ``coneoff``."""

from __future__ import annotations

from relhyp.cli.commands.result import CommandResult
from relhyp.cli.inputs import Model
from relhyp.models.reports import ConstantsReport
from relhyp.models.run_config import ConfigurationError, RunConfig
from relhyp.services.bowditch import build_bowditch
from relhyp.services.coned_off import build_coned_off
from relhyp.services.graph_io import dump_bowditch, dump_family, dump_graph
from relhyp.services.metric_graph import graph_diameter


def _saved(config: RunConfig, graph_text: str | None, model: Model) -> dict[str, str]:
    artifacts: dict[str, str] = {}
    if config.save_graph and graph_text is not None:
        artifacts[config.save_graph] = graph_text
    if config.save_family:
        artifacts[config.save_family] = dump_family(model.family)
    return artifacts


def _family_sizes(model: Model) -> dict[str, float]:
    sizes = [len(m) for m in model.family]
    return {
        "members": float(len(sizes)),
        "min_member": float(min(sizes, default=0)),
        "max_member": float(max(sizes, default=0)),
    }


def run_gen(config: RunConfig, model: Model) -> CommandResult:
    g = model.graph
    report = ConstantsReport(
        condition="gen",
        constants={
            "vertices": float(g.vertex_count),
            "edges": float(len(g.edges)),
            "diameter": graph_diameter(g),
            **_family_sizes(model),
        },
        details={"radius": model.radius},
    )
    return CommandResult(payloads=[report], artifacts=_saved(config, dump_graph(g), model))


def run_cosets(config: RunConfig, model: Model) -> CommandResult:
    if not config.cosets and config.group_config is None and config.peripherals is None:
        raise ConfigurationError("cosets needs --coset, --group-config or --peripherals")
    report = ConstantsReport(
        condition="cosets",
        constants=_family_sizes(model),
        details={"sizes": {model.family.name(i): len(m) for i, m in enumerate(model.family)}},
    )
    return CommandResult(payloads=[report], artifacts=_saved(config, None, model))


def run_bowditch(config: RunConfig, model: Model) -> CommandResult:
    bow = build_bowditch(
        model.graph,
        model.family,
        2.0 if config.k is None else config.k,
        config.R_net,
        config.depth,
        profile_seed=config.seed or 0,
    )
    report = ConstantsReport(
        condition="bowditch",
        constants={
            "vertices": float(bow.graph.vertex_count),
            "edges": float(len(bow.graph.edges)),
            "depth": float(bow.depth),
            "truncation_error": bow.truncation_error,
        },
        details={"distortion": [list(p) for p in bow.distortion]},
    )
    return CommandResult(payloads=[report], artifacts=_saved(config, dump_bowditch(bow), model))


def run_coneoff(config: RunConfig, model: Model) -> CommandResult:
    coned = build_coned_off(model.graph, model.family, 1.0 if config.k is None else config.k)
    report = ConstantsReport(
        condition="coneoff",
        constants={
            "vertices": float(coned.graph.vertex_count),
            "edges": float(len(coned.graph.edges)),
            "components": float(len(coned.components)),
            "diameter": graph_diameter(coned.graph),
        },
    )
    artifacts = _saved(config, dump_graph(coned.graph), model)
    return CommandResult(payloads=[report], artifacts=artifacts)
