"""Handlers for ``check <name>``: one characterization audit per invocation."""

from __future__ import annotations

from collections.abc import Callable, Sequence

from relhyp.cli.commands.result import CommandResult, has_violation, sample_spec
from relhyp.cli.inputs import Model
from relhyp.models.graph import VertexSet
from relhyp.models.reports import Payload, Verdict
from relhyp.models.run_config import ConfigurationError, RunConfig
from relhyp.models.spaces import StandardPath
from relhyp.models.transient import TransientParams
from relhyp.services.bowditch import build_bowditch, check_rh1
from relhyp.services.coned_off import (
    build_coned_off,
    candidate_pairs,
    check_bcp,
    check_rh2,
    validate_standard_path,
)
from relhyp.services.graph_io import load_gg_family, load_paths, load_standard_path
from relhyp.services.guessing_geodesics import geodesic_family, gg_condition_audit
from relhyp.services.metric_graph import interior_vertices
from relhyp.services.peripherals import (
    ProjectionParams,
    audit_projection_lemmas,
    check_alpha1,
    check_alpha2,
)
from relhyp.services.sampling import EXHAUSTIVE, sample_pairs, subsample
from relhyp.services.transient import (
    check_rh0,
    check_rh3,
    check_transient_stability,
    quasi_geodesic_pairs,
)

CheckHandler = Callable[[RunConfig, Model], CommandResult]


def _k(config: RunConfig, default: float) -> float:
    return default if config.k is None else config.k


def _pool(config: RunConfig, model: Model) -> list[int]:
    """Seeded interior subsample used by the pairwise producers."""
    interior = interior_vertices(model.graph, 0, config.margin)
    return subsample(interior.members, config.pool_size, config.seed)


def _endpoint_pairs(config: RunConfig, model: Model) -> list[tuple[int, int]]:
    return sample_pairs(_pool(config, model), sample_spec(config) or EXHAUSTIVE)


def _result(payloads: Sequence[Payload]) -> CommandResult:
    verdict: Verdict | None = "violation" if has_violation(payloads) else None
    return CommandResult(payloads=list(payloads), verdict=verdict)


# ---------------------------------------------------------------------------
# Peripheral and transient audits
# ---------------------------------------------------------------------------


def run_alpha1(config: RunConfig, model: Model) -> CommandResult:
    return _result([check_alpha1(model.graph, model.family, config.K, threads=config.threads)])


def run_alpha2(config: RunConfig, model: Model) -> CommandResult:
    report = check_alpha2(
        model.graph, model.family, config.epsilon, config.M, sample_spec(config),
        threads=config.threads,
    )
    return _result([report])


def run_proj(config: RunConfig, model: Model) -> CommandResult:
    params = ProjectionParams(M=config.M, mu=config.mu)
    report = audit_projection_lemmas(
        model.graph, model.family, params, sample_spec(config), threads=config.threads
    )
    return _result([report])


def run_rh0(config: RunConfig, model: Model) -> CommandResult:
    report = check_rh0(
        model.graph, model.family, config.atg_delta, sample_spec(config), threads=config.threads
    )
    return _result([report])


def run_rh3(config: RunConfig, model: Model) -> CommandResult:
    reports = check_rh3(
        model.graph,
        model.family,
        config.mu,
        config.R_grid,
        _k(config, 1.0),
        sample_spec(config),
        K_alpha1=config.K,
        threads=config.threads,
    )
    return _result(reports)


def run_stability(config: RunConfig, model: Model) -> CommandResult:
    if config.paths is not None:
        paths = load_paths(config.paths, model.graph)
        if len(paths) % 2:
            raise ConfigurationError("--paths for stability needs an even number of paths")
        pairs = list(zip(paths[::2], paths[1::2], strict=True))
    else:
        pairs = quasi_geodesic_pairs(
            model.graph, _endpoint_pairs(config, model), seed=config.seed
        )
    params = TransientParams(mu=config.mu, c=config.c)
    report = check_transient_stability(
        model.graph, model.family, params, pairs, threads=config.threads
    )
    return _result([report])


def run_gg(config: RunConfig, model: Model) -> CommandResult:
    if config.gg_family is not None:
        family = load_gg_family(config.gg_family, model.graph)
    else:
        pool = VertexSet(tuple(_pool(config, model)))
        params = TransientParams(mu=config.mu, c=config.c)
        family = geodesic_family(model.graph, model.family, pool, params)
    audit = gg_condition_audit(
        model.graph,
        model.family,
        family,
        K_alpha1=config.K,
        cap=config.cap,
        spec=sample_spec(config),
        threads=config.threads,
    )
    return CommandResult(
        payloads=list(audit.reports), verdict="plausible" if audit.plausible else "violation"
    )


# ---------------------------------------------------------------------------
# Derived-space audits
# ---------------------------------------------------------------------------


def run_rh1(config: RunConfig, model: Model) -> CommandResult:
    bow = build_bowditch(
        model.graph, model.family, _k(config, 2.0), config.R_net, config.depth,
        profile_seed=config.seed or 0,
    )
    report = check_rh1(bow, sample_spec(config), count=config.count, threads=config.threads)
    return _result([report])


def run_rh2(config: RunConfig, model: Model) -> CommandResult:
    coned = build_coned_off(model.graph, model.family, _k(config, 1.0))
    rh2, bcps = check_rh2(
        coned,
        sample_spec(config),
        L_values=config.L_grid,
        cap=config.cap,
        count=config.count,
        threads=config.threads,
    )
    return _result([rh2, *bcps])


def _loaded_pairs(config: RunConfig) -> list[tuple[StandardPath, StandardPath]]:
    return [(load_standard_path(a), load_standard_path(b)) for a, b in config.pairs]


def run_bcp(config: RunConfig, model: Model) -> CommandResult:
    coned = build_coned_off(model.graph, model.family, _k(config, 1.0))
    if config.pairs:
        pairs = _loaded_pairs(config)
        for first, second in pairs:
            validate_standard_path(coned, first)
            validate_standard_path(coned, second)
    else:
        pairs = candidate_pairs(coned, _endpoint_pairs(config, model))
    report = check_bcp(coned, pairs, cap=config.cap, threads=config.threads)
    spec = sample_spec(config)
    report = report.model_copy(update={"seed": spec.recorded_seed if spec else None})
    return _result([report])


CHECKS: dict[str, CheckHandler] = {
    "alpha1": run_alpha1,
    "alpha2": run_alpha2,
    "proj": run_proj,
    "rh0": run_rh0,
    "rh1": run_rh1,
    "rh2": run_rh2,
    "rh3": run_rh3,
    "bcp": run_bcp,
    "gg": run_gg,
    "stability": run_stability,
}


def run_check(config: RunConfig, model: Model) -> CommandResult:
    assert config.check is not None
    return CHECKS[config.check](config, model)
