"""Handler for ``treeapprox``: build a tree-graded approximation or verify a saved one."""

from __future__ import annotations

from relhyp.cli.commands.result import CommandResult
from relhyp.cli.inputs import Model
from relhyp.models.graph import VertexSet
from relhyp.models.reports import ConstantsReport, Payload, Witness
from relhyp.models.run_config import RunConfig
from relhyp.models.spaces import Configuration, TreeGradedSpace
from relhyp.models.transient import TransientParams
from relhyp.services.graph_io import dump_tree_graded, load_tree_graded
from relhyp.services.metric_graph import interior_vertices
from relhyp.services.sampling import subsample
from relhyp.services.tree_approx import (
    TreeRealizationError,
    build_tree_graded_approx,
    verify_tree_graded,
)

CONFIGURATION_SIZE = 4


def verdict_report(space: TreeGradedSpace) -> ConstantsReport:
    """(T1)/(T2) outcome of ``space`` as a report; a failure carries its witness."""
    verdict = verify_tree_graded(space)
    constants = {
        "pieces": float(len(space.pieces)),
        "vertices": float(space.graph.vertex_count),
    }
    if verdict.ok:
        return ConstantsReport(condition="tree-graded", constants=constants)
    if verdict.rule == "T1":
        assert verdict.pieces is not None
        witness = Witness(symbol="T1", value=1.0, members=verdict.pieces,
                          note="pieces share more than one vertex")
    else:
        witness = Witness(symbol="T2", value=float(len(verdict.cycle)),
                          vertices=verdict.cycle, note="cycle outside every piece")
    return ConstantsReport(
        condition="tree-graded", constants=constants, violations=[witness], status="violation"
    )


def _configuration(config: RunConfig, model: Model) -> Configuration:
    if config.points or config.members:
        return Configuration(VertexSet(config.points), tuple(config.members))
    interior = interior_vertices(model.graph, 0, config.margin)
    points = subsample(interior.members, CONFIGURATION_SIZE, config.seed)
    return Configuration(VertexSet(tuple(points)))


def run_treeapprox(config: RunConfig, model: Model) -> CommandResult:
    if config.tree_graded is not None:
        return CommandResult(payloads=[verdict_report(load_tree_graded(config.tree_graded))])

    conf = _configuration(config, model)
    try:
        space, embedding = build_tree_graded_approx(
            model.graph,
            model.family,
            conf,
            TransientParams(mu=config.mu, c=config.c),
            k=1.0 if config.k is None else config.k,
            R=config.R_net,
        )
    except TreeRealizationError as exc:
        failure = ConstantsReport(
            condition="tree-realization",
            constants={"defect": exc.defect},
            violations=[Witness(symbol="defect", value=exc.defect, vertices=exc.quadruple,
                                note=str(exc))],
            status="violation",
            details={"points": list(conf.points.members),
                     "members": list(conf.peripheral_indices)},
        )
        return CommandResult(payloads=[failure], verdict="violation")

    payloads: list[Payload] = [embedding, verdict_report(space)]
    artifacts = {config.save_graph: dump_tree_graded(space)} if config.save_graph else {}
    return CommandResult(payloads=payloads, artifacts=artifacts)
