"""Resolve a run configuration into an ambient graph and peripheral family."""

from __future__ import annotations

from dataclasses import dataclass

from relhyp.models.groups import CayleyBall, CosetSpec, GroupSpec
from relhyp.models.peripherals import EMPTY_FAMILY, PeripheralFamily
from relhyp.models.run_config import ConfigurationError, RunConfig
from relhyp.services.cayley import build_ball, parse_group_expression, peripheral_cosets
from relhyp.services.graph_io import load_family, load_graph, load_group_config
from relhyp.services.metric_graph import MetricGraph


@dataclass(frozen=True)
class Model:
    graph: MetricGraph
    family: PeripheralFamily
    ball: CayleyBall | None = None
    radius: int | None = None


def coset_spec(text: str) -> CosetSpec:
    """``a`` or ``aA`` for every coset of <a>; ``a:bab`` for the coset through ``bab``."""
    letters, _, rep = text.partition(":")
    if not letters:
        raise ConfigurationError(f"empty subgroup in coset request {text!r}")
    closed = sorted(set(letters) | {x.swapcase() for x in letters})
    return CosetSpec(subgroup=tuple(closed), representative=rep or None)


def _group(config: RunConfig) -> tuple[GroupSpec, list[CosetSpec]]:
    if config.group_config is not None:
        spec, cosets = load_group_config(config.group_config)
    else:
        assert config.group is not None
        spec, cosets = parse_group_expression(config.group), []
    return spec, [*cosets, *(coset_spec(c) for c in config.cosets)]


def load_model(config: RunConfig, radius: int | None = None) -> Model:
    """Ball plus coset family for group inputs, loaded files otherwise."""
    if config.from_group:
        if radius is None:
            raise ConfigurationError("group inputs need --radius or --radii")
        spec, coset_specs = _group(config)
        ball = build_ball(spec, radius)
        family = (
            peripheral_cosets(spec, ball, coset_specs, config.min_coset_size)
            if coset_specs
            else EMPTY_FAMILY
        )
        return Model(graph=ball.graph, family=family, ball=ball, radius=radius)

    if config.graph is None:
        raise ConfigurationError("no model given: pass --family, --group-config or --graph")
    if config.radii:
        raise ConfigurationError("--radii needs a group input")
    graph = load_graph(config.graph)
    family = load_family(config.peripherals, graph) if config.peripherals else EMPTY_FAMILY
    return Model(graph=graph, family=family)
