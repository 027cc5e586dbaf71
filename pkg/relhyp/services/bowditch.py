"""Combinatorial horoballs glued along peripheral nets, and the (RH1) check.

Vertex layout of a Bowditch space: ambient vertices keep their ids
``0..n-1``; then, member by member, horoball levels ``1..depth`` of the
member's approximation graph, ``size`` ids per level.  Level 0 of every
horoball is the net itself inside the ambient graph.
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace

import numpy as np

from relhyp.core.errors import ParameterError, RelHypError
from relhyp.core.logging import EVENT_CHECK_STARTED, EVENT_SPACE_BUILT, log_event
from relhyp.core.settings import settings
from relhyp.models.graph import Edge, PathInSpace, VertexSet
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.reports import ConstantsReport, Witness
from relhyp.models.spaces import ApproximationGraph, BackRef, BowditchSpace, Horoball
from relhyp.models.transient import TransientParams
from relhyp.services.metric_graph import (
    DisconnectedGraphError,
    MetricGraph,
    four_point_estimate,
    geodesic,
    graph_diameter,
    interior_vertices,
    maximal_net,
    measure_quasi_geodesic,
    path_from_vertices,
    small_hausdorff,
)
from relhyp.services.sampling import SampleSpec, log_outcome, subsample
from relhyp.services.transient import decompose

logger = logging.getLogger(__name__)

_PROFILE_POOL = 64


class NetDisconnectedError(RelHypError):
    """The approximation graph of a member is not connected at radius R."""

    error_category = "input"

    def __init__(self, message: str, witness: tuple[int, int], member: int | None = None):
        super().__init__(message)
        self.witness = witness
        self.member = member


# ---------------------------------------------------------------------------
# Horoballs and approximation graphs
# ---------------------------------------------------------------------------


def _horoball_edges(
    base: MetricGraph, depth: int, vertex: dict[tuple[int, int], int]
) -> list[Edge]:
    """Vertical unit edges and horizontal edges shrunk by e^{-level}."""
    edges: list[Edge] = []
    for level in range(depth + 1):
        scale = math.exp(-level)
        edges.extend(
            Edge(vertex[(e.u, level)], vertex[(e.v, level)], scale * e.length) for e in base.edges
        )
        if level < depth:
            edges.extend(
                Edge(vertex[(v, level)], vertex[(v, level + 1)], 1.0)
                for v in range(base.vertex_count)
            )
    return edges


def build_horoball(base: MetricGraph, depth: int) -> Horoball:
    """Truncated horoball on ``base``: ``|V|(depth+1)`` vertices."""
    if depth < 1:
        raise ParameterError(f"horoball depth must be >= 1, got {depth}")
    n = base.vertex_count
    vertex = {(v, level): level * n + v for level in range(depth + 1) for v in range(n)}
    graph = MetricGraph(n * (depth + 1), _horoball_edges(base, depth, vertex))
    return Horoball(base=base, depth=depth, graph=graph)


def build_approximation_graph(
    g: MetricGraph, P: VertexSet, k: float, R: float, *, member: int | None = None
) -> ApproximationGraph:
    """Maximal k-net of ``P`` with an edge of length R between net points within R."""
    if R <= 0:
        raise ParameterError(f"connection radius must be positive, got {R}")
    net = maximal_net(g, P, k)
    members = list(net.members)
    dist = g.pairwise_distances(members)
    close = np.argwhere(np.triu(dist <= R + settings.distance_tolerance, 1))
    edges = [(int(i), int(j), float(R)) for i, j in close]
    try:
        graph = MetricGraph(len(members), edges)
    except DisconnectedGraphError as exc:
        a, b = exc.witness
        raise NetDisconnectedError(
            f"net of member {member if member is not None else '?'} is disconnected at R={R}: "
            f"vertices {members[a]} and {members[b]} lie in different components",
            witness=(members[a], members[b]),
            member=member,
        ) from exc
    return ApproximationGraph(net=net, radius=float(R), graph=graph, member=member)


def default_depth(approximations: list[ApproximationGraph]) -> int:
    """ceil(log2(largest base diameter)) + 2."""
    diam = max((graph_diameter(a.graph) for a in approximations), default=1.0)
    return math.ceil(math.log2(diam)) + 2 if diam > 1 else 2


# ---------------------------------------------------------------------------
# The Bowditch space
# ---------------------------------------------------------------------------


def build_bowditch(
    g: MetricGraph,
    fam: PeripheralFamily,
    k: float = 2.0,
    R: float = 2.0,
    depth: int | None = None,
    *,
    profile_seed: int = 0,
) -> BowditchSpace:
    """Glue a truncated horoball along the net of every member."""
    approximations = [
        build_approximation_graph(g, member, k, R, member=i) for i, member in enumerate(fam)
    ]
    depth = default_depth(approximations) if depth is None else depth
    if depth < 1:
        raise ParameterError(f"horoball depth must be >= 1, got {depth}")

    n = g.vertex_count
    edges: list[Edge] = list(g.edges)
    backmap = [BackRef(None, 0, v) for v in range(n)]
    offset = n
    for i, approx in enumerate(approximations):
        size = approx.graph.vertex_count
        vertex = {(j, 0): approx.x_vertex(j) for j in range(size)}
        for level in range(1, depth + 1):
            for j in range(size):
                vertex[(j, level)] = offset + (level - 1) * size + j
                backmap.append(BackRef(i, level, approx.x_vertex(j)))
        edges.extend(_horoball_edges(approx.graph, depth, vertex))
        offset += depth * size

    graph = MetricGraph(offset, edges, merge_parallel=True)
    truncation = math.exp(-depth) * max(
        (graph_diameter(a.graph) for a in approximations), default=0.0
    )
    bow = BowditchSpace(
        ambient=g,
        family=fam,
        approximations=tuple(approximations),
        depth=depth,
        graph=graph,
        backmap=tuple(backmap),
        truncation_error=truncation,
    )
    bow = replace(bow, distortion=distortion_profile(bow, profile_seed))
    log_event(logger, "info", EVENT_SPACE_BUILT, space="bowditch", vertices=graph.vertex_count,
              edges=len(graph.edges), members=len(fam), depth=depth, k=k, R=R,
              truncation_error=round(truncation, 9))
    return bow


def distortion_profile(bow: BowditchSpace, seed: int = 0) -> tuple[tuple[float, float], ...]:
    """Monotone bound ``d_X <= g(d_Bow)`` on sampled ambient vertices.

    Entry ``(b, m)``: every sampled pair with ``d_Bow <= b`` has ``d_X <= m``.
    """
    sample = subsample(range(bow.ambient.vertex_count), _PROFILE_POOL, seed)
    if len(sample) < 2:
        return ()
    d_bow = bow.graph.pairwise_distances(sample)
    d_x = bow.ambient.pairwise_distances(sample)
    upper = np.triu_indices(len(sample), 1)
    buckets = np.ceil(d_bow[upper] - settings.distance_tolerance)
    profile: list[tuple[float, float]] = []
    running = 0.0
    for bucket in np.unique(buckets):
        running = max(running, float(np.max(d_x[upper][buckets == bucket])))
        profile.append((float(bucket), running))
    return tuple(profile)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_rh1(
    bow: BowditchSpace,
    spec: SampleSpec | None = None,
    *,
    pool: VertexSet | None = None,
    count: int = 2000,
    threads: int | None = None,
) -> ConstantsReport:
    """Four-point delta of the Bowditch graph over ambient interior vertices.

    Exhaustive up to ``settings.exhaustive_quadruple_limit`` pool vertices,
    seeded sampling above.
    """
    pool = interior_vertices(bow.ambient) if pool is None else pool
    exhaustive = len(pool) <= settings.exhaustive_quadruple_limit
    seed = None if exhaustive else (spec.seed if spec is not None and spec.seed is not None else 0)
    log_event(logger, "info", EVENT_CHECK_STARTED, check="rh1",
              vertices=bow.graph.vertex_count, pool=len(pool),
              mode="exhaustive" if exhaustive else "sample", seed=seed)
    if len(pool) < 4:
        return log_outcome(logger, ConstantsReport(
            condition="rh1", constants={"delta": 0.0}, status="no-admissible-pairs",
            details={"pool": len(pool)},
        ))
    estimate = four_point_estimate(
        bow.graph,
        mode="exhaustive" if exhaustive else "sample",
        count=max(count, spec.count if spec is not None else 0),
        seed=seed,
        pool=list(pool.members),
        threads=threads,
    )
    witness = Witness(symbol="delta", value=estimate.delta,
                      vertices=estimate.quadruple or (), note="four-point quadruple")
    report = ConstantsReport(
        condition="rh1",
        constants={"delta": estimate.delta},
        witnesses=[witness],
        samples=estimate.inspected,
        seed=estimate.seed,
        mode=estimate.mode,
        details={
            "vertices": bow.graph.vertex_count,
            "depth": bow.depth,
            "truncation_error": bow.truncation_error,
            "distortion": [list(p) for p in bow.distortion],
        },
    )
    return log_outcome(logger, report)


def bowditch_trace(bow: BowditchSpace, x: int, y: int) -> tuple[int, ...]:
    """Ambient vertices on the canonical Bowditch geodesic from x to y."""
    bow.ambient.check_vertex(x)
    bow.ambient.check_vertex(y)
    path = geodesic(bow.graph, x, y)
    return tuple(sorted({v for v in path.vertices if bow.is_x_vertex(v)}))


def trace_vs_transient(
    bow: BowditchSpace,
    fam: PeripheralFamily,
    x: int,
    y: int,
    mu: float,
    R: float,
) -> float:
    """d_X-Hausdorff distance between the Bowditch trace and trans_{mu,R}([x,y])."""
    trace = bowditch_trace(bow, x, y)
    dec = decompose(bow.ambient, fam, geodesic(bow.ambient, x, y), TransientParams(mu=mu, c=R))
    return small_hausdorff(bow.ambient, trace, dec.transient_vertices().members)


def devertical(bow: BowditchSpace, path: PathInSpace) -> tuple[PathInSpace, int]:
    """Replace every excursion off the ambient graph by an ambient geodesic.

    Consecutive ambient vertices joined only through a horoball edge count
    as an excursion too.  Returns the ambient path and the least K making
    it a (K, K)-quasi-geodesic.
    """
    g = bow.ambient
    if not (bow.is_x_vertex(path.start) and bow.is_x_vertex(path.end)):
        raise ParameterError("devertical needs a path with ambient endpoints")
    stops = [v for v in path.vertices if bow.is_x_vertex(v)]
    vertices = [stops[0]]
    for a, b in zip(stops, stops[1:], strict=False):
        if a == b:
            continue
        if g.has_edge(a, b):
            vertices.append(b)
        else:
            vertices.extend(geodesic(g, a, b).vertices[1:])
    result = path_from_vertices(g, vertices)
    K = measure_quasi_geodesic(g, result)
    return PathInSpace(result.vertices, result.cumulative_length,
                       quasi_constants=(float(K), float(K))), K
