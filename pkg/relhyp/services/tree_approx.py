"""Transient hulls of finite configurations and their tree-graded approximations.

The approximation contracts every peripheral set the hull touches to a
single marker, realizes the contracted landmark metric as a weighted tree
and then blows each marker up into the member's approximation graph, with
every tree branch reattached at its projection onto the member.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np
import numpy.typing as npt

from relhyp.core.errors import ParameterError, RelHypError
from relhyp.core.logging import (
    EVENT_CHECK_COMPLETED,
    EVENT_CHECK_STARTED,
    EVENT_SPACE_BUILT,
    log_event,
)
from relhyp.core.settings import settings
from relhyp.models.graph import Edge, VertexSet
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.reports import EmbeddingReport, Witness
from relhyp.models.spaces import Configuration, Piece, TreeGradedSpace, TreeGradedVerdict
from relhyp.models.transient import TransientParams
from relhyp.services.bowditch import build_approximation_graph
from relhyp.services.metric_graph import (
    MetricGraph,
    four_point_defect,
    maximal_net,
    to_networkx,
)
from relhyp.services.peripherals import nearest_point
from relhyp.services.transient import TransientCache

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


class TreeRealizationError(RelHypError):
    """The landmark metric is further than the tolerance from every tree metric."""

    error_category = "domain"

    def __init__(self, message: str, quadruple: tuple[int, int, int, int], defect: float):
        super().__init__(message)
        self.quadruple = quadruple
        self.defect = defect


# ---------------------------------------------------------------------------
# Transient hull
# ---------------------------------------------------------------------------


def _validate_configuration(fam: PeripheralFamily, conf: Configuration) -> None:
    if conf.cardinality < 1:
        raise ParameterError("a configuration needs at least one point or member")
    for i in conf.peripheral_indices:
        if not 0 <= i < len(fam):
            raise ParameterError(f"configuration names member {i}, family has {len(fam)}")


def _member_nets(
    g: MetricGraph, fam: PeripheralFamily, conf: Configuration, k: float
) -> dict[int, VertexSet]:
    return {i: maximal_net(g, fam[i], k) for i in sorted(set(conf.peripheral_indices))}


def _representatives(conf: Configuration, nets: dict[int, VertexSet]) -> list[int]:
    reps = set(conf.points.members)
    for net in nets.values():
        reps.update(net.members)
    return sorted(reps)


def transient_hull(
    g: MetricGraph,
    fam: PeripheralFamily,
    conf: Configuration,
    params: TransientParams | None = None,
    *,
    k: float = 1.0,
    cache: TransientCache | None = None,
) -> VertexSet:
    """Configuration points, member nets, and the transient points of the
    canonical geodesics between every two of them."""
    _validate_configuration(fam, conf)
    if conf.points:
        g.check_vertex_set(conf.points)
    params = TransientParams() if params is None else params
    cache = TransientCache(g, fam, params) if cache is None else cache
    reps = _representatives(conf, _member_nets(g, fam, conf, k))
    hull = set(reps)
    for x, y in combinations(reps, 2):
        hull.update(cache.transient(x, y))
    return VertexSet(sorted(hull))


# ---------------------------------------------------------------------------
# Tree realization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeRealization:
    """Weighted tree whose node ``position[i]`` stands for point ``i``."""

    graph: MetricGraph
    position: tuple[int, ...]
    defect: float


def _worst_quadruple(
    metric: FloatArray, i: int, j: int
) -> tuple[tuple[int, int, int, int], float]:
    m = len(metric)
    best: tuple[int, int, int, int] = (i, j, i, j)
    worst = 0.0
    others = [v for v in range(m) if v not in (i, j)]
    for a, b in combinations(others, 2):
        value = four_point_defect(
            metric[i, j], metric[a, b], metric[i, a], metric[j, b], metric[i, b], metric[j, a]
        )
        if value > worst:
            worst, best = value, (i, j, a, b)
    return best, worst


def realize_tree_metric(
    metric: Sequence[Sequence[float]] | FloatArray,
    *,
    tolerance: float | None = None,
) -> TreeRealization:
    """Insert points one at a time where their Gromov products place them.

    Point ``k`` branches off the path from point 0 to the earlier point
    ``j`` maximizing ``(k|j)_0``, at distance ``(k|j)_0`` from point 0.
    The result is exact on tree metrics; otherwise the largest distance
    error must stay within ``tolerance`` (default ``settings.tree_tolerance``).
    """
    d = np.asarray(metric, dtype=np.float64)
    m = len(d)
    if m == 0:
        raise ParameterError("tree realization needs at least one point")
    tolerance = settings.tree_tolerance if tolerance is None else tolerance
    tol = settings.distance_tolerance

    tree = nx.Graph()
    tree.add_node(0)
    position = [0]
    next_node = 1

    for k in range(1, m):
        products = [(d[k, 0] + d[j, 0] - d[k, j]) / 2 for j in range(k)]
        j = max(range(k), key=lambda i: (products[i], -i))
        route = nx.shortest_path(tree, position[0], position[j], weight="length")
        reach = min(max(products[j], 0.0), d[j, 0])

        attach = route[-1]
        walked = 0.0
        for u, v in zip(route, route[1:], strict=False):
            length = tree[u][v]["length"]
            if reach <= walked + tol:
                attach = u
                break
            if reach < walked + length - tol:
                attach = next_node
                next_node += 1
                tree.remove_edge(u, v)
                tree.add_edge(u, attach, length=reach - walked)
                tree.add_edge(attach, v, length=walked + length - reach)
                break
            walked += length

        pendant = d[k, 0] - reach
        if pendant <= tol:
            position.append(attach)
        else:
            tree.add_edge(attach, next_node, length=pendant)
            position.append(next_node)
            next_node += 1

    edges = [(u, v, data["length"]) for u, v, data in tree.edges(data=True)]
    graph = MetricGraph(next_node, edges)
    errors = np.abs(graph.pairwise_distances(position) - d)
    defect = float(np.max(errors)) if m > 1 else 0.0
    if defect > tolerance + tol:
        i, j = np.unravel_index(int(np.argmax(errors)), errors.shape)
        quad, four_point = _worst_quadruple(d, int(i), int(j))
        raise TreeRealizationError(
            f"landmark metric is not tree-like: error {defect:g} exceeds {tolerance:g} "
            f"(four-point defect {four_point:g})",
            quadruple=quad,
            defect=defect,
        )
    return TreeRealization(graph=graph, position=tuple(position), defect=defect)


# ---------------------------------------------------------------------------
# Tree-graded approximation
# ---------------------------------------------------------------------------


def _touched_members(
    cache: TransientCache,
    fam: PeripheralFamily,
    reps: Sequence[int],
    hull: VertexSet,
    marked: set[int],
) -> list[int]:
    """Marked members, members holding a deep run and members the hull meets twice."""
    touched = set(marked)
    for x, y in combinations(reps, 2):
        touched.update(c.member for c in cache.decomposition(x, y).deep_components)
    touched.update(i for i, member in enumerate(fam) if len(hull.intersection(member)) >= 2)
    return sorted(touched)


def _landmark_metric(
    g: MetricGraph, fam: PeripheralFamily, plain: Sequence[int], markers: Sequence[int]
) -> FloatArray:
    """Landmark distances with every marker's member contracted to a point.

    Ambient distances between plain landmarks and set distances to and
    between members, closed under paths through the markers.
    """
    p = len(plain)
    size = p + len(markers)
    d = np.zeros((size, size))
    if p:
        d[:p, :p] = g.pairwise_distances(list(plain))
    rows = [g.distances_to_set(fam[m]) for m in markers]
    for a, row in enumerate(rows):
        if p:
            d[p + a, :p] = d[:p, p + a] = row[list(plain)]
        for b in range(a):
            gap = float(np.min(row[fam[markers[b]].as_array()]))
            d[p + a, p + b] = d[p + b, p + a] = gap
    for via in range(p, size):
        np.minimum(d, d[:, via, None] + d[None, via, :], out=d)
    return d


def _anchor(g: MetricGraph, net: VertexSet, landmarks: Sequence[int]) -> int:
    """Net point with the least total distance to the plain landmarks."""
    if not landmarks:
        return net.members[0]
    block = g.distance_rows(list(landmarks))[:, net.as_array()]
    return net.members[int(np.argmin(block.sum(axis=0)))]


def _attachments(
    g: MetricGraph,
    fam: PeripheralFamily,
    realization: TreeRealization,
    plain: Sequence[int],
    markers: Sequence[int],
    a: int,
    net: VertexSet,
) -> list[tuple[int, int]]:
    """``(neighbour node, net position)`` for every tree edge at marker ``a``'s node.

    A branch hangs off the projection of its landmark nearest to the marker;
    a branch led by another marker hangs off the net point nearest to that
    member.
    """
    p = len(plain)
    tree = realization.graph
    node = realization.position[p + a]
    owner: dict[int, int] = {}
    for i, pos in enumerate(realization.position):
        owner.setdefault(pos, i)
    from_node = tree.distance_rows([node])[0]
    cut = to_networkx(tree)
    cut.remove_node(node)
    out: list[tuple[int, int]] = []
    for neighbour, _ in tree.neighbors(node):
        branch = nx.node_connected_component(cut, neighbour)
        leaders = sorted((float(from_node[pos]), i) for pos, i in owner.items() if pos in branch)
        if not leaders:
            continue
        lead = leaders[0][1]
        if lead < p:
            target = nearest_point(g, plain[lead], net)
        else:
            row = g.distances_to_set(fam[markers[lead - p]])
            target = net.members[int(np.argmin(row[net.as_array()]))]
        out.append((neighbour, net.members.index(target)))
    return out


def build_tree_graded_approx(
    g: MetricGraph,
    fam: PeripheralFamily,
    conf: Configuration,
    params: TransientParams | None = None,
    *,
    k: float = 1.0,
    R: float = 2.0,
    tolerance: float | None = None,
    n_max: int | None = None,
) -> tuple[TreeGradedSpace, EmbeddingReport]:
    """Tree-graded space approximating the transient hull of ``conf``.

    ``f`` sends plain hull vertices to their tree node and hull vertices of
    a touched member to their nearest net point in that member's piece.  Tree
    branches at a member's node are moved to the projection of the branch
    onto the member's net.
    """
    n_max = settings.n_max_configuration if n_max is None else n_max
    _validate_configuration(fam, conf)
    if conf.cardinality > n_max:
        raise ParameterError(f"configuration has {conf.cardinality} items, limit is {n_max}")
    params = TransientParams() if params is None else params
    log_event(logger, "info", EVENT_CHECK_STARTED, check="treeapprox",
              cardinality=conf.cardinality, mu=params.mu, c=params.c, k=k, R=R)

    cache = TransientCache(g, fam, params)
    nets = _member_nets(g, fam, conf, k)
    reps = _representatives(conf, nets)
    hull = transient_hull(g, fam, conf, params, k=k, cache=cache)
    markers = _touched_members(cache, fam, reps, hull, set(nets))
    approximations = {
        m: build_approximation_graph(g, fam[m], k, R, member=m) for m in markers
    }
    inside = {m: [v for v in hull.members if v in fam[m]] for m in markers}
    collapsed = {v for vs in inside.values() for v in vs}
    plain = [v for v in hull.members if v not in collapsed]

    try:
        realization = realize_tree_metric(
            _landmark_metric(g, fam, plain, markers), tolerance=tolerance
        )
    except TreeRealizationError as exc:
        # report ambient vertices; a marker stands in as its least net point
        landmarks = [*plain, *(approximations[m].net.members[0] for m in markers)]
        a, b, c, d = (landmarks[i] for i in exc.quadruple)
        raise TreeRealizationError(str(exc), quadruple=(a, b, c, d), defect=exc.defect) from exc

    p = len(plain)
    offset = realization.graph.vertex_count
    moved: dict[tuple[int, int], int] = {}
    piece_edges: list[Edge] = []
    pieces: list[Piece] = []
    mapping = {v: realization.position[i] for i, v in enumerate(plain)}
    claimed: set[int] = set()
    for a, m in enumerate(markers):
        approx = approximations[m]
        node = realization.position[p + a]
        attachments = (
            [] if node in claimed
            else _attachments(g, fam, realization, plain, markers, a, approx.net)
        )
        claimed.add(node)
        if attachments:
            anchor = attachments[0][1]
        else:
            anchor = approx.net.members.index(_anchor(g, approx.net, plain))
        ids = []
        for i in range(approx.graph.vertex_count):
            if i == anchor:
                ids.append(node)
            else:
                ids.append(offset)
                offset += 1
        for neighbour, position in attachments:
            if position != anchor:
                moved[(node, neighbour)] = ids[position]
        piece_edges.extend(Edge(ids[e.u], ids[e.v], e.length) for e in approx.graph.edges)
        pieces.append(Piece(VertexSet(sorted(ids)), m))
        net = approx.net
        for v in inside[m]:
            target = v if v in net else nearest_point(g, v, net)
            mapping[v] = ids[net.members.index(target)]

    tree_edges = tuple(
        Edge(moved.get((e.u, e.v), e.u), moved.get((e.v, e.u), e.v), e.length)
        for e in realization.graph.edges
    )
    graph = MetricGraph(offset, [*tree_edges, *piece_edges])
    space = TreeGradedSpace(graph=graph, pieces=tuple(pieces), tree_edges=tree_edges)
    log_event(logger, "info", EVENT_SPACE_BUILT, space="tree_graded", vertices=offset,
              pieces=len(pieces), hull=len(hull), landmarks=p + len(markers))
    report = measure_embedding(g, graph, mapping, tree_defect=realization.defect)
    log_event(logger, "info", EVENT_CHECK_COMPLETED, check="treeapprox", status="ok",
              c_mul=round(report.c_mul, 6), c_add=round(report.c_add, 6), pairs=report.pairs)
    return space, report


def measure_embedding(
    g: MetricGraph,
    target: MetricGraph,
    mapping: dict[int, int],
    *,
    tree_defect: float = 0.0,
) -> EmbeddingReport:
    """Least ``C_mul`` (over pairs at distance >= 1 in both spaces) and then the
    ``C_add`` making ``d / C_mul - C_add <= d_T <= C_mul d + C_add`` on all pairs."""
    sources = sorted(mapping)
    if len(sources) < 2:
        return EmbeddingReport(mapping=mapping, tree_defect=tree_defect)
    images = [mapping[v] for v in sources]
    d = g.pairwise_distances(sources)
    t = target.pairwise_distances(images)
    upper = np.triu_indices(len(sources), 1)
    dx, dt = d[upper], t[upper]

    tol = settings.distance_tolerance
    both = (dx >= 1 - tol) & (dt >= 1 - tol)
    ratios = np.where(both, np.maximum(dx, dt) / np.maximum(np.minimum(dx, dt), 1.0), 1.0)
    r = int(np.argmax(ratios))
    c_mul = max(float(ratios[r]), 1.0)
    slack = np.maximum(dt - c_mul * dx, dx / c_mul - dt)
    s = int(np.argmax(slack))
    c_add = max(float(slack[s]), 0.0)
    if c_add <= tol:
        c_add = 0.0

    def pair(index: int) -> tuple[int, int]:
        return sources[int(upper[0][index])], sources[int(upper[1][index])]

    witnesses = [
        Witness(symbol="C_mul", value=c_mul, vertices=pair(r),
                note=f"d={dx[r]:g} d_T={dt[r]:g}"),
        Witness(symbol="C_add", value=c_add, vertices=pair(s),
                note=f"d={dx[s]:g} d_T={dt[s]:g}"),
    ]
    return EmbeddingReport(
        mapping=mapping,
        c_mul=c_mul,
        c_add=c_add,
        pairs=len(dx),
        witnesses=witnesses,
        tree_defect=tree_defect,
    )


def approximation_sensitivity(
    g: MetricGraph,
    fam: PeripheralFamily,
    conf: Configuration,
    grid: Sequence[TransientParams],
    *,
    k: float = 1.0,
    R: float = 2.0,
) -> list[tuple[TransientParams, EmbeddingReport | None]]:
    """Embedding constants across (mu, c) choices; ``None`` where realization fails."""
    out: list[tuple[TransientParams, EmbeddingReport | None]] = []
    for params in grid:
        try:
            _, report = build_tree_graded_approx(g, fam, conf, params, k=k, R=R)
        except TreeRealizationError as exc:
            logger.info("tree_realization_failed: mu=%g c=%g defect=%g",
                        params.mu, params.c, exc.defect)
            report = None
        out.append((params, report))
    return out


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def verify_tree_graded(space: TreeGradedSpace) -> TreeGradedVerdict:
    """Pieces meet in at most one vertex and every basis cycle lies in one piece."""
    for (i, a), (j, b) in combinations(enumerate(space.pieces), 2):
        if len(a.vertices.intersection(b.vertices)) > 1:
            return TreeGradedVerdict(ok=False, rule="T1", pieces=(i, j))
    for cycle in nx.cycle_basis(to_networkx(space.graph)):
        if not any(all(v in piece.vertices for v in cycle) for piece in space.pieces):
            return TreeGradedVerdict(ok=False, rule="T2", cycle=tuple(sorted(cycle)))
    return TreeGradedVerdict(ok=True)
