"""Coned-off space, standard paths, bounded coset penetration and (RH2).

Component edges have length 1 in the coned metric and keep their ambient
length ``d_X(x, y)`` alongside, so both metrics stay queryable.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Sequence
from itertools import combinations
from typing import NamedTuple

from relhyp.core.errors import ParameterError, RelHypError
from relhyp.core.logging import (
    EVENT_CHECK_COMPLETED,
    EVENT_CHECK_STARTED,
    EVENT_CHECK_VIOLATION,
    EVENT_SPACE_BUILT,
    log_event,
)
from relhyp.core.settings import settings
from relhyp.models.graph import PathInSpace, VertexSet
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.reports import BCPOutcome, BCPReport, ConstantsReport, Witness
from relhyp.models.spaces import (
    Component,
    ComponentEdge,
    ConedOffSpace,
    Segment,
    StandardPath,
    StandardPathAnalysis,
    StandardPiece,
)
from relhyp.models.transient import TransientParams
from relhyp.services.metric_graph import (
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
from relhyp.services.parallel import parallel_map
from relhyp.services.peripherals import nearest_point
from relhyp.services.sampling import SampleSpec, auto_spec, log_outcome, sample_pairs
from relhyp.services.transient import decompose

logger = logging.getLogger(__name__)

DEFAULT_L_GRID: tuple[float, ...] = (2.0, 4.0)


class MalformedStandardPathError(RelHypError):
    error_category = "input"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def build_coned_off(g: MetricGraph, fam: PeripheralFamily, k: float = 1.0) -> ConedOffSpace:
    """Join every two net points of a member by a unit component edge."""
    if k <= 0:
        raise ParameterError(f"net spacing must be positive, got {k}")
    nets = tuple(maximal_net(g, member, k) for member in fam)
    components: list[ComponentEdge] = []
    index: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i, net in enumerate(nets):
        members = list(net.members)
        if len(members) < 2:
            continue
        dist = g.pairwise_distances(members)
        for a, b in combinations(range(len(members)), 2):
            x, y = members[a], members[b]
            components.append(ComponentEdge(i, x, y, float(dist[a, b])))
            index[(x, y)].append(i)
    edges = [*g.edges, *((c.x, c.y, 1.0) for c in components)]
    graph = MetricGraph(g.vertex_count, edges, labels=g.labels, merge_parallel=True)
    log_event(logger, "info", EVENT_SPACE_BUILT, space="coned_off", vertices=g.vertex_count,
              components=len(components), members=len(fam), k=k)
    return ConedOffSpace(
        ambient=g,
        family=fam,
        nets=nets,
        components=tuple(components),
        graph=graph,
        component_index={key: tuple(v) for key, v in index.items()},
    )


def _uses_component(coned: ConedOffSpace, a: int, b: int) -> int | None:
    """Member of the component edge a step a->b of a coned path runs along, if any."""
    owners = coned.component_members(a, b)
    if not owners:
        return None
    x_length = coned.ambient.edge_length(a, b)
    if x_length is not None and x_length <= 1.0 + settings.distance_tolerance:
        return None
    return min(owners)


# ---------------------------------------------------------------------------
# Standard paths
# ---------------------------------------------------------------------------


def analyze_standard_path(sp: StandardPath) -> StandardPathAnalysis:
    """Components, tied pairs and isolation of a structurally valid standard path."""
    if not sp.pieces:
        raise MalformedStandardPathError("standard path has no pieces")
    previous_end: int | None = None
    for i, piece in enumerate(sp.pieces):
        if isinstance(piece, Segment):
            if not piece.vertices:
                raise MalformedStandardPathError(f"piece {i} is an empty segment")
            start, end = piece.vertices[0], piece.vertices[-1]
        else:
            if piece.x == piece.y:
                raise MalformedStandardPathError(
                    f"piece {i} is a component from {piece.x} to itself"
                )
            start, end = piece.x, piece.y
        if previous_end is not None and start != previous_end:
            raise MalformedStandardPathError(
                f"piece {i} starts at {start} but piece {i - 1} ends at {previous_end}"
            )
        previous_end = end

    components = tuple(sp.components())
    tied = tuple(
        (i, j)
        for (i, a), (j, b) in combinations(components, 2)
        if a.member == b.member
    )
    in_tie = {i for pair in tied for i in pair}
    isolated = tuple(i not in in_tie for i, _ in components)
    return StandardPathAnalysis(components=components, tied_pairs=tied, isolated=isolated)


def validate_standard_path(coned: ConedOffSpace, sp: StandardPath) -> None:
    """Segments are ambient paths; components join net points of their member."""
    analyze_standard_path(sp)
    for i, piece in enumerate(sp.pieces):
        if isinstance(piece, Segment):
            try:
                path_from_vertices(coned.ambient, piece.vertices)
            except RelHypError as exc:
                raise MalformedStandardPathError(f"piece {i}: {exc}") from exc
        else:
            if not 0 <= piece.member < len(coned.nets):
                raise MalformedStandardPathError(f"piece {i}: unknown member {piece.member}")
            net = coned.nets[piece.member]
            if piece.x not in net or piece.y not in net:
                raise MalformedStandardPathError(
                    f"piece {i}: component endpoints are not net points of member {piece.member}"
                )


def _assemble(pieces: list[StandardPiece], start: int) -> StandardPath:
    kept = [p for p in pieces if not (isinstance(p, Segment) and len(p.vertices) <= 1)]
    return StandardPath(tuple(kept) if kept else (Segment((start,)),))


def standard_path_from_path(coned: ConedOffSpace, path: PathInSpace) -> StandardPath:
    """Cut a path of the coned graph into ambient segments and components."""
    pieces: list[StandardPiece] = []
    current = [path.start]
    for a, b in zip(path.vertices, path.vertices[1:], strict=False):
        member = _uses_component(coned, a, b)
        if member is None:
            current.append(b)
            continue
        pieces.append(Segment(tuple(current)))
        pieces.append(Component(member, a, b))
        current = [b]
    pieces.append(Segment(tuple(current)))
    sp = _assemble(pieces, path.start)
    return StandardPath(sp.pieces, quasi_constant=float(coned_quasi_constant(coned, sp)))


def standard_path_from_coned_geodesic(coned: ConedOffSpace, x: int, y: int) -> StandardPath:
    return standard_path_from_path(coned, geodesic(coned.graph, x, y))


def member_routed_detour(coned: ConedOffSpace, x: int, y: int, member: int) -> StandardPath:
    """Ambient geodesic from x to the member's net, one component, geodesic on to y."""
    g = coned.ambient
    net = coned.nets[member]
    p = nearest_point(g, x, net)
    q = nearest_point(g, y, net)
    to_net = geodesic(g, x, p).vertices
    onward = geodesic(g, q, y).vertices
    pieces: list[StandardPiece]
    if p == q:
        pieces = [Segment((*to_net, *onward[1:]))]
    else:
        pieces = [Segment(to_net), Component(member, p, q), Segment(onward)]
    sp = _assemble(pieces, x)
    return StandardPath(sp.pieces, quasi_constant=float(coned_quasi_constant(coned, sp)))


def coned_quasi_constant(coned: ConedOffSpace, sp: StandardPath) -> int:
    """Least L such that ``sp`` is an (L, L)-quasi-geodesic of the coned metric."""
    return measure_quasi_geodesic(coned.graph, path_from_vertices(coned.graph, sp.x_vertices()))


def coned_trace(coned: ConedOffSpace, x: int, y: int) -> tuple[int, ...]:
    """Ambient vertices on the canonical coned geodesic from x to y."""
    return tuple(sorted(set(geodesic(coned.graph, x, y).vertices)))


def coned_trace_vs_transient(
    coned: ConedOffSpace, x: int, y: int, mu: float, R: float
) -> float:
    """d_X-Hausdorff distance between the coned trace and trans_{mu,R}([x,y])."""
    g = coned.ambient
    dec = decompose(g, coned.family, geodesic(g, x, y), TransientParams(mu=mu, c=R))
    return small_hausdorff(g, coned_trace(coned, x, y), dec.transient_vertices().members)


def fill_components(coned: ConedOffSpace, path: PathInSpace) -> tuple[PathInSpace, int]:
    """Replace every component step of a coned path by the ambient geodesic.

    Returns the ambient path and the least K making it a (K, K)-quasi-geodesic.
    """
    g = coned.ambient
    vertices = [path.start]
    for a, b in zip(path.vertices, path.vertices[1:], strict=False):
        if g.has_edge(a, b) and _uses_component(coned, a, b) is None:
            vertices.append(b)
        else:
            vertices.extend(geodesic(g, a, b).vertices[1:])
    filled = path_from_vertices(g, vertices)
    K = measure_quasi_geodesic(g, filled)
    return PathInSpace(filled.vertices, filled.cumulative_length,
                       quasi_constants=(float(K), float(K))), K


# ---------------------------------------------------------------------------
# Bounded coset penetration
# ---------------------------------------------------------------------------


class Penetration(NamedTuple):
    """A maximal stretch of a path inside one member.

    Component steps of the member and ambient edges with both ends in it
    count alike, so a path walking along a coset penetrates it just as a
    path jumping across it does.
    """

    member: int
    entry: int
    exit: int


def _owners(coned: ConedOffSpace) -> dict[int, frozenset[int]]:
    owners: dict[int, set[int]] = defaultdict(set)
    for i, member in enumerate(coned.family):
        for v in member:
            owners[v].add(i)
    return {v: frozenset(ms) for v, ms in owners.items()}


def penetrations(
    coned: ConedOffSpace,
    sp: StandardPath,
    owners: dict[int, frozenset[int]] | None = None,
) -> list[Penetration]:
    """Members a standard path travels in, in order of entry."""
    owners = _owners(coned) if owners is None else owners
    none: frozenset[int] = frozenset()
    steps: list[tuple[int, int, frozenset[int]]] = []
    for piece in sp.pieces:
        if isinstance(piece, Component):
            steps.append((piece.x, piece.y, frozenset((piece.member,))))
            continue
        for a, b in zip(piece.vertices, piece.vertices[1:], strict=False):
            steps.append((a, b, owners.get(a, none) & owners.get(b, none)))

    found: list[tuple[int, Penetration]] = []
    open_runs: dict[int, tuple[int, int]] = {}
    for index, (a, _, members) in enumerate(steps):
        for m in [m for m in open_runs if m not in members]:
            start, entry = open_runs.pop(m)
            found.append((start, Penetration(m, entry, a)))
        for m in sorted(members):
            open_runs.setdefault(m, (index, a))
    for m, (start, entry) in open_runs.items():
        found.append((start, Penetration(m, entry, steps[-1][1])))
    return [p for _, p in sorted(found)]


def check_bcp(
    coned: ConedOffSpace,
    path_pairs: Sequence[tuple[StandardPath, StandardPath]],
    *,
    cap: float | None = None,
    threads: int | None = None,
) -> BCPReport:
    """Penetration constants over ``path_pairs``.

    Clause 1: a penetration of X-length >= K has a penetration of the same
    member in the other path.  Clause 2: such penetrations enter and exit
    within K of each other.  ``clause1_K`` is the longest unmatched
    penetration, so clause 1 holds for every K strictly above it; ``clause2_K``
    is the largest entry/exit gap, the least K for clause 2.  Unmatched
    penetrations of X-length >= ``cap`` are violations (default cap: half the
    ambient diameter).
    """
    g = coned.ambient
    cap = graph_diameter(g) / 2 if cap is None else cap
    owners = _owners(coned)
    log_event(logger, "info", EVENT_CHECK_STARTED, check="bcp", pairs=len(path_pairs), cap=cap)

    def evaluate(
        item: tuple[int, tuple[StandardPath, StandardPath]],
    ) -> tuple[BCPOutcome, list[Witness], list[Witness]]:
        index, (first, second) = item
        try:
            analyses = [analyze_standard_path(first), analyze_standard_path(second)]
        except MalformedStandardPathError as exc:
            return BCPOutcome(pair=index, error=str(exc)), [], []
        problems = []
        if not all(a.without_backtracking for a in analyses):
            problems.append("path with backtracking")
        if g.distance(first.start, second.start) > 1 + settings.distance_tolerance or \
                g.distance(first.end, second.end) > 1 + settings.distance_tolerance:
            problems.append("endpoints more than 1 apart")
        if problems:
            return BCPOutcome(pair=index, error="; ".join(problems)), [], []

        runs = [penetrations(coned, first, owners), penetrations(coned, second, owners)]
        untied: list[Witness] = []
        tied: list[Witness] = []
        for side, (mine, theirs) in enumerate(((runs[0], runs[1]), (runs[1], runs[0]))):
            by_member: dict[int, list[Penetration]] = defaultdict(list)
            for p in theirs:
                by_member[p.member].append(p)
            for p in mine:
                matches = by_member.get(p.member)
                if not matches:
                    untied.append(Witness(
                        symbol="K", value=g.distance(p.entry, p.exit),
                        vertices=(p.entry, p.exit), members=(p.member,),
                        note=f"pair {index} untied",
                    ))
                elif side == 0:
                    gap, q = min(
                        (max(g.distance(p.entry, q.entry), g.distance(p.exit, q.exit)), q)
                        for q in matches
                    )
                    tied.append(Witness(
                        symbol="K", value=gap, vertices=(p.entry, q.entry, p.exit, q.exit),
                        members=(p.member,), note=f"pair {index} entry/exit gap",
                    ))
        outcome = BCPOutcome(
            pair=index,
            clause1=max((w.value for w in untied), default=0.0),
            clause2=max((w.value for w in tied), default=0.0),
        )
        return outcome, untied, tied

    items = list(enumerate(path_pairs))
    outcomes: list[BCPOutcome] = []
    best1: Witness | None = None
    best2: Witness | None = None
    violations: list[Witness] = []
    failures: list[str] = []
    for outcome, untied, tied in parallel_map(evaluate, items, threads=threads):
        outcomes.append(outcome)
        if outcome.error is not None:
            failures.append(f"pair {outcome.pair}: {outcome.error}")
            continue
        for w in untied:
            if best1 is None or w.value > best1.value + settings.distance_tolerance:
                best1 = w
            if w.value >= cap - settings.distance_tolerance:
                violations.append(w)
        for w in tied:
            if best2 is None or w.value > best2.value + settings.distance_tolerance:
                best2 = w

    k1 = best1.value if best1 is not None else 0.0
    k2 = best2.value if best2 is not None else 0.0
    report = BCPReport(
        K=max(k1, k2),
        clause1_K=k1,
        clause2_K=k2,
        cap=cap,
        pairs=len(path_pairs),
        outcomes=outcomes,
        witnesses=[w for w in (best1, best2) if w is not None],
        violations=violations,
        precondition_failures=failures,
    )
    log_event(logger, "info", EVENT_CHECK_COMPLETED, check="bcp", status=report.status,
              K=report.K, precondition_failures=len(failures))
    if violations:
        log_event(logger, "warning", EVENT_CHECK_VIOLATION, check="bcp",
                  violations=len(violations))
    return report


def candidate_pairs(
    coned: ConedOffSpace,
    endpoints: Sequence[tuple[int, int]],
    *,
    near: float = 1.0,
) -> list[tuple[StandardPath, StandardPath]]:
    """Coned geodesic against perturbed geodesics and member-routed detours.

    The perturbed geodesic ends at the first neighbour of ``y`` within
    distance 1; it is left out when ``y`` has none.  Detours go through every
    member used by the geodesic and every member within ``near`` of both
    endpoints.
    """
    g = coned.ambient
    tol = settings.distance_tolerance
    rows = [g.distances_to_set(net) for net in coned.nets]
    owners = _owners(coned)
    out: list[tuple[StandardPath, StandardPath]] = []
    for x, y in endpoints:
        base = standard_path_from_coned_geodesic(coned, x, y)
        out.append((base, base))
        neighbor = next((v for v, length in g.neighbors(y) if length <= 1 + tol), None)
        if neighbor is not None:
            out.append((base, standard_path_from_coned_geodesic(coned, x, neighbor)))
        members = {p.member for p in penetrations(coned, base, owners)}
        members.update(
            i for i, row in enumerate(rows) if max(row[x], row[y]) <= near + tol
        )
        for m in sorted(members):
            out.append((base, member_routed_detour(coned, x, y, m)))
    return out


def check_rh2(
    coned: ConedOffSpace,
    spec: SampleSpec | None = None,
    *,
    L_values: Sequence[float] = DEFAULT_L_GRID,
    pool: VertexSet | None = None,
    cap: float | None = None,
    count: int = 2000,
    threads: int | None = None,
) -> tuple[ConstantsReport, list[BCPReport]]:
    """Four-point delta of the coned graph and one BCP report per L of the grid."""
    pool = interior_vertices(coned.ambient) if pool is None else pool
    spec = auto_spec(len(pool)) if spec is None else spec
    exhaustive = len(pool) <= settings.exhaustive_quadruple_limit
    log_event(logger, "info", EVENT_CHECK_STARTED, check="rh2", pool=len(pool),
              mode=spec.mode, seed=spec.seed)
    if len(pool) >= 4:
        estimate = four_point_estimate(
            coned.graph,
            mode="exhaustive" if exhaustive else "sample",
            count=count,
            seed=None if exhaustive else (spec.seed if spec.seed is not None else 0),
            pool=list(pool.members),
            threads=threads,
        )
        delta_report = ConstantsReport(
            condition="rh2",
            constants={"delta": estimate.delta},
            witnesses=[Witness(symbol="delta", value=estimate.delta,
                               vertices=estimate.quadruple or ())],
            samples=estimate.inspected,
            seed=estimate.seed,
            mode=estimate.mode,
            details={"components": len(coned.components)},
        )
    else:
        delta_report = ConstantsReport(condition="rh2", constants={"delta": 0.0},
                                       status="no-admissible-pairs")
    log_outcome(logger, delta_report)

    candidates = candidate_pairs(coned, sample_pairs(pool.members, spec))
    bcp_reports = []
    for L in L_values:
        admissible = [
            (a, b) for a, b in candidates
            if max(a.quasi_constant or 1.0, b.quasi_constant or 1.0) <= L
        ]
        report = check_bcp(coned, admissible, cap=cap, threads=threads)
        bcp_reports.append(report.model_copy(update={"seed": spec.recorded_seed, "L": float(L)}))
    return delta_report, bcp_reports
