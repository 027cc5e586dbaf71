"""Bounded coarse intersection, geodesics near peripherals, projections.

Implication-type statements ("if the hypothesis quantity reaches the
constant then the conclusion holds with that constant") are measured as
the max over items of ``min(need, trigger)``: the smallest constant that
no item contradicts.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from itertools import combinations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from relhyp.core.errors import ParameterError
from relhyp.core.logging import EVENT_CHECK_STARTED, log_event
from relhyp.core.settings import settings
from relhyp.models.graph import PathInSpace, VertexSet
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.reports import ConstantsReport, Witness
from relhyp.services.metric_graph import (
    EmptyVertexSetError,
    FloatArray,
    MetricGraph,
    geodesic,
    graph_diameter,
    interior_vertices,
    neighborhood,
)
from relhyp.services.parallel import parallel_map
from relhyp.services.sampling import (
    SampleSpec,
    SupTracker,
    auto_spec,
    geodesic_variants,
    log_outcome,
    sample_pairs,
    subsample,
)

logger = logging.getLogger(__name__)

_MAX_VIOLATIONS = 20


# ---------------------------------------------------------------------------
# Projections
# ---------------------------------------------------------------------------


def nearest_point(g: MetricGraph, x: int, target: VertexSet) -> int:
    """Least-id vertex of ``target`` at minimal distance from ``x``."""
    if not target:
        raise EmptyVertexSetError("projection onto an empty set")
    row = g.distances_from(x)[target.as_array()]
    best = float(np.min(row))
    first = int(np.flatnonzero(row <= best + settings.distance_tolerance)[0])
    return target.members[first]


def project(g: MetricGraph, fam: PeripheralFamily, x: int, member: int) -> int:
    """Closest-point projection of ``x`` onto member ``member`` (least id among ties)."""
    return nearest_point(g, x, fam[member])


def projection_set(g: MetricGraph, x: int, target: VertexSet, slack: float = 1.0) -> VertexSet:
    """All points of ``target`` within ``d(x, target) + slack`` of ``x``."""
    if not target:
        raise EmptyVertexSetError("projection onto an empty set")
    row = g.distances_from(x)[target.as_array()]
    bound = float(np.min(row)) + slack + settings.distance_tolerance
    return VertexSet(tuple(target.members[i] for i in np.flatnonzero(row <= bound)))


def set_diameter(g: MetricGraph, vertices: VertexSet) -> tuple[float, tuple[int, int]]:
    """Diameter of a vertex set with an achieving pair."""
    if len(vertices) <= 1:
        v = vertices.members[0] if vertices else -1
        return 0.0, (v, v)
    members = list(vertices.members)
    dist = g.pairwise_distances(members)
    flat = int(np.argmax(dist))
    a, b = divmod(flat, len(members))
    return float(dist[a, b]), (members[a], members[b])


def _path_min(row: FloatArray, path: PathInSpace) -> float:
    return float(np.min(row[np.asarray(path.vertices)]))


# ---------------------------------------------------------------------------
# (alpha1)
# ---------------------------------------------------------------------------


def check_alpha1(
    g: MetricGraph,
    fam: PeripheralFamily,
    K: float,
    *,
    violation_fraction: float | None = None,
    threads: int | None = None,
) -> ConstantsReport:
    """B = max over distinct members of diam(N_K(P) ∩ N_K(Q))."""
    if K <= 0:
        raise ParameterError(f"K must be positive, got {K}")
    fraction = (
        settings.alpha1_violation_fraction if violation_fraction is None else violation_fraction
    )
    log_event(logger, "info", EVENT_CHECK_STARTED, check="alpha1", members=len(fam), K=K)
    if len(fam) < 2:
        return log_outcome(logger, ConstantsReport(
            condition="alpha1", constants={"B": 0.0}, status="no-admissible-pairs",
            details={"K": K},
        ))

    hoods = [neighborhood(g, member, K) for member in fam]
    owners: dict[int, list[int]] = defaultdict(list)
    for i, hood in enumerate(hoods):
        for v in hood:
            owners[v].append(i)
    meeting = sorted({pair for lst in owners.values() for pair in combinations(lst, 2)})

    def diameter_of(pair: tuple[int, int]) -> tuple[float, tuple[int, int]]:
        i, j = pair
        return set_diameter(g, hoods[i].intersection(hoods[j]))

    tracker = SupTracker("B")
    for pair, (value, ends) in zip(
        meeting, parallel_map(diameter_of, meeting, threads=threads), strict=True
    ):
        tracker.offer(value, ends, pair)
    if tracker.witness is None:
        tracker.offer(0.0, (), (0, 1), note="empty intersection")

    diameter = graph_diameter(g)
    threshold = fraction * diameter
    violated = tracker.value > threshold + settings.distance_tolerance
    report = ConstantsReport(
        condition="alpha1",
        constants={"B": tracker.value},
        witnesses=tracker.witnesses(),
        violations=tracker.witnesses() if violated else [],
        samples=len(fam) * (len(fam) - 1) // 2,
        status="violation" if violated else "ok",
        details={"K": K, "diameter": diameter, "threshold": threshold,
                 "intersecting_pairs": len(meeting)},
    )
    return log_outcome(logger, report)


# ---------------------------------------------------------------------------
# (alpha2)
# ---------------------------------------------------------------------------


def _member_indices(fam: PeripheralFamily, limit: int | None, seed: int | None) -> list[int]:
    indices = list(range(len(fam)))
    if limit is None or len(indices) <= limit:
        return indices
    return subsample(indices, limit, seed)


def check_alpha2(
    g: MetricGraph,
    fam: PeripheralFamily,
    epsilon: float = 0.25,
    M: float = 0.0,
    spec: SampleSpec | None = None,
    *,
    enhanced_K: float | None = None,
    variants: int | None = None,
    pool: VertexSet | None = None,
    member_limit: int | None = 32,
    threads: int | None = None,
) -> ConstantsReport:
    """Geodesics between points of N_{εd}(P) meet N_M(P).

    With ``enhanced_K`` the admissible pairs are instead those with
    ``d(x,P) + d(y,P) <= d(x,y) - enhanced_K``.
    """
    if not 0 < epsilon < 0.5:
        raise ParameterError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if M < 0:
        raise ParameterError(f"M must be >= 0, got {M}")
    log_event(logger, "info", EVENT_CHECK_STARTED, check="alpha2",
              members=len(fam), epsilon=epsilon, M=M)
    pool = interior_vertices(g) if pool is None else pool
    seed = spec.seed if spec is not None else None
    reach = epsilon * graph_diameter(g)
    pool_arr = pool.as_array()

    items: list[tuple[int, int, int]] = []
    for i in _member_indices(fam, member_limit, seed):
        row = g.distances_to_set(fam[i])
        if enhanced_K is None:
            near = pool_arr[row[pool_arr] <= reach + settings.distance_tolerance]
        else:
            near = pool_arr
        member_spec = spec if spec is not None else auto_spec(len(near), seed=seed)
        items.extend((i, x, y) for x, y in sample_pairs(near.tolist(), member_spec))

    def evaluate(item: tuple[int, int, int]) -> tuple[bool, float]:
        i, x, y = item
        row = g.distances_to_set(fam[i])
        d = g.distance(x, y)
        tol = settings.distance_tolerance
        if enhanced_K is None:
            ok = row[x] <= epsilon * d + tol and row[y] <= epsilon * d + tol
        else:
            ok = row[x] + row[y] <= d - enhanced_K + tol
        if not ok:
            return False, 0.0
        paths = geodesic_variants(g, x, y, count=variants, seed=seed)
        return True, max(_path_min(row, p) for p in paths)

    tracker = SupTracker("M")
    violations: list[Witness] = []
    admissible = 0
    for (i, x, y), (ok, need) in zip(items, parallel_map(evaluate, items, threads=threads),
                                     strict=True):
        if not ok:
            continue
        admissible += 1
        tracker.offer(need, (x, y), (i,))
        if need > M + settings.distance_tolerance and len(violations) < _MAX_VIOLATIONS:
            violations.append(Witness(symbol="M", value=need, vertices=(x, y), members=(i,)))

    if admissible == 0:
        status = "no-admissible-pairs"
    elif violations:
        status = "violation"
    else:
        status = "ok"
    report = ConstantsReport(
        condition="alpha2",
        constants={"M": tracker.value},
        witnesses=tracker.witnesses(),
        violations=violations,
        samples=len(items),
        status=status,
        seed=seed,
        mode=spec.mode if spec is not None else "auto",
        details={"epsilon": epsilon, "M_supplied": M, "admissible": admissible,
                 "enhanced_K": enhanced_K},
    )
    return log_outcome(logger, report)


# ---------------------------------------------------------------------------
# Projection lemmas
# ---------------------------------------------------------------------------


class ProjectionParams(BaseModel):
    """Inputs of the projection-lemma audit.

    ``M`` is the (alpha2) constant, ``L_values`` the neighborhood radii for
    the convexity constant and ``mu`` the entrance radius for the
    first-point constant.
    """

    model_config = ConfigDict(frozen=True)

    M: float = Field(default=1.0, ge=0)
    L_values: tuple[float, ...] = (1.0, 2.0)
    mu: float = Field(default=1.0, gt=0)
    member_limit: int = Field(default=32, ge=1)
    member_pair_limit: int = Field(default=200, ge=1)


def audit_projection_lemmas(
    g: MetricGraph,
    fam: PeripheralFamily,
    params: ProjectionParams | None = None,
    spec: SampleSpec | None = None,
    *,
    pool: VertexSet | None = None,
    threads: int | None = None,
) -> ConstantsReport:
    """Smallest constants t, R, L, R', C, K making each projection statement hold.

    - t: geodesics between points of N_L(P) stay in N_{tL}(P);
    - R: geodesics from x to N_M(P) meet N_R(π_P(x));
    - L: if d(π_P x, π_P y) >= L, [x,y] meets B_L(π_P x) and B_L(π_P y);
    - R_prime: the first point of [x,y] in N_mu(P) is within R' of π_P(x);
    - C: diam of the coarse projection of one member onto another;
    - K: if d(x,P)+d(y,P) <= d(x,y)-K, some z on [x,y] has d(z,P) <= K and
      |d(x,z) - d(x,P)| <= K.
    """
    params = ProjectionParams() if params is None else params
    if not fam:
        raise EmptyVertexSetError("projection lemmas need a nonempty family")
    pool = interior_vertices(g) if pool is None else pool
    spec = auto_spec(len(pool), seed=None) if spec is None else spec
    log_event(logger, "info", EVENT_CHECK_STARTED, check="proj",
              members=len(fam), pool=len(pool), mode=spec.mode, seed=spec.seed)

    members = _member_indices(fam, params.member_limit, spec.seed)
    pairs = sample_pairs(pool.members, spec)
    tol = settings.distance_tolerance
    trackers = {s: SupTracker(s) for s in ("t", "R", "L", "R_prime", "K")}

    def evaluate(pair: tuple[int, int]) -> list[tuple[str, float, tuple[int, ...], int]]:
        x, y = pair
        out: list[tuple[str, float, tuple[int, ...], int]] = []
        gamma = geodesic(g, x, y)
        verts = np.asarray(gamma.vertices)
        dx_row = g.distances_from(x)
        for i in members:
            row = g.distances_to_set(fam[i])
            on_path = row[verts]
            px = nearest_point(g, x, fam[i])
            py = nearest_point(g, y, fam[i])
            from_px = g.distances_from(px)[verts]
            from_py = g.distances_from(py)[verts]
            # t
            for L in params.L_values:
                if row[x] <= L + tol and row[y] <= L + tol:
                    out.append(("t", float(np.max(on_path)) / L, (x, y), i))
            # R (y plays the point of N_M(P))
            if row[y] <= params.M + tol:
                out.append(("R", float(np.min(from_px)), (x, y), i))
            # L
            need_l = max(float(np.min(from_px)), float(np.min(from_py)))
            out.append(("L", min(need_l, g.distance(px, py)), (x, y), i))
            # R'
            inside = np.flatnonzero(on_path <= params.mu + tol)
            if inside.size:
                first = int(verts[inside[0]])
                out.append(("R_prime", g.distance(first, px), (x, first), i))
            # K
            slack = g.distance(x, y) - row[x] - row[y]
            if slack >= -tol:
                need_k = float(np.min(np.maximum(on_path, np.abs(dx_row[verts] - row[x]))))
                out.append(("K", min(need_k, max(slack, 0.0)), (x, y), i))
        return out

    for results in parallel_map(evaluate, pairs, threads=threads):
        for symbol, value, verts, member in results:
            trackers[symbol].offer(value, verts, (member,))

    c_tracker = _projection_diameter(g, fam, members, params.member_pair_limit, spec.seed)
    constants = {s: tr.value for s, tr in trackers.items()}
    constants["C"] = c_tracker.value
    witnesses = [w for tr in (*trackers.values(), c_tracker) for w in tr.witnesses()]
    report = ConstantsReport(
        condition="proj",
        constants=constants,
        witnesses=witnesses,
        samples=len(pairs) * len(members),
        seed=spec.recorded_seed,
        mode=spec.mode,
        details={"M": params.M, "L_values": list(params.L_values), "mu": params.mu,
                 "members": len(members)},
    )
    return log_outcome(logger, report)


def _projection_diameter(
    g: MetricGraph,
    fam: PeripheralFamily,
    members: list[int],
    pair_limit: int,
    seed: int | None,
) -> SupTracker:
    """diam(π_Q1(Q2)) over distinct member pairs (coarse projection, slack 1)."""
    tracker = SupTracker("C")
    pairs = [(a, b) for a in members for b in members if a != b]
    if len(pairs) > pair_limit:
        rng = np.random.default_rng(seed if seed is not None else 0)
        picked = rng.choice(len(pairs), size=pair_limit, replace=False)
        pairs = [pairs[int(k)] for k in sorted(picked)]
    for a, b in pairs:
        target = fam[a]
        image: set[int] = set()
        for q in fam[b]:
            image.update(projection_set(g, q, target, 1.0))
        value, ends = set_diameter(g, VertexSet(tuple(image)))
        tracker.offer(value, ends, (a, b))
    return tracker
