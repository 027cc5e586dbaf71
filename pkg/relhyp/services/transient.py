"""Deep/transient decomposition of paths and the checks built on it.

A path vertex is deep for a peripheral P when the path has one earlier
and one later vertex in N_mu(P), both more than ``c`` away from it; every
other vertex is transient.  The checkers below measure, over sampled
pairs and triangles, the smallest constants making the transient-set
statements hold.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from itertools import groupby

import numpy as np

from relhyp.core.errors import ParameterError, RelHypError
from relhyp.core.logging import EVENT_CHECK_STARTED, log_event
from relhyp.core.settings import settings
from relhyp.models.graph import PathInSpace, VertexSet
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.reports import ConstantsReport, Witness
from relhyp.models.transient import (
    CaseC,
    CaseP,
    DeepComponent,
    Neither,
    TransientDecomposition,
    TransientParams,
    TriangleClass,
    TriangleSample,
)
from relhyp.services.metric_graph import (
    FloatArray,
    MetricGraph,
    farthest_point,
    geodesic,
    interior_vertices,
    small_hausdorff,
)
from relhyp.services.parallel import parallel_map
from relhyp.services.peripherals import check_alpha1
from relhyp.services.sampling import (
    SampleSpec,
    SupTracker,
    auto_spec,
    geodesic_variants,
    log_outcome,
    sample_pairs,
    sample_triples,
    subsample,
)

logger = logging.getLogger(__name__)

_MAX_VIOLATIONS = 20
DEFAULT_R_GRID: tuple[float, ...] = (2.0, 4.0, 8.0)


class NoAdmissiblePairsError(RelHypError):
    """A sampler produced no pair satisfying the check's hypothesis."""

    error_category = "sampling"


class EndpointMismatchError(RelHypError):
    error_category = "input"


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------


def member_distances(g: MetricGraph, fam: PeripheralFamily) -> FloatArray:
    """Matrix of d(v, P): one row per member, one column per vertex."""
    if not fam:
        return np.empty((0, g.vertex_count))
    return np.vstack([g.distances_to_set(member) for member in fam])


def decompose(
    g: MetricGraph,
    fam: PeripheralFamily,
    path: PathInSpace,
    params: TransientParams | None = None,
    *,
    field: FloatArray | None = None,
) -> TransientDecomposition:
    """Split ``path`` into transient indices and maximal deep runs.

    ``field`` is an optional precomputed :func:`member_distances` matrix.
    A vertex deep for several members is tagged with the least index.
    """
    params = TransientParams() if params is None else params
    n = len(path)
    everything = tuple(range(n))
    if not fam or n <= 2:
        return TransientDecomposition(path=path, transient=everything, deep_components=())

    tol = settings.distance_tolerance
    verts = np.asarray(path.vertices, dtype=np.int64)
    if field is None:
        near = np.vstack([g.distances_to_set(m)[verts] for m in fam]) <= params.mu + tol
    else:
        near = field[:, verts] <= params.mu + tol
    if params.arclength:
        cum = np.asarray(path.cumulative_length)
        separation = np.abs(cum[:, None] - cum[None, :])
    else:
        separation = g.pairwise_distances(path.vertices)
    far = separation > params.c + tol
    earlier = np.tril(np.ones((n, n), dtype=bool), -1)

    tag = np.full(n, -1, dtype=np.int64)
    for p in np.flatnonzero(near.sum(axis=1) >= 2):
        witnesses = far & near[p][None, :]
        before = np.any(witnesses & earlier, axis=1)
        after = np.any(witnesses & earlier.T, axis=1)
        tag[before & after & (tag < 0)] = int(p)

    components: list[DeepComponent] = []
    index = 0
    for member, run in groupby(tag.tolist()):
        length = len(list(run))
        if member >= 0:
            components.append(DeepComponent(member, index, index + length - 1))
        index += length
    transient = tuple(int(i) for i in np.flatnonzero(tag < 0))
    return TransientDecomposition(
        path=path, transient=transient, deep_components=tuple(components)
    )


class TransientCache:
    """Transient vertex lists of canonical geodesics, keyed by endpoint pair."""

    def __init__(
        self, g: MetricGraph, fam: PeripheralFamily, params: TransientParams
    ) -> None:
        self.g = g
        self.fam = fam
        self.params = params
        self.field = member_distances(g, fam)
        self._store: dict[tuple[int, int], TransientDecomposition] = {}

    def decomposition(self, x: int, y: int) -> TransientDecomposition:
        found = self._store.get((x, y))
        if found is None:
            found = decompose(self.g, self.fam, geodesic(self.g, x, y), self.params,
                              field=self.field)
            self._store[(x, y)] = found
        return found

    def transient(self, x: int, y: int) -> tuple[int, ...]:
        return self.decomposition(x, y).transient_vertices().members


def _check_mu_r(mu: float, R: float) -> None:
    if mu < 0 or R < 0:
        raise ParameterError(f"mu and R must be >= 0, got mu={mu} R={R}")


def _pool_and_spec(
    g: MetricGraph, pool: VertexSet | None, spec: SampleSpec | None
) -> tuple[VertexSet, SampleSpec]:
    pool = interior_vertices(g) if pool is None else pool
    return pool, auto_spec(len(pool)) if spec is None else spec


# ---------------------------------------------------------------------------
# Relative Rips condition and (RH3)
# ---------------------------------------------------------------------------


def triangle(g: MetricGraph, a: int, b: int, c: int) -> TriangleSample:
    return TriangleSample(
        corners=(a, b, c), sides=(geodesic(g, a, b), geodesic(g, b, c), geodesic(g, c, a))
    )


def check_relative_rips(
    g: MetricGraph,
    fam: PeripheralFamily,
    mu: float,
    R: float,
    spec: SampleSpec | None = None,
    *,
    pool: VertexSet | None = None,
    threads: int | None = None,
) -> ConstantsReport:
    """D = sup of d(trans(side_i), trans(side_j) ∪ trans(side_k)) over triangles."""
    _check_mu_r(mu, R)
    pool, spec = _pool_and_spec(g, pool, spec)
    log_event(logger, "info", EVENT_CHECK_STARTED, check="rips", mu=mu, R=R,
              pool=len(pool), mode=spec.mode, seed=spec.seed)
    cache = TransientCache(g, fam, TransientParams(mu=mu, c=R))
    triples = sample_triples(pool.members, spec)

    def defect(corners: tuple[int, int, int]) -> tuple[float, tuple[int, ...]]:
        a, b, c = corners
        sides = [cache.transient(a, b), cache.transient(b, c), cache.transient(c, a)]
        best: tuple[float, tuple[int, ...]] = (0.0, corners)
        for i in range(3):
            others = sorted({*sides[(i + 1) % 3], *sides[(i + 2) % 3]})
            value, far, _ = farthest_point(g, sides[i], others)
            if value > best[0]:
                best = (value, (*corners, far))
        return best

    tracker = SupTracker("D")
    for corners, (value, verts) in zip(
        triples, parallel_map(defect, triples, threads=threads), strict=True
    ):
        tracker.offer(value, verts)

    report = ConstantsReport(
        condition="rips",
        constants={"D": tracker.value},
        witnesses=tracker.witnesses(),
        samples=len(triples),
        status="ok" if triples else "no-admissible-pairs",
        seed=spec.recorded_seed,
        mode=spec.mode,
        details={"mu": mu, "R": R, "pool": len(pool)},
    )
    return log_outcome(logger, report)


def check_rh3_cond2(
    g: MetricGraph,
    fam: PeripheralFamily,
    mu: float,
    R: float,
    k: float,
    spec: SampleSpec | None = None,
    *,
    pool: VertexSet | None = None,
    member_limit: int | None = 32,
    threads: int | None = None,
    strict: bool = False,
) -> ConstantsReport:
    """Smallest K such that pairs near one member with d(x,y) >= K have their
    transient points in B_K(x) ∪ B_K(y) and one transient point in N_mu(P).

    ``strict`` raises :class:`NoAdmissiblePairsError` instead of reporting
    an empty sample.
    """
    _check_mu_r(mu, R)
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    pool, spec = _pool_and_spec(g, pool, spec)
    log_event(logger, "info", EVENT_CHECK_STARTED, check="rh3_cond2", mu=mu, R=R, k=k,
              pool=len(pool), mode=spec.mode, seed=spec.seed)
    cache = TransientCache(g, fam, TransientParams(mu=mu, c=R))
    tol = settings.distance_tolerance
    pool_arr = pool.as_array()

    members = list(range(len(fam)))
    if member_limit is not None and len(members) > member_limit:
        members = subsample(members, member_limit, spec.seed)
    items: list[tuple[int, int, int]] = []
    for i in members:
        near = pool_arr[cache.field[i][pool_arr] <= k + tol]
        items.extend((i, x, y) for x, y in sample_pairs(near.tolist(), spec))

    def evaluate(item: tuple[int, int, int]) -> tuple[float, float, bool]:
        i, x, y = item
        trans = cache.transient(x, y)
        rows = g.distance_rows([x, y])[:, np.asarray(trans)]
        spread = float(np.max(np.min(rows, axis=0)))
        reaches = bool(np.min(cache.field[i][np.asarray(trans)]) <= mu + tol)
        need = spread if reaches else float("inf")
        return min(need, g.distance(x, y)), spread, reaches

    tracker = SupTracker("K")
    failures: list[Witness] = []
    for (i, x, y), (value, spread, reaches) in zip(
        items, parallel_map(evaluate, items, threads=threads), strict=True
    ):
        tracker.offer(value, (x, y), (i,), note="" if reaches else "no transient point near P")
        if not reaches and len(failures) < _MAX_VIOLATIONS:
            failures.append(Witness(symbol="K", value=value, vertices=(x, y), members=(i,),
                                    note="no transient point in N_mu(P)"))

    if not items and strict:
        raise NoAdmissiblePairsError(f"no pool pairs lie within {k} of a common member")
    report = ConstantsReport(
        condition="rh3_cond2",
        constants={"K": tracker.value},
        witnesses=tracker.witnesses(),
        samples=len(items),
        status="ok" if items else "no-admissible-pairs",
        seed=spec.recorded_seed,
        mode=spec.mode,
        details={"mu": mu, "R": R, "k": k, "members": len(members),
                 "missing_entrance": len(failures),
                 "missing_entrance_pairs": [list(w.vertices) for w in failures]},
    )
    return log_outcome(logger, report)


def check_rh3(
    g: MetricGraph,
    fam: PeripheralFamily,
    mu: float = 1.0,
    R_values: Sequence[float] = DEFAULT_R_GRID,
    k: float = 1.0,
    spec: SampleSpec | None = None,
    *,
    K_alpha1: float = 1.0,
    pool: VertexSet | None = None,
    threads: int | None = None,
) -> list[ConstantsReport]:
    """(alpha1) plus, per R of the grid, the pair constant K and the Rips constant D.

    No R_0 is asserted; the per-R constants are reported side by side.
    """
    reports = [check_alpha1(g, fam, K_alpha1, threads=threads)]
    for R in R_values:
        cond2 = check_rh3_cond2(g, fam, mu, R, k, spec, pool=pool, threads=threads)
        rips = check_relative_rips(g, fam, mu, R, spec, pool=pool, threads=threads)
        reports.append(cond2.model_copy(update={"condition": f"rh3_cond2_R{R:g}"}))
        reports.append(rips.model_copy(update={"condition": f"rips_R{R:g}"}))
    return reports


# ---------------------------------------------------------------------------
# Weak (*)-asymptotically tree-graded triangles and (RH0)
# ---------------------------------------------------------------------------


def _side_rows(g: MetricGraph, tri: TriangleSample) -> FloatArray:
    return np.vstack([
        g.distances_to_set(side.vertex_set(), cache=False) for side in tri.sides
    ])


def _center(g: MetricGraph, tri: TriangleSample) -> tuple[float, int]:
    worst = np.max(_side_rows(g, tri), axis=0)
    best = float(np.min(worst))
    return best, int(np.flatnonzero(worst <= best + settings.distance_tolerance)[0])


def _peripheral_gap(
    g: MetricGraph, tri: TriangleSample, row: FloatArray, sigma: float
) -> tuple[float, tuple[int, int, int], tuple[int, int, int]] | None:
    """Max cyclic exit-to-entrance gap for N_sigma(P), or None if a side misses it."""
    entrances: list[int] = []
    exits: list[int] = []
    for side in tri.sides:
        bound = sigma + settings.distance_tolerance
        inside = np.flatnonzero(row[np.asarray(side.vertices)] <= bound)
        if inside.size == 0:
            return None
        entrances.append(side.vertices[int(inside[0])])
        exits.append(side.vertices[int(inside[-1])])
    gap = max(g.distance(exits[i], entrances[(i + 1) % 3]) for i in range(3))
    return gap, tuple(entrances), tuple(exits)  # type: ignore[return-value]


def classify_triangle_atg(
    g: MetricGraph,
    fam: PeripheralFamily,
    tri: TriangleSample,
    sigma: float,
    delta: float,
    *,
    field: FloatArray | None = None,
) -> TriangleClass:
    """Case C (a sigma-ball meets all sides), else case P for the least member
    whose sigma-neighborhood meets all sides with gaps <= delta, else neither."""
    if sigma < 0 or delta < 0:
        raise ParameterError(f"sigma and delta must be >= 0, got {sigma}, {delta}")
    value, center = _center(g, tri)
    if value <= sigma + settings.distance_tolerance:
        return CaseC(center=center, sigma=value)
    for i in range(len(fam)):
        row = field[i] if field is not None else g.distances_to_set(fam[i])
        found = _peripheral_gap(g, tri, row, sigma)
        if found is not None and found[0] <= delta + settings.distance_tolerance:
            return CaseP(member=i, entrances=found[1], exits=found[2], max_gap=found[0])
    return Neither()


def minimal_sigma(
    g: MetricGraph, fam: PeripheralFamily, tri: TriangleSample, delta: float,
    field: FloatArray,
) -> tuple[float, TriangleClass]:
    """Least sigma for which ``tri`` is case C or case P at gap ``delta``."""
    sigma_c, center = _center(g, tri)
    best: tuple[float, TriangleClass] = (sigma_c, CaseC(center=center, sigma=sigma_c))
    tol = settings.distance_tolerance
    for i in range(len(fam)):
        row = field[i]
        reach = max(float(np.min(row[np.asarray(s.vertices)])) for s in tri.sides)
        if reach >= best[0] - tol:
            continue
        levels = np.unique(np.concatenate([row[np.asarray(s.vertices)] for s in tri.sides]))
        for sigma in levels[(levels >= reach - tol) & (levels < best[0] - tol)]:
            found = _peripheral_gap(g, tri, row, float(sigma))
            if found is not None and found[0] <= delta + tol:
                best = (float(sigma), CaseP(member=i, entrances=found[1], exits=found[2],
                                            max_gap=found[0]))
                break
    return best


def check_rh0(
    g: MetricGraph,
    fam: PeripheralFamily,
    delta: float = 2.0,
    spec: SampleSpec | None = None,
    *,
    pool: VertexSet | None = None,
    threads: int | None = None,
) -> ConstantsReport:
    """sigma = the smallest radius making every sampled geodesic triangle case C or P."""
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")
    pool, spec = _pool_and_spec(g, pool, spec)
    log_event(logger, "info", EVENT_CHECK_STARTED, check="rh0", delta=delta,
              pool=len(pool), mode=spec.mode, seed=spec.seed)
    field = member_distances(g, fam)
    triples = sample_triples(pool.members, spec)

    def classify(corners: tuple[int, int, int]) -> tuple[float, TriangleClass]:
        return minimal_sigma(g, fam, triangle(g, *corners), delta, field)

    tracker = SupTracker("sigma")
    counts = {"C": 0, "P": 0}
    for corners, (sigma, klass) in zip(
        triples, parallel_map(classify, triples, threads=threads), strict=True
    ):
        counts[klass.kind] += 1
        members = (klass.member,) if isinstance(klass, CaseP) else ()
        tracker.offer(sigma, corners, members, note=f"case {klass.kind}")

    report = ConstantsReport(
        condition="rh0",
        constants={"sigma": tracker.value},
        witnesses=tracker.witnesses(),
        samples=len(triples),
        status="ok" if triples else "no-admissible-pairs",
        seed=spec.recorded_seed,
        mode=spec.mode,
        details={"delta": delta, "case_C": counts["C"], "case_P": counts["P"]},
    )
    return log_outcome(logger, report)


# ---------------------------------------------------------------------------
# Stability of transient sets along quasi-geodesics
# ---------------------------------------------------------------------------


def _first_inside(path: PathInSpace, row: FloatArray, radius: float) -> int | None:
    inside = np.flatnonzero(row[np.asarray(path.vertices)] <= radius + settings.distance_tolerance)
    return int(inside[0]) if inside.size else None


def check_transient_stability(
    g: MetricGraph,
    fam: PeripheralFamily,
    params: TransientParams,
    path_pairs: Sequence[tuple[PathInSpace, PathInSpace]],
    *,
    threads: int | None = None,
) -> ConstantsReport:
    """M = sup Hausdorff distance between the transient sets of paired paths.

    Also measures how far deep runs stray from their member (``t`` as a
    multiple of mu) and, for members whose mu-neighborhood the path crosses
    with diameter >= 2c, how far the entrance point is from a transient point.
    """
    for first, second in path_pairs:
        if {first.start, first.end} != {second.start, second.end}:
            raise EndpointMismatchError(
                f"paths {first.start}->{first.end} and {second.start}->{second.end} "
                "do not share endpoints"
            )
    log_event(logger, "info", EVENT_CHECK_STARTED, check="stability",
              pairs=len(path_pairs), mu=params.mu, c=params.c)
    field = member_distances(g, fam)
    tol = settings.distance_tolerance

    def clauses(path: PathInSpace) -> tuple[tuple[int, ...], float, float, int | None]:
        dec = decompose(g, fam, path, params, field=field)
        trans = dec.transient_vertices().members
        reach = 0.0
        for comp in dec.deep_components:
            run = np.asarray(path.vertices[comp.start : comp.end + 1])
            reach = max(reach, float(np.max(field[comp.member][run])))
        entrance = 0.0
        worst: int | None = None
        for i in range(len(fam)):
            first = _first_inside(path, field[i], params.mu)
            if first is None:
                continue
            inside = [v for v in path.vertices if field[i][v] <= params.mu + tol]
            if len(inside) < 2 or float(np.max(g.pairwise_distances(inside))) < 2 * params.c:
                continue
            gap, _, _ = farthest_point(g, [path.vertices[first]], list(trans))
            if gap > entrance:
                entrance, worst = gap, path.vertices[first]
        return trans, reach, entrance, worst

    def evaluate(pair: tuple[PathInSpace, PathInSpace]) -> tuple[float, float, float, int | None]:
        a, b = pair
        ta, reach_a, ent_a, worst_a = clauses(a)
        tb, reach_b, ent_b, worst_b = clauses(b)
        gap = small_hausdorff(g, ta, tb)
        worst = worst_a if ent_a >= ent_b else worst_b
        return gap, max(reach_a, reach_b), max(ent_a, ent_b), worst

    trackers = {s: SupTracker(s) for s in ("M", "deep_reach", "entrance")}
    for (a, b), (gap, reach, entrance, worst) in zip(
        path_pairs, parallel_map(evaluate, list(path_pairs), threads=threads), strict=True
    ):
        ends = (a.start, a.end)
        trackers["M"].offer(gap, ends)
        trackers["deep_reach"].offer(reach, ends)
        trackers["entrance"].offer(entrance, ends if worst is None else (*ends, worst))

    constants = {s: tr.value for s, tr in trackers.items()}
    if params.mu > 0:
        constants["t"] = max(1.0, constants["deep_reach"] / params.mu)
    report = ConstantsReport(
        condition="stability",
        constants=constants,
        witnesses=[w for tr in trackers.values() for w in tr.witnesses()],
        samples=len(path_pairs),
        status="ok" if path_pairs else "no-admissible-pairs",
        details={"mu": params.mu, "c": params.c, "arclength": params.arclength},
    )
    return log_outcome(logger, report)


def quasi_geodesic_pairs(
    g: MetricGraph,
    pairs: Sequence[tuple[int, int]],
    *,
    variants: int | None = None,
    seed: int | None = None,
) -> list[tuple[PathInSpace, PathInSpace]]:
    """Canonical geodesic against each near-geodesic detour, per endpoint pair."""
    out: list[tuple[PathInSpace, PathInSpace]] = []
    for x, y in pairs:
        paths = geodesic_variants(g, x, y, count=variants, seed=seed)
        out.extend((paths[0], other) for other in paths[1:])
        if len(paths) == 1:
            out.append((paths[0], paths[0]))
    return out

