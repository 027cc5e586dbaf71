"""Audit of a guessed path family against the guessing-geodesics conditions.

A :class:`GGFamily` assigns to every pool pair a path ``eta(x, y)`` and a
subset ``trans(x, y)`` of its vertices.  Each condition is measured as the
smallest constant it needs over the pool, so a family is ``plausible`` when
every measured constant stays under the cap.

Conditions, by report name:

- ``gg1``: diam(trans(x,y)) for d(x,y) <= 2;
- ``gg2``: trans(x',y') against trans(x,y) restricted to [x',y'] plus {x',y'};
- ``gg3``: trans(x,y) ⊆ N_D(trans(x,z) ∪ trans(z,y));
- ``gg4``: a transient point between any two pool points of eta(x,y) that
  are not both near one member (D = how near they must be allowed to be; with
  no members a stretch without transient points scores its own length);
- ``gg5``: (alpha1);
- ``gg6``: pairs near one member have trans in B_K(x) ∪ B_K(y) and a point in N_K(P).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from itertools import combinations

import numpy as np

from relhyp.core.logging import EVENT_CHECK_COMPLETED, EVENT_CHECK_STARTED, log_event
from relhyp.core.settings import settings
from relhyp.models.graph import PathInSpace, VertexSet
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.reports import ConstantsReport
from relhyp.models.transient import GGAudit, GGFamily, GGFamilyError, TransientParams
from relhyp.services.metric_graph import (
    MetricGraph,
    concatenate_paths,
    farthest_point,
    geodesic,
    small_hausdorff,
)
from relhyp.services.parallel import parallel_map
from relhyp.services.peripherals import check_alpha1, set_diameter
from relhyp.services.sampling import (
    SampleSpec,
    SupTracker,
    auto_spec,
    log_outcome,
    sample_pairs,
    sample_triples,
)
from relhyp.services.transient import decompose, member_distances

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Producers
# ---------------------------------------------------------------------------


def geodesic_family(
    g: MetricGraph,
    fam: PeripheralFamily,
    pool: VertexSet,
    params: TransientParams | None = None,
    *,
    D: float = 0.0,
) -> GGFamily:
    """Canonical geodesics with their transient sets on every pool pair."""
    field = member_distances(g, fam)
    eta: dict[tuple[int, int], PathInSpace] = {}
    trans: dict[tuple[int, int], tuple[int, ...]] = {}
    for x, y in combinations(pool.members, 2):
        path = geodesic(g, x, y)
        eta[(x, y)] = path
        trans[(x, y)] = decompose(g, fam, path, params, field=field).transient
    return GGFamily(pool=pool, eta=eta, trans=trans, D=D)


def hub_corrupted_family(
    g: MetricGraph, base: GGFamily, hub: int | None, min_length: float
) -> GGFamily:
    """Reroute pool pairs at distance >= ``min_length`` through ``hub``.

    A pair is rerouted only when the detour x -> hub -> y is at least twice
    d(x, y); the detour is fully transient.  ``hub=None`` takes the vertex
    farthest from the pool.
    """
    tol = settings.distance_tolerance
    if hub is None:
        hub = farthest_point(g, range(g.vertex_count), base.pool.members)[1]
    g.check_vertex(hub)
    to_hub = g.distance_rows([hub])[0]
    eta = dict(base.eta)
    trans = dict(base.trans)
    rerouted = 0
    for x, y in base.eta:
        d = g.distance(x, y)
        if d + tol < min_length or to_hub[x] + to_hub[y] + tol < 2 * d:
            continue
        detour = concatenate_paths(g, [geodesic(g, x, hub), geodesic(g, hub, y)])
        eta[(x, y)] = detour
        trans[(x, y)] = tuple(range(len(detour)))
        rerouted += 1
    logger.debug("hub_corrupted_family: hub=%d rerouted=%d pairs=%d", hub, rerouted, len(eta))
    return GGFamily(pool=base.pool, eta=eta, trans=trans, D=base.D)


def _validate(family: GGFamily) -> None:
    if len(family.pool) < 3:
        raise GGFamilyError(f"family pool needs at least 3 vertices, got {len(family.pool)}")
    for pair in combinations(family.pool.members, 2):
        if pair not in family.eta:
            raise GGFamilyError(f"family has no path for pool pair {pair}")
        path = family.eta[pair]
        if (path.start, path.end) != pair:
            raise GGFamilyError(f"path for {pair} runs {path.start} -> {path.end}")
        indices = family.trans[pair]
        if 0 not in indices or len(path) - 1 not in indices:
            raise GGFamilyError(f"transient set of {pair} must contain both endpoints")


def _pool_positions(path: PathInSpace, pool: VertexSet) -> list[tuple[int, int]]:
    """``(vertex, first index)`` for every pool vertex on ``path``."""
    seen: dict[int, int] = {}
    for i, v in enumerate(path.vertices):
        if v in pool and v not in seen:
            seen[v] = i
    return sorted(seen.items(), key=lambda item: item[1])


# ---------------------------------------------------------------------------
# The audit
# ---------------------------------------------------------------------------


def gg_condition_audit(
    g: MetricGraph,
    fam: PeripheralFamily,
    family: GGFamily,
    *,
    k_values: Sequence[float] = (1.0, 2.0),
    K_alpha1: float = 1.0,
    cap: float | None = None,
    spec: SampleSpec | None = None,
    threads: int | None = None,
) -> GGAudit:
    """Measure every condition over the family's pool and compare with ``cap``."""
    _validate(family)
    cap = settings.gg_cap if cap is None else cap
    spec = auto_spec(len(family.pool)) if spec is None else spec
    log_event(logger, "info", EVENT_CHECK_STARTED, check="gg", pool=len(family.pool),
              members=len(fam), cap=cap, mode=spec.mode, seed=spec.seed)
    pairs = sample_pairs(family.pool.members, spec)
    reports = [
        _condition_small_pairs(g, family, pairs, spec),
        _condition_restriction(g, family, pairs, spec, threads),
        _condition_thin(g, family, spec, threads),
        _condition_between(g, fam, family, pairs, spec),
        check_alpha1(g, fam, K_alpha1, threads=threads).model_copy(update={"condition": "gg5"}),
        _condition_near_member(g, fam, family, k_values, spec, threads),
    ]
    audit = GGAudit(reports=tuple(reports), cap=cap)
    log_event(logger, "info", EVENT_CHECK_COMPLETED, check="gg", plausible=audit.plausible,
              over_cap=len(audit.over_cap()))
    return audit


def _report(
    condition: str,
    trackers: Sequence[SupTracker],
    samples: int,
    spec: SampleSpec,
    **details: object,
) -> ConstantsReport:
    report = ConstantsReport(
        condition=condition,
        constants={tr.symbol: tr.value for tr in trackers},
        witnesses=[w for tr in trackers for w in tr.witnesses()],
        samples=samples,
        status="ok" if samples else "no-admissible-pairs",
        seed=spec.recorded_seed,
        mode=spec.mode,
        details=dict(details),
    )
    return log_outcome(logger, report)


def _condition_small_pairs(
    g: MetricGraph, family: GGFamily, pairs: list[tuple[int, int]], spec: SampleSpec
) -> ConstantsReport:
    tracker = SupTracker("D")
    close = [(x, y) for x, y in pairs if g.distance(x, y) <= 2 + settings.distance_tolerance]
    for x, y in close:
        value, ends = set_diameter(g, family.trans_vertices(x, y))
        tracker.offer(value, (x, y, *ends))
    return _report("gg1", [tracker], len(close), spec)


def _condition_restriction(
    g: MetricGraph,
    family: GGFamily,
    pairs: list[tuple[int, int]],
    spec: SampleSpec,
    threads: int | None,
) -> ConstantsReport:
    def worst(pair: tuple[int, int]) -> list[tuple[float, tuple[int, ...]]]:
        x, y = pair
        path = family.path(x, y)
        indices = family.trans_indices(x, y)
        out = []
        for (xp, i), (yp, j) in combinations(_pool_positions(path, family.pool), 2):
            restricted = {path.vertices[t] for t in indices if i <= t <= j} | {xp, yp}
            inner = family.trans_vertices(xp, yp).members
            out.append((small_hausdorff(g, inner, sorted(restricted)), (x, y, xp, yp)))
        return out

    tracker = SupTracker("D")
    count = 0
    for results in parallel_map(worst, pairs, threads=threads):
        for value, verts in results:
            count += 1
            tracker.offer(value, verts)
    return _report("gg2", [tracker], count, spec)


def _condition_thin(
    g: MetricGraph, family: GGFamily, spec: SampleSpec, threads: int | None
) -> ConstantsReport:
    triples = sample_triples(family.pool.members, spec)

    def defect(corners: tuple[int, int, int]) -> tuple[float, tuple[int, ...]]:
        a, b, c = corners
        best: tuple[float, tuple[int, ...]] = (0.0, corners)
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            union = sorted({*family.trans_vertices(x, z), *family.trans_vertices(z, y)})
            value, far, _ = farthest_point(g, family.trans_vertices(x, y).members, union)
            if value > best[0]:
                best = (value, (x, y, z, far))
        return best

    tracker = SupTracker("D")
    for value, verts in parallel_map(defect, triples, threads=threads):
        tracker.offer(value, verts, note="trans(x,y) far from trans(x,z) ∪ trans(z,y)")
    return _report("gg3", [tracker], len(triples), spec)


def _condition_between(
    g: MetricGraph,
    fam: PeripheralFamily,
    family: GGFamily,
    pairs: list[tuple[int, int]],
    spec: SampleSpec,
) -> ConstantsReport:
    tracker = SupTracker("D")
    field = member_distances(g, fam) if fam else None
    count = 0
    gaps = 0
    for x, y in pairs:
        path = family.path(x, y)
        indices = np.asarray(family.trans_indices(x, y))
        for (xp, i), (yp, j) in combinations(_pool_positions(path, family.pool), 2):
            count += 1
            if np.any((indices >= i) & (indices <= j)):
                tracker.offer(0.0, (x, y, xp, yp))
                continue
            gaps += 1
            if field is None:
                # no member excuses the stretch
                tracker.offer(path.arclength(i, j), (x, y, xp, yp),
                              note="no transient point between, no member nearby")
                continue
            reach = np.maximum(field[:, xp], field[:, yp])
            member = int(np.argmin(reach))
            tracker.offer(float(reach[member]), (x, y, xp, yp), (member,),
                          note="no transient point between")
    return _report("gg4", [tracker], count, spec, untransient_stretches=gaps)


def _condition_near_member(
    g: MetricGraph,
    fam: PeripheralFamily,
    family: GGFamily,
    k_values: Sequence[float],
    spec: SampleSpec,
    threads: int | None,
) -> ConstantsReport:
    trackers = [SupTracker(f"K_k{k:g}") for k in k_values]
    if not fam:
        return _report("gg6", trackers, 0, spec, vacuous="empty family")
    field = member_distances(g, fam)
    pool = family.pool.as_array()
    tol = settings.distance_tolerance
    count = 0
    for tracker, k in zip(trackers, k_values, strict=True):
        items: list[tuple[int, int, int]] = []
        for i in range(len(fam)):
            near = pool[field[i][pool] <= k + tol]
            items.extend((i, int(x), int(y)) for x, y in combinations(near.tolist(), 2))

        def need(item: tuple[int, int, int]) -> float:
            i, x, y = item
            trans = family.trans_vertices(x, y).as_array()
            spread = float(np.max(np.min(g.distance_rows([x, y])[:, trans], axis=0)))
            entry = float(np.min(field[i][trans]))
            return min(max(spread, entry), g.distance(x, y))

        for (i, x, y), value in zip(items, parallel_map(need, items, threads=threads),
                                    strict=True):
            tracker.offer(value, (x, y), (i,))
        count += len(items)
    return _report("gg6", trackers, count, spec, k_values=list(k_values))


# ---------------------------------------------------------------------------
# Comparison with transient sets of near-geodesics
# ---------------------------------------------------------------------------


def gg_compare(
    g: MetricGraph,
    fam: PeripheralFamily,
    family: GGFamily,
    params: TransientParams,
    betas: Sequence[PathInSpace],
    *,
    threads: int | None = None,
) -> ConstantsReport:
    """sup over betas of d_Haus(trans(x, y), trans_{mu,c}(beta))."""
    log_event(logger, "info", EVENT_CHECK_STARTED, check="gg_compare", betas=len(betas),
              mu=params.mu, c=params.c)
    field = member_distances(g, fam)

    def gap(beta: PathInSpace) -> float:
        guessed = family.trans_vertices(beta.start, beta.end).members
        measured = decompose(g, fam, beta, params, field=field).transient_vertices().members
        return small_hausdorff(g, guessed, measured)

    tracker = SupTracker("L_plus_c")
    for beta, value in zip(betas, parallel_map(gap, list(betas), threads=threads), strict=True):
        tracker.offer(value, (beta.start, beta.end))
    report = ConstantsReport(
        condition="gg_compare",
        constants={"L_plus_c": tracker.value},
        witnesses=tracker.witnesses(),
        samples=len(betas),
        status="ok" if betas else "no-admissible-pairs",
        details={"mu": params.mu, "c": params.c},
    )
    return log_outcome(logger, report)
