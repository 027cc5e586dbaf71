"""Divergence of a metric graph: detours around forbidden balls and their growth.

``div(a, b, c)`` is the length of a shortest a-b path avoiding the ball
``B(c, delta*r - gamma)`` with ``r = d(c, {a, b})``; ``Div(n)`` is its
supremum over triples with ``d(a, b) <= n``.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from relhyp.core.errors import RelHypError
from relhyp.core.logging import EVENT_CHECK_COMPLETED, EVENT_CHECK_STARTED, log_event
from relhyp.core.settings import settings
from relhyp.models.graph import PathInSpace, VertexSet
from relhyp.models.reports import (
    ConstantsReport,
    DivergenceRecord,
    DivergenceReport,
    GrowthClass,
    GrowthFit,
)
from relhyp.services.metric_graph import (
    MetricGraph,
    eccentricity,
    interior_vertices,
    shortest_path,
)
from relhyp.services.parallel import parallel_map
from relhyp.services.sampling import SampleSpec, SupTracker, auto_spec, log_outcome, sample_triples

logger = logging.getLogger(__name__)

_SEPARATION = 2.0
_POWER_MARGIN = 0.05


class DivergencePreconditionError(RelHypError):
    error_category = "validation"


class TooFewPointsError(RelHypError):
    error_category = "validation"


class DivergenceParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float = Field(default=0.5, gt=0, lt=1)
    gamma: float = Field(default=0.0, ge=0)


# ---------------------------------------------------------------------------
# Pointwise divergence
# ---------------------------------------------------------------------------


def forbidden_ball(g: MetricGraph, c: int, radius: float, *, closed: bool = False) -> VertexSet:
    """Vertices with ``d(c, v) < radius`` (``<=`` when ``closed``)."""
    if radius <= 0:
        return VertexSet(())
    row = g.distances_from(c)
    tol = settings.distance_tolerance
    inside = row <= radius + tol if closed else row < radius - tol
    return VertexSet(np.flatnonzero(inside).tolist())


def _forbidden_radius(g: MetricGraph, a: int, b: int, c: int, params: DivergenceParams) -> float:
    r = min(g.distance(c, a), g.distance(c, b))
    if r <= settings.distance_tolerance:
        raise DivergencePreconditionError(f"centre {c} coincides with an endpoint of ({a}, {b})")
    return params.delta * r - params.gamma


def div_point(
    g: MetricGraph,
    a: int,
    b: int,
    c: int,
    params: DivergenceParams | None = None,
    *,
    closed: bool = False,
) -> float:
    """Shortest a-b detour around the forbidden ball of ``c``; ``inf`` if none exists."""
    params = DivergenceParams() if params is None else params
    for v in (a, b, c):
        g.check_vertex(v)
    radius = _forbidden_radius(g, a, b, c, params)
    if radius <= 0:
        return g.distance(a, b)
    ball = forbidden_ball(g, c, radius, closed=closed)
    if a in ball or b in ball:
        raise DivergencePreconditionError(
            f"endpoint of ({a}, {b}) lies inside the forbidden ball of radius {radius:g} at {c}"
        )
    return float(g.distances_avoiding(a, ball)[b])


# ---------------------------------------------------------------------------
# Divergence function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Triple:
    a: int
    b: int
    c: int
    span: float


def _triples(g: MetricGraph, pool: VertexSet, spec: SampleSpec, n_max: int) -> list[_Triple]:
    """Each sampled corner triple in its three roles, spans up to ``n_max``."""
    out: list[_Triple] = []
    bound = n_max + settings.distance_tolerance
    for x, y, z in sample_triples(pool.members, spec):
        for a, b, c in ((x, y, z), (x, z, y), (y, z, x)):
            span = g.distance(a, b)
            if span <= bound:
                out.append(_Triple(a, b, c, span))
    return out


def div_function(
    g: MetricGraph,
    n_max: int,
    params: DivergenceParams | None = None,
    spec: SampleSpec | None = None,
    *,
    closed: bool = False,
    center: int = 0,
    margin: int | None = None,
    threads: int | None = None,
) -> DivergenceReport:
    """``Div(n)`` for ``n = 1..n_max`` over triples of the interior sub-ball.

    The default boundary margin is a third of the ball radius.  Triples with
    no detour are counted per n and left out of the sup whenever a finite
    value exists at that n.
    """
    if n_max < 2:
        raise DivergencePreconditionError(f"n_max must be >= 2, got {n_max}")
    params = DivergenceParams() if params is None else params
    if margin is None:
        margin = math.ceil(eccentricity(g, center) / 3)
    pool = interior_vertices(g, center, margin)
    spec = auto_spec(len(pool)) if spec is None else spec
    log_event(logger, "info", EVENT_CHECK_STARTED, check="divergence", pool=len(pool),
              n_max=n_max, delta=params.delta, gamma=params.gamma, margin=margin,
              mode=spec.mode, seed=spec.seed)

    # One avoiding-Dijkstra row per (source, centre, radius) serves every b.
    groups: dict[tuple[int, int, float], list[_Triple]] = defaultdict(list)
    for t in _triples(g, pool, spec, n_max):
        radius = _forbidden_radius(g, t.a, t.b, t.c, params)
        groups[(t.a, t.c, round(radius, 9))].append(t)

    def evaluate(key: tuple[int, int, float]) -> list[tuple[_Triple, float]]:
        a, c, radius = key
        if radius <= 0:
            return [(t, t.span) for t in groups[key]]
        row = g.distances_avoiding(a, forbidden_ball(g, c, radius, closed=closed))
        return [(t, float(row[t.b])) for t in groups[key]]

    keys = sorted(groups)
    values = [pair for chunk in parallel_map(evaluate, keys, threads=threads) for pair in chunk]
    values.sort(key=lambda item: (item[0].span, item[0].a, item[0].b, item[0].c))

    records = []
    for n in range(1, n_max + 1):
        bound = n + settings.distance_tolerance
        tracker = SupTracker("div")
        infinite = 0
        samples = 0
        for t, value in values:
            if t.span > bound:
                break
            samples += 1
            if math.isfinite(value):
                tracker.offer(value, (t.a, t.b, t.c))
            else:
                infinite += 1
        w = tracker.witness
        records.append(DivergenceRecord(
            n=n,
            div_sup=w.value if w is not None else None,
            triple=tuple(w.vertices) if w is not None else None,  # type: ignore[arg-type]
            infinite_count=infinite,
            samples=samples,
        ))

    report = DivergenceReport(
        delta=params.delta,
        gamma=params.gamma,
        closed_ball=closed,
        margin=margin,
        records=records,
        seed=spec.recorded_seed,
        mode=spec.mode,
    )
    ns, sups = report.finite_series()
    if len(ns) >= 4:
        report = report.model_copy(update={"growth": classify_growth(report)})
    log_event(logger, "info", EVENT_CHECK_COMPLETED, check="divergence", records=len(records),
              finite=len(ns), last=sups[-1] if sups else None,
              growth=report.growth.classification if report.growth else None)
    return report


# ---------------------------------------------------------------------------
# Growth classification
# ---------------------------------------------------------------------------


def _relative_residual(observed: np.ndarray, fitted: np.ndarray) -> float:
    return float(np.sum(((fitted - observed) / observed) ** 2))


def fit_growth(ns: Sequence[float], values: Sequence[float]) -> GrowthFit:
    """Least-squares linear, exponential and power fits; the best one must win by 2x.

    The power fit is a candidate only when it beats the linear fit by 2x.
    """
    if len(ns) < 4:
        raise TooFewPointsError(f"growth fit needs at least 4 finite points, got {len(ns)}")
    n = np.asarray(ns, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if np.any(y <= 0):
        raise TooFewPointsError("growth fit needs positive values")

    slope, intercept = np.polyfit(n, y, 1)
    rate, log_scale = np.polyfit(n, np.log(y), 1)
    exponent, log_coeff = np.polyfit(np.log(n), np.log(y), 1)
    residuals = {
        "linear": _relative_residual(y, slope * n + intercept),
        "exponential": _relative_residual(y, np.exp(rate * n + log_scale)),
        "power": _relative_residual(y, np.exp(log_coeff) * n**exponent),
    }
    parameters = {
        "linear": [float(slope), float(intercept)],
        "exponential": [float(rate), float(log_scale)],
        "power": [float(exponent), float(log_coeff)],
    }
    candidates: dict[str, GrowthClass] = {
        "linear": "linear",
        "exponential": "exponential-compatible",
    }
    # power competes only once it beats linear by the separation factor
    if exponent > 1 + _POWER_MARGIN and residuals["power"] * _SEPARATION <= residuals["linear"]:
        candidates["power"] = "superlinear-subexponential"

    ranked = sorted(candidates, key=lambda k: residuals[k])
    best = ranked[0]
    floor = settings.distance_tolerance
    separated = all(
        residuals[other] > floor and residuals[best] * _SEPARATION <= residuals[other]
        for other in ranked[1:]
    )
    return GrowthFit(
        classification=candidates[best] if separated else "inconclusive",
        residuals=residuals,
        parameters=parameters,
    )


def classify_growth(report: DivergenceReport) -> GrowthFit:
    ns, values = report.finite_series()
    return fit_growth([float(v) for v in ns], values)


# ---------------------------------------------------------------------------
# Logarithmic detours and the annulus bound
# ---------------------------------------------------------------------------


def check_log_detour(
    g: MetricGraph,
    axis: PathInSpace,
    samples: int = 200,
    seed: int = 0,
    *,
    threads: int | None = None,
) -> ConstantsReport:
    """Least C with ``d(c, beta) <= C log2 l(beta) + C`` over sampled detours.

    A detour around an axis point ``c`` joins two axis points on either side
    of ``c`` while avoiding an open ball around it.
    """
    log_event(logger, "info", EVENT_CHECK_STARTED, check="log_detour",
              axis=len(axis), samples=samples, seed=seed)
    rng = np.random.default_rng(seed)
    half = (len(axis) - 1) // 2
    draws: list[tuple[int, int, int, int]] = []
    if half >= 2:
        for _ in range(samples):
            s = int(rng.integers(2, half + 1))
            i = int(rng.integers(s, len(axis) - s))
            rho = int(rng.integers(1, s))
            draws.append((axis.vertices[i - s], axis.vertices[i + s], axis.vertices[i], rho))
    draws = sorted(set(draws))

    def evaluate(draw: tuple[int, int, int, int]) -> tuple[float, float] | None:
        a, b, c, rho = draw
        ball = forbidden_ball(g, c, float(rho))
        if a in ball or b in ball:
            return None
        beta = shortest_path(g, a, b, ball)
        if beta is None:
            return None
        reach = float(np.min(g.distances_from(c)[list(beta.vertices)]))
        return reach, beta.length

    tracker = SupTracker("C")
    blocked = 0
    for draw, outcome in zip(draws, parallel_map(evaluate, draws, threads=threads), strict=True):
        if outcome is None:
            blocked += 1
            continue
        reach, length = outcome
        need = reach / (math.log2(max(length, 1.0)) + 1.0)
        a, b, c, rho = draw
        tracker.offer(need, (a, b, c), note=f"rho={rho} length={length:g} reach={reach:g}")
    report = ConstantsReport(
        condition="log_detour",
        constants={"C": tracker.value},
        witnesses=tracker.witnesses(),
        samples=len(draws),
        status="ok" if tracker.items else "no-admissible-pairs",
        seed=seed,
        mode="sample",
        details={"blocked": blocked},
    )
    return log_outcome(logger, report)


def annulus_path_bound(
    g: MetricGraph,
    a: int,
    b: int,
    c: int,
    params: DivergenceParams | None = None,
) -> float:
    """Upper bound for any finite ``div(a, b, c)``: a simple detour visits each
    vertex outside the forbidden ball at most once."""
    params = DivergenceParams() if params is None else params
    radius = _forbidden_radius(g, a, b, c, params)
    outside = g.vertex_count - len(forbidden_ball(g, c, radius))
    return max(outside - 1, 0) * g.max_edge_length
