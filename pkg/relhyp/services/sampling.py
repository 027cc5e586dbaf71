"""Seeded item samplers, sup aggregation and trend classification.

Every sampler is exhaustive when the pool is small enough
(``settings.exhaustive_pool_limit``) and otherwise draws from a
``numpy.random.default_rng(seed)`` stream, so a seed fixes the items.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from relhyp.core.errors import ParameterError
from relhyp.core.logging import (
    EVENT_CHECK_COMPLETED,
    EVENT_CHECK_VIOLATION,
    EVENT_SAMPLING_EXHAUSTED,
    log_event,
)
from relhyp.core.settings import settings
from relhyp.models.graph import PathInSpace
from relhyp.models.reports import ConstantsReport, Witness
from relhyp.services.metric_graph import MetricGraph, concatenate_paths, geodesic


class MissingSeedError(ParameterError):
    """Sample mode was requested without a seed."""


@dataclass(frozen=True)
class SampleSpec:
    """``exhaustive`` or ``sample`` with ``count`` items drawn from ``seed``."""

    mode: str = "exhaustive"
    count: int = 200
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("exhaustive", "sample"):
            raise ParameterError(f"unknown sampling mode {self.mode!r}")
        if self.mode == "sample" and self.seed is None:
            raise MissingSeedError("sample mode requires a seed")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed if self.seed is not None else 0)

    @property
    def recorded_seed(self) -> int | None:
        return self.seed if self.mode == "sample" else None


EXHAUSTIVE = SampleSpec()


def auto_spec(
    pool_size: int, *, seed: int | None = None, count: int = 200, limit: int | None = None
) -> SampleSpec:
    """Exhaustive up to ``limit`` pool vertices, seeded sampling above."""
    limit = settings.exhaustive_pool_limit if limit is None else limit
    if pool_size <= limit:
        return EXHAUSTIVE
    return SampleSpec(mode="sample", count=count, seed=0 if seed is None else seed)


def _effective(spec: SampleSpec, pool_size: int, arity: int) -> bool:
    """True when items should be enumerated exhaustively."""
    if spec.mode == "exhaustive":
        return True
    return math.comb(pool_size, arity) <= spec.count


def sample_pairs(pool: Sequence[int], spec: SampleSpec) -> list[tuple[int, int]]:
    """Unordered pairs of distinct pool vertices, ``(x, y)`` with ``x < y``."""
    items = sorted(set(int(v) for v in pool))
    if len(items) < 2:
        return []
    if _effective(spec, len(items), 2):
        return list(combinations(items, 2))
    rng = spec.rng()
    picked: set[tuple[int, int]] = set()
    attempts = 0
    while len(picked) < spec.count and attempts < 20 * spec.count:
        a, b = rng.choice(len(items), size=2, replace=False)
        x, y = sorted((items[int(a)], items[int(b)]))
        picked.add((x, y))
        attempts += 1
    return sorted(picked)


def sample_triples(pool: Sequence[int], spec: SampleSpec) -> list[tuple[int, int, int]]:
    """Corner triples of distinct pool vertices in ascending order."""
    items = sorted(set(int(v) for v in pool))
    if len(items) < 3:
        return []
    if _effective(spec, len(items), 3):
        return list(combinations(items, 3))
    rng = spec.rng()
    picked: set[tuple[int, int, int]] = set()
    attempts = 0
    while len(picked) < spec.count and attempts < 20 * spec.count:
        idx = rng.choice(len(items), size=3, replace=False)
        a, b, c = sorted(items[int(i)] for i in idx)
        picked.add((a, b, c))
        attempts += 1
    return sorted(picked)


def subsample(pool: Sequence[int], size: int, seed: int | None) -> list[int]:
    """At most ``size`` pool vertices; the seeded choice is sorted back into id order."""
    items = sorted(set(int(v) for v in pool))
    if len(items) <= size:
        return items
    rng = np.random.default_rng(seed if seed is not None else 0)
    return sorted(int(v) for v in rng.choice(items, size=size, replace=False))


def geodesic_variants(
    g: MetricGraph,
    x: int,
    y: int,
    *,
    count: int | None = None,
    seed: int | None = None,
) -> list[PathInSpace]:
    """Canonical geodesic plus up to ``count`` detours through near-midpoints.

    A detour runs through a vertex ``m`` off the canonical path with
    ``d(x, m) + d(m, y) <= d(x, y) + slack`` (slack = one longest edge).
    """
    count = settings.geodesic_variants if count is None else count
    canonical = geodesic(g, x, y)
    if count <= 0 or x == y:
        return [canonical]
    dx = g.distances_from(x)
    dy = g.distances_from(y)
    slack = g.max_edge_length + settings.distance_tolerance
    on_path = set(canonical.vertices)
    candidates = [
        int(m)
        for m in np.flatnonzero(dx + dy <= dx[y] + slack).tolist()
        if m not in on_path
    ]
    if not candidates:
        return [canonical]
    rng = np.random.default_rng(seed if seed is not None else x * 7919 + y)
    chosen = sorted(
        rng.choice(candidates, size=min(count, len(candidates)), replace=False).tolist()
    )
    variants = [canonical]
    for m in chosen:
        variants.append(concatenate_paths(g, [geodesic(g, x, int(m)), geodesic(g, int(m), y)]))
    return variants


class SupTracker:
    """Running supremum with the first item achieving it."""

    def __init__(self, symbol: str) -> None:
        self.symbol = symbol
        self.value = 0.0
        self.items = 0
        self._witness: Witness | None = None

    def offer(
        self,
        value: float,
        vertices: Sequence[int] = (),
        members: Sequence[int] = (),
        note: str = "",
    ) -> None:
        self.items += 1
        if self._witness is None or value > self.value + settings.distance_tolerance:
            self.value = max(float(value), 0.0) if self._witness is None else float(value)
            self._witness = Witness(
                symbol=self.symbol,
                value=self.value,
                vertices=tuple(int(v) for v in vertices),
                members=tuple(int(m) for m in members),
                note=note,
            )

    @property
    def witness(self) -> Witness | None:
        return self._witness

    def witnesses(self) -> list[Witness]:
        return [self._witness] if self._witness is not None else []


def log_outcome(logger: logging.Logger, report: ConstantsReport) -> ConstantsReport:
    """Emit the completion (and violation) events for a finished audit."""
    log_event(
        logger, "info", EVENT_CHECK_COMPLETED,
        check=report.condition, status=report.status, samples=report.samples,
        **{k: round(v, 6) for k, v in report.constants.items()},
    )
    if report.status == "violation":
        log_event(
            logger, "warning", EVENT_CHECK_VIOLATION,
            check=report.condition, violations=len(report.violations),
        )
    elif report.status == "no-admissible-pairs":
        log_event(logger, "warning", EVENT_SAMPLING_EXHAUSTED, check=report.condition)
    return report


def classify_trend(radii: Sequence[int], values: Sequence[float]) -> str:
    """``stable`` if the last two values differ by <= 1, ``growing`` if the series
    gains at least half the radius increase, ``inconclusive`` otherwise."""
    if len(values) < 2:
        return "inconclusive"
    if abs(values[-1] - values[-2]) <= 1.0 + settings.distance_tolerance:
        return "stable"
    if values[-1] - values[0] >= (radii[-1] - radii[0]) / 2:
        return "growing"
    return "inconclusive"
