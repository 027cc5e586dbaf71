"""Types for deep/transient decompositions, triangles and guessed-geodesic families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

from pydantic import BaseModel, ConfigDict, Field

from relhyp.core.errors import RelHypError
from relhyp.models.graph import PathInSpace, VertexSet
from relhyp.models.reports import ConstantsReport


class TransientParams(BaseModel):
    """Depth ``mu`` around peripherals and collar ``c`` along the path.

    ``arclength`` measures the collar along the path instead of in the
    ambient metric.
    """

    model_config = ConfigDict(frozen=True)

    mu: float = Field(default=1.0, ge=0)
    c: float = Field(default=2.0, ge=0)
    arclength: bool = False


class DeepComponent(NamedTuple):
    member: int
    start: int
    end: int


@dataclass(frozen=True)
class TransientDecomposition:
    """``transient`` and the deep component index ranges partition the path."""

    path: PathInSpace
    transient: tuple[int, ...]
    deep_components: tuple[DeepComponent, ...]

    def transient_vertices(self) -> VertexSet:
        return VertexSet(tuple(self.path.vertices[i] for i in self.transient))

    def is_transient(self, index: int) -> bool:
        return index in self.transient

    def member_of(self, index: int) -> int | None:
        for comp in self.deep_components:
            if comp.start <= index <= comp.end:
                return comp.member
        return None


@dataclass(frozen=True)
class TriangleSample:
    """Corners ``(v0, v1, v2)`` and sides ``[v0,v1]``, ``[v1,v2]``, ``[v2,v0]``."""

    corners: tuple[int, int, int]
    sides: tuple[PathInSpace, PathInSpace, PathInSpace]


class CaseC(BaseModel):
    kind: Literal["C"] = "C"
    center: int
    sigma: float


class CaseP(BaseModel):
    kind: Literal["P"] = "P"
    member: int
    entrances: tuple[int, int, int]
    exits: tuple[int, int, int]
    max_gap: float


class Neither(BaseModel):
    kind: Literal["neither"] = "neither"


TriangleClass = CaseC | CaseP | Neither


class GGFamilyError(RelHypError):
    error_category = "input"


@dataclass(frozen=True)
class GGFamily:
    """Path assignment ``eta`` and transient subsets ``trans`` on a vertex pool.

    Keys are ordered pairs ``(x, y)`` with ``x < y``; lookups in the other
    orientation reverse the stored path.  ``trans`` holds indices into the
    path and always contains both endpoints.
    """

    pool: VertexSet
    eta: dict[tuple[int, int], PathInSpace]
    trans: dict[tuple[int, int], tuple[int, ...]]
    D: float = 0.0

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.eta)

    def path(self, x: int, y: int) -> PathInSpace:
        if (x, y) in self.eta:
            return self.eta[(x, y)]
        if (y, x) in self.eta:
            return self.eta[(y, x)].reversed()
        raise GGFamilyError(f"family has no path for pool pair ({x}, {y})")

    def trans_indices(self, x: int, y: int) -> tuple[int, ...]:
        if (x, y) in self.trans:
            return self.trans[(x, y)]
        if (y, x) in self.trans:
            last = len(self.eta[(y, x)]) - 1
            return tuple(sorted(last - i for i in self.trans[(y, x)]))
        raise GGFamilyError(f"family has no transient set for pool pair ({x}, {y})")

    def trans_vertices(self, x: int, y: int) -> VertexSet:
        path = self.path(x, y)
        return VertexSet(tuple(path.vertices[i] for i in self.trans_indices(x, y)))


@dataclass(frozen=True)
class GGAudit:
    """Per-condition reports of a guessed-geodesics audit.

    ``plausible`` holds when every measured constant is at most ``cap``.
    """

    reports: tuple[ConstantsReport, ...]
    cap: float

    @property
    def plausible(self) -> bool:
        return all(v <= self.cap for r in self.reports for v in r.constants.values())

    def report(self, condition: str) -> ConstantsReport:
        for r in self.reports:
            if r.condition == condition:
                return r
        raise KeyError(condition)

    def over_cap(self) -> list[tuple[str, str, float]]:
        """``(condition, symbol, value)`` for every constant above the cap."""
        return [
            (r.condition, symbol, value)
            for r in self.reports
            for symbol, value in r.constants.items()
            if value > self.cap
        ]
