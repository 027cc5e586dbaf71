"""Value types shared by every graph computation.

These are plain frozen dataclasses: they are created in hot loops, so they
carry no validation beyond normalization.  Validation against a concrete
graph lives in :mod:`relhyp.services.metric_graph`.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
import numpy.typing as npt


class Edge(NamedTuple):
    u: int
    v: int
    length: float


@dataclass(frozen=True)
class VertexSet:
    """Sorted, deduplicated collection of vertex ids."""

    members: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted({int(v) for v in self.members})))

    @classmethod
    def of(cls, vertices: Iterable[int]) -> VertexSet:
        return cls(tuple(vertices))

    @cached_property
    def _lookup(self) -> frozenset[int]:
        return frozenset(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, vertex: object) -> bool:
        return vertex in self._lookup

    def __bool__(self) -> bool:
        return bool(self.members)

    def as_array(self) -> npt.NDArray[np.int64]:
        return np.asarray(self.members, dtype=np.int64)

    def union(self, other: Iterable[int]) -> VertexSet:
        return VertexSet((*self.members, *other))

    def intersection(self, other: VertexSet) -> VertexSet:
        return VertexSet(tuple(v for v in self.members if v in other))


@dataclass(frozen=True)
class PathInSpace:
    """An edge path with its running arclength.

    ``quasi_constants`` records ``(L, C)`` when the producer knows the path
    is an (L, C)-quasi-geodesic; ``geodesic`` paths have length equal to
    the distance of their endpoints.
    """

    vertices: tuple[int, ...]
    cumulative_length: tuple[float, ...]
    geodesic: bool = False
    quasi_constants: tuple[float, float] | None = field(default=None, compare=False)

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def length(self) -> float:
        return self.cumulative_length[-1]

    def __len__(self) -> int:
        return len(self.vertices)

    def arclength(self, i: int, j: int) -> float:
        """Length of the sub-path between indices ``i`` and ``j``."""
        return abs(self.cumulative_length[j] - self.cumulative_length[i])

    def sub_path(self, i: int, j: int) -> PathInSpace:
        """Inclusive sub-path ``vertices[i..j]`` with lengths rebased at 0."""
        base = self.cumulative_length[i]
        return PathInSpace(
            vertices=self.vertices[i : j + 1],
            cumulative_length=tuple(c - base for c in self.cumulative_length[i : j + 1]),
            geodesic=self.geodesic,
        )

    def reversed(self) -> PathInSpace:
        total = self.length
        return PathInSpace(
            vertices=self.vertices[::-1],
            cumulative_length=tuple(total - c for c in self.cumulative_length[::-1]),
            geodesic=self.geodesic,
            quasi_constants=self.quasi_constants,
        )

    def vertex_set(self) -> VertexSet:
        return VertexSet(self.vertices)
