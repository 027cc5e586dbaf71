"""Derived spaces built over an ambient graph.

Each space keeps a reference to the ambient :class:`MetricGraph` and
enough bookkeeping to map its vertices back into it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple

from relhyp.models.graph import Edge, VertexSet
from relhyp.models.peripherals import PeripheralFamily

if TYPE_CHECKING:
    from relhyp.services.metric_graph import MetricGraph

# ---------------------------------------------------------------------------
# Horoballs and the Bowditch space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Horoball:
    """Truncated combinatorial horoball; vertex ``(v, n)`` has id ``n * |base| + v``."""

    base: MetricGraph
    depth: int
    graph: MetricGraph

    def vertex(self, v: int, level: int) -> int:
        return level * self.base.vertex_count + v

    def locate(self, vertex: int) -> tuple[int, int]:
        level, v = divmod(vertex, self.base.vertex_count)
        return v, level


@dataclass(frozen=True)
class ApproximationGraph:
    """Net of a peripheral set, adjacent when within ``radius`` in the ambient graph.

    ``graph`` is indexed by net position: vertex ``i`` is ``net.members[i]``.
    """

    net: VertexSet
    radius: float
    graph: MetricGraph
    member: int | None = None

    def x_vertex(self, i: int) -> int:
        return self.net.members[i]


class BackRef(NamedTuple):
    """Where a Bowditch vertex comes from: ``member is None`` means an X vertex."""

    member: int | None
    level: int
    base: int

    def encode(self) -> str:
        if self.member is None:
            return f"X:{self.base}"
        return f"H:{self.member}:{self.level}:{self.base}"


@dataclass(frozen=True)
class BowditchSpace:
    """Ambient graph with a truncated horoball glued along each member's net.

    X vertices keep their ids; horoball levels 1..depth are appended.
    ``distortion`` is the recorded monotone bound ``d_X <= g(d_Bow)`` as
    ``(bowditch distance bucket, max ambient distance)`` pairs.
    """

    ambient: MetricGraph
    family: PeripheralFamily
    approximations: tuple[ApproximationGraph, ...]
    depth: int
    graph: MetricGraph
    backmap: tuple[BackRef, ...]
    distortion: tuple[tuple[float, float], ...] = ()
    truncation_error: float = 0.0

    def is_x_vertex(self, vertex: int) -> bool:
        return vertex < self.ambient.vertex_count


# ---------------------------------------------------------------------------
# Coned-off space and standard paths
# ---------------------------------------------------------------------------


class ComponentEdge(NamedTuple):
    member: int
    x: int
    y: int
    x_length: float


@dataclass(frozen=True)
class ConedOffSpace:
    """Ambient graph plus unit component edges between net points of each member.

    ``graph`` merges X edges and component edges (a pair is stored once);
    ``components`` keeps every component edge with its member and X length.
    """

    ambient: MetricGraph
    family: PeripheralFamily
    nets: tuple[VertexSet, ...]
    components: tuple[ComponentEdge, ...]
    graph: MetricGraph
    component_index: dict[tuple[int, int], tuple[int, ...]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def component_members(self, x: int, y: int) -> tuple[int, ...]:
        key = (x, y) if x < y else (y, x)
        return self.component_index.get(key, ())


class Segment(NamedTuple):
    vertices: tuple[int, ...]


class Component(NamedTuple):
    member: int
    x: int
    y: int


StandardPiece = Segment | Component


@dataclass(frozen=True)
class StandardPath:
    """Alternating ambient geodesic segments and peripheral components."""

    pieces: tuple[StandardPiece, ...]
    quasi_constant: float | None = field(default=None, compare=False)

    @property
    def start(self) -> int:
        first = self.pieces[0]
        return first.vertices[0] if isinstance(first, Segment) else first.x

    @property
    def end(self) -> int:
        last = self.pieces[-1]
        return last.vertices[-1] if isinstance(last, Segment) else last.y

    def components(self) -> list[tuple[int, Component]]:
        return [(i, p) for i, p in enumerate(self.pieces) if isinstance(p, Component)]

    def x_vertices(self) -> tuple[int, ...]:
        """Vertices visited in order, each junction listed once."""
        out: list[int] = []
        for piece in self.pieces:
            chunk = piece.vertices if isinstance(piece, Segment) else (piece.x, piece.y)
            for v in chunk:
                if not out or out[-1] != v:
                    out.append(v)
        return tuple(out)


@dataclass(frozen=True)
class StandardPathAnalysis:
    """Components of a standard path (by piece index) and which of them are tied.

    Two components are tied when they belong to the same member; a
    component tied to no other one is isolated.
    """

    components: tuple[tuple[int, Component], ...]
    tied_pairs: tuple[tuple[int, int], ...]
    isolated: tuple[bool, ...]

    @property
    def without_backtracking(self) -> bool:
        return all(self.isolated)


# ---------------------------------------------------------------------------
# Tree-graded approximation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    points: VertexSet
    peripheral_indices: tuple[int, ...] = ()

    @property
    def cardinality(self) -> int:
        return len(self.points) + len(self.peripheral_indices)


class Piece(NamedTuple):
    vertices: VertexSet
    member: int


@dataclass(frozen=True)
class TreeGradedSpace:
    graph: MetricGraph
    pieces: tuple[Piece, ...]
    tree_edges: tuple[Edge, ...] = ()


class TreeGradedVerdict(NamedTuple):
    """``rule`` is ``"T1"`` with the offending piece pair or ``"T2"`` with a cycle."""

    ok: bool
    rule: str | None = None
    pieces: tuple[int, int] | None = None
    cycle: tuple[int, ...] = ()
