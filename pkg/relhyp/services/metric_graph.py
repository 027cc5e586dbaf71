"""Finite weighted graphs: distances, canonical geodesics, neighborhoods, nets.

Conventions
-----------
- Distances are floats; comparisons use ``settings.distance_tolerance``.
- Ties are always broken towards the smallest vertex id, so every result
  is reproducible given the graph and the seed.
- ``shortest_path`` returns ``None`` for unreachable targets; callers treat
  that as a value, not an error.

Single-source rows come from :func:`scipy.sparse.csgraph.dijkstra` and are
kept in a bounded LRU cache on the graph.  The cache is the only mutable
state of a :class:`MetricGraph`; it is guarded by a lock so checkers may
share a graph across threads.
"""

from __future__ import annotations

import logging
import math
import threading
from collections import OrderedDict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np
import numpy.typing as npt
from scipy import sparse
from scipy.sparse.csgraph import connected_components, dijkstra

from relhyp.core.errors import RelHypError
from relhyp.core.settings import settings
from relhyp.models.graph import Edge, PathInSpace, VertexSet
from relhyp.services.parallel import chunked, parallel_map

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

_ROW_CHUNK = 256
_SAMPLE_POOL_CAP = 256


class InvalidVertexError(RelHypError):
    error_category = "input"


class InvalidEdgeError(RelHypError):
    error_category = "input"


class InvalidPathError(RelHypError):
    error_category = "input"


class EmptyVertexSetError(RelHypError):
    error_category = "input"


class InsufficientVerticesError(RelHypError):
    error_category = "input"


class DisconnectedGraphError(RelHypError):
    """Raised when a graph (or a derived graph) has more than one component."""

    error_category = "input"

    def __init__(self, message: str, witness: tuple[int, int]) -> None:
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# The graph
# ---------------------------------------------------------------------------


class MetricGraph:
    """Connected undirected graph with positive edge lengths.

    ``merge_parallel`` is for derived constructions that may propose the
    same pair twice; the shortest proposal is kept.  Loaded graphs reject
    duplicates.
    """

    def __init__(
        self,
        vertex_count: int,
        edges: Iterable[Edge | tuple[int, int, float]],
        labels: Sequence[str | None] | None = None,
        *,
        merge_parallel: bool = False,
        cache_rows: int | None = None,
    ) -> None:
        if vertex_count < 0:
            raise InvalidVertexError(f"vertex_count must be >= 0, got {vertex_count}")
        n = int(vertex_count)
        lengths: dict[tuple[int, int], float] = {}
        for raw in edges:
            u, v, length = int(raw[0]), int(raw[1]), float(raw[2])
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidVertexError(f"edge ({u}, {v}) outside vertex range 0..{n - 1}")
            if u == v:
                raise InvalidEdgeError(f"self-loop at vertex {u}")
            if not (length > 0 and math.isfinite(length)):
                raise InvalidEdgeError(f"edge ({u}, {v}) has non-positive length {length}")
            key = (u, v) if u < v else (v, u)
            if key in lengths:
                if not merge_parallel:
                    raise InvalidEdgeError(f"duplicate edge ({key[0]}, {key[1]})")
                lengths[key] = min(lengths[key], length)
            else:
                lengths[key] = length

        if labels is not None and len(labels) != n:
            raise InvalidVertexError(f"expected {n} labels, got {len(labels)}")

        self._n = n
        self._lengths = lengths
        self._edges = tuple(Edge(u, v, length) for (u, v), length in sorted(lengths.items()))
        self._labels = tuple(labels) if labels is not None else None
        self._max_edge = max(lengths.values(), default=0.0)

        adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (u, v), length in lengths.items():
            adjacency[u].append((v, length))
            adjacency[v].append((u, length))
        self._adjacency = tuple(tuple(sorted(row)) for row in adjacency)

        rows = [e.u for e in self._edges] + [e.v for e in self._edges]
        cols = [e.v for e in self._edges] + [e.u for e in self._edges]
        data = [e.length for e in self._edges] * 2
        self._csr = sparse.csr_matrix(
            (np.asarray(data, dtype=np.float64), (rows, cols)), shape=(n, n)
        )

        self._lock = threading.Lock()
        self._rows: OrderedDict[int, FloatArray] = OrderedDict()
        self._set_rows: OrderedDict[tuple[int, ...], FloatArray] = OrderedDict()
        self._cache_rows = cache_rows or settings.distance_cache_rows

        self._check_connected()

    def _check_connected(self) -> None:
        if self._n <= 1:
            return
        count, labels = connected_components(self._csr, directed=False)
        if count > 1:
            other = int(np.flatnonzero(labels != labels[0])[0])
            raise DisconnectedGraphError(
                f"graph has {count} components; vertices 0 and {other} are not connected",
                witness=(0, other),
            )

    # -- structure ----------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return self._n

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def labels(self) -> tuple[str | None, ...] | None:
        return self._labels

    @property
    def max_edge_length(self) -> float:
        return self._max_edge

    @property
    def csr(self) -> sparse.csr_matrix:
        return self._csr

    def label(self, v: int) -> str:
        if self._labels is not None and self._labels[v] is not None:
            return str(self._labels[v])
        return str(v)

    def neighbors(self, v: int) -> tuple[tuple[int, float], ...]:
        """``(neighbor, length)`` pairs in ascending neighbor order."""
        return self._adjacency[self.check_vertex(v)]

    def edge_length(self, u: int, v: int) -> float | None:
        key = (u, v) if u < v else (v, u)
        return self._lengths.get(key)

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_length(u, v) is not None

    def check_vertex(self, v: int) -> int:
        if not 0 <= v < self._n:
            raise InvalidVertexError(f"vertex {v} outside range 0..{self._n - 1}")
        return int(v)

    def check_vertex_set(self, vertices: VertexSet) -> VertexSet:
        if vertices and (vertices.members[0] < 0 or vertices.members[-1] >= self._n):
            raise InvalidVertexError(
                f"vertex set spans {vertices.members[0]}..{vertices.members[-1]}, "
                f"graph has {self._n} vertices"
            )
        return vertices

    # -- distances ----------------------------------------------------------

    def distances_from(self, source: int) -> FloatArray:
        """Read-only distance row from ``source`` (cached)."""
        self.check_vertex(source)
        with self._lock:
            row = self._rows.get(source)
            if row is not None:
                self._rows.move_to_end(source)
                return row
        row = np.asarray(dijkstra(self._csr, directed=False, indices=source), dtype=np.float64)
        row.setflags(write=False)
        self._remember(source, row)
        return row

    def _remember(self, source: int, row: FloatArray) -> None:
        with self._lock:
            self._rows[source] = row
            while len(self._rows) > self._cache_rows:
                self._rows.popitem(last=False)

    def distance_rows(self, sources: Sequence[int]) -> FloatArray:
        """Stacked distance rows, one per source, computing missing rows in batches."""
        with self._lock:
            missing = sorted({int(s) for s in sources if int(s) not in self._rows})
        for v in missing:
            self.check_vertex(v)
        for batch in chunked(missing, _ROW_CHUNK):
            block = np.atleast_2d(dijkstra(self._csr, directed=False, indices=list(batch)))
            for v, row in zip(batch, block, strict=True):
                row = np.array(row, dtype=np.float64)
                row.setflags(write=False)
                self._remember(v, row)
        if not sources:
            return np.empty((0, self._n))
        return np.vstack([self.distances_from(int(s)) for s in sources])

    def distance(self, u: int, v: int) -> float:
        return float(self.distances_from(u)[self.check_vertex(v)])

    def pairwise_distances(self, vertices: Sequence[int]) -> FloatArray:
        """Square distance matrix restricted to ``vertices`` (in the given order)."""
        idx = np.asarray(vertices, dtype=np.int64)
        return self.distance_rows(list(vertices))[:, idx]

    def distances_to_set(self, target: VertexSet, *, cache: bool = True) -> FloatArray:
        """d(v, target) for every vertex v (multi-source Dijkstra, cached unless told not to)."""
        if not target:
            raise EmptyVertexSetError("distance to an empty set is undefined")
        self.check_vertex_set(target)
        if not cache:
            return np.asarray(
                dijkstra(self._csr, directed=False, indices=target.as_array(), min_only=True),
                dtype=np.float64,
            )
        key = target.members
        with self._lock:
            row = self._set_rows.get(key)
            if row is not None:
                self._set_rows.move_to_end(key)
                return row
        row = np.asarray(
            dijkstra(self._csr, directed=False, indices=target.as_array(), min_only=True),
            dtype=np.float64,
        )
        row.setflags(write=False)
        with self._lock:
            self._set_rows[key] = row
            while len(self._set_rows) > self._cache_rows:
                self._set_rows.popitem(last=False)
        return row

    def distances_avoiding(self, source: int, forbidden: VertexSet) -> FloatArray:
        """Distance row from ``source`` in the subgraph without ``forbidden``."""
        self.check_vertex(source)
        mask = np.ones(self._n)
        mask[forbidden.as_array()] = 0.0
        keep = sparse.diags(mask)
        sub = (keep @ self._csr @ keep).tocsr()
        sub.eliminate_zeros()
        return np.asarray(dijkstra(sub, directed=False, indices=source), dtype=np.float64)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


def path_from_vertices(
    g: MetricGraph,
    vertices: Sequence[int],
    *,
    geodesic: bool = False,
    quasi_constants: tuple[float, float] | None = None,
) -> PathInSpace:
    """Build a :class:`PathInSpace`, checking that consecutive vertices are adjacent."""
    if not vertices:
        raise InvalidPathError("a path needs at least one vertex")
    g.check_vertex(vertices[0])
    cumulative = [0.0]
    for a, b in zip(vertices, vertices[1:], strict=False):
        g.check_vertex(b)
        length = g.edge_length(a, b)
        if length is None:
            raise InvalidPathError(f"vertices {a} and {b} are not adjacent")
        cumulative.append(cumulative[-1] + length)
    return PathInSpace(
        vertices=tuple(int(v) for v in vertices),
        cumulative_length=tuple(cumulative),
        geodesic=geodesic,
        quasi_constants=quasi_constants,
    )


def shortest_path(
    g: MetricGraph,
    u: int,
    v: int,
    forbidden: VertexSet | None = None,
) -> PathInSpace | None:
    """Canonical geodesic from ``u`` to ``v``, or ``None`` when unreachable.

    Walking back from ``v``, each step takes the least-id neighbor lying on
    a shortest path from ``u``.
    """
    g.check_vertex(u)
    g.check_vertex(v)
    if forbidden and (u in forbidden or v in forbidden):
        raise InvalidVertexError(f"endpoint {u if u in forbidden else v} is forbidden")
    dist = g.distances_avoiding(u, forbidden) if forbidden else g.distances_from(u)
    if not math.isfinite(dist[v]):
        return None

    tol = settings.distance_tolerance
    trail = [v]
    current = v
    while current != u:
        target = dist[current]
        for w, length in g.neighbors(current):
            dw = dist[w]
            if dw < target and abs(dw + length - target) <= tol * max(1.0, target):
                current = w
                break
        else:  # pragma: no cover - dijkstra rows always admit a predecessor
            raise InvalidPathError(f"no predecessor for vertex {current} towards {u}")
        trail.append(current)
    trail.reverse()
    return path_from_vertices(g, trail, geodesic=True)


def geodesic(g: MetricGraph, u: int, v: int) -> PathInSpace:
    """``shortest_path`` on a connected graph, where a result always exists."""
    path = shortest_path(g, u, v)
    assert path is not None
    return path


def concatenate_paths(g: MetricGraph, paths: Sequence[PathInSpace]) -> PathInSpace:
    """Join paths that share endpoints into one path."""
    if not paths:
        raise InvalidPathError("nothing to concatenate")
    vertices = list(paths[0].vertices)
    for p in paths[1:]:
        if p.start != vertices[-1]:
            raise InvalidPathError(f"path starting at {p.start} does not continue {vertices[-1]}")
        vertices.extend(p.vertices[1:])
    return path_from_vertices(g, vertices)


def detour_path(g: MetricGraph, x: int, via: int, y: int) -> PathInSpace:
    """Geodesic from ``x`` to ``via`` followed by a geodesic to ``y``."""
    path = concatenate_paths(g, [geodesic(g, x, via), geodesic(g, via, y)])
    k = measure_quasi_geodesic(g, path)
    return PathInSpace(
        vertices=path.vertices,
        cumulative_length=path.cumulative_length,
        quasi_constants=(float(k), float(k)),
    )


def measure_quasi_geodesic(g: MetricGraph, path: PathInSpace) -> int:
    """Smallest integer K >= 1 such that ``path`` is a (K, K)-quasi-geodesic.

    Only the upper bound ``arclength <= K d + K`` can fail on an edge path.
    """
    if len(path) <= 1:
        return 1
    arc, dist = _arc_and_distance(g, path)
    ratio = float(np.max(arc / (dist + 1.0)))
    return max(1, math.ceil(ratio - settings.distance_tolerance))


def quasi_geodesic_excess(g: MetricGraph, path: PathInSpace, lam: float) -> float:
    """Smallest C with ``arclength <= lam * d + C`` along ``path``."""
    if len(path) <= 1:
        return 0.0
    arc, dist = _arc_and_distance(g, path)
    return max(0.0, float(np.max(arc - lam * dist)))


def _arc_and_distance(g: MetricGraph, path: PathInSpace) -> tuple[FloatArray, FloatArray]:
    vertices = list(path.vertices)
    dist = g.pairwise_distances(vertices)
    cum = np.asarray(path.cumulative_length)
    arc = np.abs(cum[:, None] - cum[None, :])
    return arc, dist


# ---------------------------------------------------------------------------
# Sets
# ---------------------------------------------------------------------------


def neighborhood(g: MetricGraph, sources: VertexSet, r: float) -> VertexSet:
    """Closed r-neighborhood N_r(S)."""
    if not sources:
        raise EmptyVertexSetError("neighborhood of an empty set")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    g.check_vertex_set(sources)
    bound = r + settings.distance_tolerance
    dist = dijkstra(
        g.csr, directed=False, indices=sources.as_array(), min_only=True, limit=bound
    )
    return VertexSet(np.flatnonzero(dist <= bound).tolist())


def directed_hausdorff(g: MetricGraph, a: VertexSet, b: VertexSet) -> float:
    """sup over x in A of d(x, B)."""
    if not a or not b:
        raise EmptyVertexSetError("Hausdorff distance needs nonempty sets")
    return float(np.max(g.distances_to_set(b)[a.as_array()]))


def hausdorff_distance(g: MetricGraph, a: VertexSet, b: VertexSet) -> float:
    return max(directed_hausdorff(g, a, b), directed_hausdorff(g, b, a))


def farthest_point(
    g: MetricGraph, a: Sequence[int], b: Sequence[int]
) -> tuple[float, int, int]:
    """sup over x in A of d(x, B), with the achieving x and its nearest point of B.

    Works from single-source rows of the smaller set, so short vertex lists
    (paths, transient sets) never enter the set-distance cache.
    """
    if len(a) == 0 or len(b) == 0:
        raise EmptyVertexSetError("farthest point needs nonempty sets")
    a_idx = np.asarray(a, dtype=np.int64)
    b_idx = np.asarray(b, dtype=np.int64)
    if len(a_idx) <= len(b_idx):
        block = g.distance_rows(a_idx.tolist())[:, b_idx]
    else:
        block = g.distance_rows(b_idx.tolist())[:, a_idx].T
    nearest = block.min(axis=1)
    i = int(np.argmax(nearest))
    j = int(np.argmin(block[i]))
    return float(nearest[i]), int(a_idx[i]), int(b_idx[j])


def small_hausdorff(g: MetricGraph, a: Sequence[int], b: Sequence[int]) -> float:
    """Hausdorff distance of two short vertex lists."""
    return max(farthest_point(g, a, b)[0], farthest_point(g, b, a)[0])


def maximal_net(g: MetricGraph, sources: VertexSet, k: float) -> VertexSet:
    """Greedy maximal k-separated subset of ``sources`` in ascending id order."""
    if not sources:
        raise EmptyVertexSetError("net of an empty set")
    if k <= 0:
        raise ValueError(f"net spacing must be positive, got {k}")
    g.check_vertex_set(sources)
    tol = settings.distance_tolerance
    nearest = np.full(g.vertex_count, np.inf)
    chosen: list[int] = []
    for s in sources:
        if nearest[s] >= k - tol:
            chosen.append(s)
            row = dijkstra(g.csr, directed=False, indices=s, limit=k)
            np.minimum(nearest, row, out=nearest)
    return VertexSet(tuple(chosen))


@dataclass(frozen=True)
class CoarseConnectivity:
    connected: bool
    witness: tuple[int, int] | None = None
    components: int = 1


def is_coarsely_connected(g: MetricGraph, sources: VertexSet, k: float) -> CoarseConnectivity:
    """Whether the K-chain graph on ``sources`` is connected."""
    if not sources:
        raise EmptyVertexSetError("coarse connectivity of an empty set")
    g.check_vertex_set(sources)
    members = sources.as_array()
    if len(members) == 1:
        return CoarseConnectivity(connected=True)
    bound = k + settings.distance_tolerance
    blocks = []
    for chunk in chunked(members, _ROW_CHUNK):
        rows = np.atleast_2d(dijkstra(g.csr, directed=False, indices=chunk, limit=bound))
        blocks.append(rows[:, members] <= bound)
    chain = sparse.csr_matrix(np.vstack(blocks))
    count, labels = connected_components(chain, directed=False)
    if count == 1:
        return CoarseConnectivity(connected=True)
    other = int(members[np.flatnonzero(labels != labels[0])[0]])
    return CoarseConnectivity(
        connected=False, witness=(int(members[0]), other), components=int(count)
    )


# ---------------------------------------------------------------------------
# Whole-graph quantities
# ---------------------------------------------------------------------------


def eccentricity(g: MetricGraph, v: int) -> float:
    return float(np.max(g.distances_from(v)))


def graph_diameter(g: MetricGraph, *, exact_limit: int = 4000) -> float:
    """Exact diameter for graphs up to ``exact_limit`` vertices, else a double sweep."""
    if g.vertex_count <= 1:
        return 0.0
    if g.vertex_count <= exact_limit:
        best = 0.0
        for batch in chunked(range(g.vertex_count), _ROW_CHUNK):
            rows = dijkstra(g.csr, directed=False, indices=list(batch))
            best = max(best, float(np.max(rows)))
        return best
    far = int(np.argmax(g.distances_from(0)))
    logger.debug("diameter_lower_bound: vertices=%d sweep_from=%d", g.vertex_count, far)
    return eccentricity(g, far)


def interior_vertices(g: MetricGraph, center: int = 0, margin: int | None = None) -> VertexSet:
    """Vertices within (eccentricity(center) - margin) of ``center``."""
    margin = settings.boundary_margin if margin is None else margin
    row = g.distances_from(center)
    radius = float(np.max(row)) - margin
    if radius < 0:
        return VertexSet((center,))
    return VertexSet(np.flatnonzero(row <= radius + settings.distance_tolerance).tolist())


@dataclass(frozen=True)
class FourPointEstimate:
    delta: float
    quadruple: tuple[int, int, int, int] | None
    inspected: int
    mode: str
    seed: int | None = None


def four_point_defect(
    dxy: float, dzw: float, dxz: float, dyw: float, dxw: float, dyz: float
) -> float:
    """Half the gap between the two largest of the three pair sums."""
    sums = sorted((dxy + dzw, dxz + dyw, dxw + dyz))
    return (sums[2] - sums[1]) / 2


def four_point_estimate(
    g: MetricGraph,
    *,
    mode: str = "exhaustive",
    count: int = 2000,
    seed: int | None = None,
    pool: Sequence[int] | None = None,
    threads: int | None = None,
) -> FourPointEstimate:
    """Four-point hyperbolicity over a vertex pool.

    ``exhaustive`` scans every quadruple of the pool; ``sample`` draws
    ``count`` quadruples of distinct vertices from a seeded sub-pool.
    """
    vertices = list(pool) if pool is not None else list(range(g.vertex_count))
    if len(vertices) < 4:
        raise InsufficientVerticesError(
            f"four-point estimate needs 4 vertices, got {len(vertices)}"
        )

    if mode == "exhaustive":
        dist = g.pairwise_distances(vertices)
        value, quad = _exhaustive_defect(dist, threads)
        inspected = math.comb(len(vertices), 4)
    elif mode == "sample":
        if seed is None:
            raise ValueError("sample mode requires a seed")
        rng = np.random.default_rng(seed)
        if len(vertices) > _SAMPLE_POOL_CAP:
            vertices = sorted(rng.choice(vertices, size=_SAMPLE_POOL_CAP, replace=False).tolist())
        dist = g.pairwise_distances(vertices)
        idx = np.array([rng.choice(len(vertices), size=4, replace=False) for _ in range(count)])
        a, b, c, d = idx.T
        sums = np.sort(
            np.stack([dist[a, b] + dist[c, d], dist[a, c] + dist[b, d], dist[a, d] + dist[b, c]]),
            axis=0,
        )
        defects = sums[2] - sums[1]
        best = int(np.argmax(defects))
        value = float(defects[best])
        quad = tuple(int(x) for x in idx[best])  # type: ignore[assignment]
        inspected = count
    else:
        raise ValueError(f"unknown four-point mode {mode!r}")

    delta = value / 2
    if delta <= settings.distance_tolerance:
        delta = 0.0
    witness = None if quad is None else tuple(int(vertices[q]) for q in quad)
    return FourPointEstimate(
        delta=delta,
        quadruple=witness,  # type: ignore[arg-type]
        inspected=inspected,
        mode=mode,
        seed=seed if mode == "sample" else None,
    )


def four_point_delta(
    g: MetricGraph,
    *,
    mode: str = "exhaustive",
    count: int = 2000,
    seed: int | None = None,
    pool: Sequence[int] | None = None,
    threads: int | None = None,
) -> float:
    return four_point_estimate(
        g, mode=mode, count=count, seed=seed, pool=pool, threads=threads
    ).delta


def _exhaustive_defect(
    dist: FloatArray, threads: int | None
) -> tuple[float, tuple[int, int, int, int] | None]:
    m = dist.shape[0]

    def scan(i: int) -> tuple[float, tuple[int, int, int, int] | None]:
        best: tuple[float, tuple[int, int, int, int] | None] = (-1.0, None)
        row_i = dist[i]
        for j in range(i + 1, m):
            s1 = dist[i, j] + dist
            s2 = row_i[:, None] + dist[j][None, :]
            s3 = row_i[None, :] + dist[j][:, None]
            ordered = np.sort(np.stack([s1, s2, s3]), axis=0)
            gap = ordered[2] - ordered[1]
            flat = int(np.argmax(gap))
            value = float(gap.flat[flat])
            if value > best[0]:
                best = (value, (i, j, flat // m, flat % m))
        return best

    best: tuple[float, tuple[int, int, int, int] | None] = (0.0, None)
    for value, quad in parallel_map(scan, list(range(m - 1)), threads=threads):
        if quad is not None and (best[1] is None or value > best[0]):
            best = (value, quad)
    return best


# ---------------------------------------------------------------------------
# Generators and networkx bridges
# ---------------------------------------------------------------------------


def from_networkx(graph: nx.Graph, *, weight: str = "length") -> MetricGraph:
    """Relabel nodes 0..n-1 in sorted order; node names become labels."""
    try:
        nodes = sorted(graph.nodes)
    except TypeError:
        nodes = sorted(graph.nodes, key=str)
    index = {node: i for i, node in enumerate(nodes)}
    edges = [
        (index[a], index[b], float(data.get(weight, 1.0)))
        for a, b, data in graph.edges(data=True)
    ]
    return MetricGraph(len(nodes), edges, labels=[str(node) for node in nodes])


def to_networkx(g: MetricGraph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.vertex_count))
    graph.add_weighted_edges_from(g.edges, weight="length")
    return graph


def path_graph(n: int) -> MetricGraph:
    return MetricGraph(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def cycle_graph(n: int) -> MetricGraph:
    return MetricGraph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def grid_graph(width: int, height: int) -> MetricGraph:
    """Unit grid; vertex ``y * width + x`` is labelled ``"x,y"``."""
    edges = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            if x + 1 < width:
                edges.append((v, v + 1, 1.0))
            if y + 1 < height:
                edges.append((v, v + width, 1.0))
    labels = [f"{x},{y}" for y in range(height) for x in range(width)]
    return MetricGraph(width * height, edges, labels=labels)


def random_tree(n: int, seed: int) -> MetricGraph:
    """Uniform random labelled tree on ``n`` vertices (Prüfer sequence)."""
    if n <= 2:
        return path_graph(n)
    rng = np.random.default_rng(seed)
    sequence = rng.integers(0, n, size=n - 2).tolist()
    return from_networkx(nx.from_prufer_sequence(sequence))
