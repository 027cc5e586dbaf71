"""Line-oriented text formats for graphs, families, paths and derived spaces.

Every format ignores blank lines and ``#`` comments.  Parse failures raise
:class:`GraphFormatError` carrying the file path and the 1-based line
number.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from pathlib import Path

from relhyp.core.errors import RelHypError
from relhyp.core.logging import EVENT_GRAPH_LOADED, log_event
from relhyp.models.graph import PathInSpace, VertexSet
from relhyp.models.groups import CosetSpec, GroupSpec, RewritingSpec
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.spaces import (
    BackRef,
    BowditchSpace,
    Component,
    Piece,
    Segment,
    StandardPath,
    TreeGradedSpace,
)
from relhyp.models.transient import GGFamily
from relhyp.services.metric_graph import MetricGraph, path_from_vertices

logger = logging.getLogger(__name__)


class GraphFormatError(RelHypError):
    error_category = "parse"

    def __init__(self, message: str, path: str | None = None, line_number: int | None = None):
        where = path or "<text>"
        if line_number is not None:
            where = f"{where}:{line_number}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line_number = line_number


def _records(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def _ints(tokens: list[str], path: str | None, number: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError as exc:
        message = f"expected integers, got {' '.join(tokens)!r}"
        raise GraphFormatError(message, path, number) from exc


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphFormatError(f"cannot read file: {exc.strerror}", str(path)) from exc


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


def parse_graph(
    text: str, path: str | None = None, *, merge_parallel: bool = False
) -> tuple[MetricGraph, list[tuple[int, list[str]]]]:
    """Parse ``V``/``E``/``L`` records; other records are returned for the caller."""
    count: int | None = None
    edges: list[tuple[int, int, float]] = []
    labels: dict[int, str] = {}
    extra: list[tuple[int, list[str]]] = []
    for number, tokens in _records(text):
        tag = tokens[0]
        if tag == "V":
            if count is not None:
                raise GraphFormatError("duplicate V header", path, number)
            if len(tokens) != 2:
                raise GraphFormatError("expected 'V <count>'", path, number)
            count = _ints(tokens[1:], path, number)[0]
        elif count is None:
            raise GraphFormatError(f"record {tag!r} before the V header", path, number)
        elif tag == "E":
            if len(tokens) != 4:
                raise GraphFormatError("expected 'E <u> <v> <length>'", path, number)
            u, v = _ints(tokens[1:3], path, number)
            try:
                length = float(tokens[3])
            except ValueError as exc:
                raise GraphFormatError(f"bad edge length {tokens[3]!r}", path, number) from exc
            if not 0 <= u < count or not 0 <= v < count:
                raise GraphFormatError(f"edge ({u}, {v}) outside 0..{count - 1}", path, number)
            if u == v or not length > 0:
                raise GraphFormatError(f"invalid edge ({u}, {v}, {length})", path, number)
            edges.append((u, v, length))
        elif tag == "L":
            if len(tokens) < 3:
                raise GraphFormatError("expected 'L <v> <label>'", path, number)
            labels[_ints(tokens[1:2], path, number)[0]] = " ".join(tokens[2:])
        else:
            extra.append((number, tokens))
    if count is None:
        raise GraphFormatError("missing V header", path)
    seen: set[tuple[int, int]] = set()
    if not merge_parallel:
        for number, tokens in _records(text):
            if tokens[0] == "E":
                u, v = int(tokens[1]), int(tokens[2])
                key = (min(u, v), max(u, v))
                if key in seen:
                    raise GraphFormatError(f"duplicate edge {key}", path, number)
                seen.add(key)
    label_list = [labels.get(v) for v in range(count)] if labels else None
    graph = MetricGraph(count, edges, labels=label_list, merge_parallel=merge_parallel)
    return graph, extra


def load_graph(path: str | Path) -> MetricGraph:
    graph, extra = parse_graph(_read(path), str(path))
    if extra:
        number, tokens = extra[0]
        raise GraphFormatError(f"unknown record {tokens[0]!r}", str(path), number)
    log_event(logger, "info", EVENT_GRAPH_LOADED, path=path,
              vertices=graph.vertex_count, edges=len(graph.edges))
    return graph


def dump_graph(g: MetricGraph) -> str:
    lines = [f"V {g.vertex_count}"]
    lines.extend(f"E {e.u} {e.v} {e.length!r}" for e in g.edges)
    if g.labels is not None:
        lines.extend(f"L {v} {label}" for v, label in enumerate(g.labels) if label is not None)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Peripheral families
# ---------------------------------------------------------------------------


def parse_family(text: str, g: MetricGraph, path: str | None = None) -> PeripheralFamily:
    """``P <index> <v...>`` per member, optional ``K <value>`` and ``N <index> <name>``."""
    members: dict[int, tuple[int, int, ...]] = {}
    names: dict[int, str] = {}
    k_value = 1.0
    for number, tokens in _records(text):
        tag = tokens[0]
        if tag == "P":
            ids = _ints(tokens[1:], path, number)
            if len(ids) < 2:
                raise GraphFormatError("expected 'P <index> <v1> ...'", path, number)
            index, vertices = ids[0], ids[1:]
            if index in members:
                raise GraphFormatError(f"duplicate member index {index}", path, number)
            bad = [v for v in vertices if not 0 <= v < g.vertex_count]
            if bad:
                raise GraphFormatError(f"vertex {bad[0]} outside the graph", path, number)
            members[index] = (number, *vertices)
        elif tag == "K":
            try:
                k_value = float(tokens[1])
            except (IndexError, ValueError) as exc:
                raise GraphFormatError("expected 'K <value>'", path, number) from exc
        elif tag == "N":
            names[_ints(tokens[1:2], path, number)[0]] = " ".join(tokens[2:])
        else:
            raise GraphFormatError(f"unknown record {tag!r}", path, number)
    if sorted(members) != list(range(len(members))):
        raise GraphFormatError("member indices must be 0..n-1", path)
    sets = [VertexSet(members[i][1:]) for i in range(len(members))]
    seen: dict[tuple[int, ...], int] = {}
    for i, s in enumerate(sets):
        if s.members in seen:
            raise GraphFormatError(
                f"members {seen[s.members]} and {i} are the same set", path, members[i][0]
            )
        seen[s.members] = i
    name_tuple = tuple(names.get(i, f"P{i}") for i in range(len(sets))) if names else None
    return PeripheralFamily(members=tuple(sets), coarse_connectivity_K=k_value, names=name_tuple)


def load_family(path: str | Path, g: MetricGraph) -> PeripheralFamily:
    return parse_family(_read(path), g, str(path))


def dump_family(fam: PeripheralFamily) -> str:
    lines = [f"K {fam.coarse_connectivity_K!r}"]
    for i, member in enumerate(fam):
        lines.append(" ".join(["P", str(i), *map(str, member)]))
    if fam.names is not None:
        lines.extend(f"N {i} {name}" for i, name in enumerate(fam.names))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Paths, standard paths, guessed-geodesic families
# ---------------------------------------------------------------------------


def parse_paths(text: str, g: MetricGraph, path: str | None = None) -> list[PathInSpace]:
    """One ``PATH <v...>`` record per path; ``Q <L> <C>`` attaches constants to the last path."""
    paths: list[PathInSpace] = []
    for number, tokens in _records(text):
        if tokens[0] == "PATH":
            try:
                paths.append(path_from_vertices(g, _ints(tokens[1:], path, number)))
            except RelHypError as exc:
                raise GraphFormatError(str(exc), path, number) from exc
        elif tokens[0] == "Q" and paths:
            try:
                lam, c = float(tokens[1]), float(tokens[2])
            except (IndexError, ValueError) as exc:
                raise GraphFormatError("expected 'Q <L> <C>'", path, number) from exc
            last = paths[-1]
            paths[-1] = PathInSpace(last.vertices, last.cumulative_length, last.geodesic, (lam, c))
        else:
            raise GraphFormatError(f"unexpected record {tokens[0]!r}", path, number)
    return paths


def load_paths(path: str | Path, g: MetricGraph) -> list[PathInSpace]:
    return parse_paths(_read(path), g, str(path))


def parse_standard_path(text: str, path: str | None = None) -> StandardPath:
    pieces: list[Segment | Component] = []
    for number, tokens in _records(text):
        if tokens[0] == "SEG":
            vertices = _ints(tokens[1:], path, number)
            if not vertices:
                raise GraphFormatError("empty SEG record", path, number)
            pieces.append(Segment(vertices))
        elif tokens[0] == "CMP":
            ids = _ints(tokens[1:], path, number)
            if len(ids) != 3:
                raise GraphFormatError("expected 'CMP <member> <x> <y>'", path, number)
            pieces.append(Component(*ids))
        else:
            raise GraphFormatError(f"unknown record {tokens[0]!r}", path, number)
    if not pieces:
        raise GraphFormatError("standard path has no pieces", path)
    return StandardPath(tuple(pieces))


def load_standard_path(path: str | Path) -> StandardPath:
    return parse_standard_path(_read(path), str(path))


def dump_standard_path(sp: StandardPath) -> str:
    lines = []
    for piece in sp.pieces:
        if isinstance(piece, Segment):
            lines.append(" ".join(["SEG", *map(str, piece.vertices)]))
        else:
            lines.append(f"CMP {piece.member} {piece.x} {piece.y}")
    return "\n".join(lines) + "\n"


def parse_gg_family(text: str, g: MetricGraph, path: str | None = None) -> GGFamily:
    """``PAIR x y`` then ``ETA v...`` then ``TRANS i...`` per pool pair; optional ``D``."""
    eta: dict[tuple[int, int], PathInSpace] = {}
    trans: dict[tuple[int, int], tuple[int, ...]] = {}
    current: tuple[int, int] | None = None
    d_value = 0.0
    for number, tokens in _records(text):
        tag = tokens[0]
        if tag == "PAIR":
            ids = _ints(tokens[1:], path, number)
            if len(ids) != 2:
                raise GraphFormatError("expected 'PAIR <x> <y>'", path, number)
            current = ids  # type: ignore[assignment]
        elif tag == "ETA":
            if current is None:
                raise GraphFormatError("ETA before PAIR", path, number)
            try:
                eta_path = path_from_vertices(g, _ints(tokens[1:], path, number))
            except RelHypError as exc:
                raise GraphFormatError(str(exc), path, number) from exc
            if (eta_path.start, eta_path.end) != current:
                raise GraphFormatError(f"ETA does not connect {current}", path, number)
            eta[current] = eta_path
        elif tag == "TRANS":
            if current is None or current not in eta:
                raise GraphFormatError("TRANS before ETA", path, number)
            indices = tuple(sorted(set(_ints(tokens[1:], path, number))))
            last = len(eta[current]) - 1
            if any(not 0 <= i <= last for i in indices):
                raise GraphFormatError(f"TRANS index outside 0..{last}", path, number)
            trans[current] = indices
        elif tag == "D":
            d_value = float(tokens[1])
        else:
            raise GraphFormatError(f"unknown record {tag!r}", path, number)
    missing = set(eta) - set(trans)
    if missing:
        raise GraphFormatError(f"pair {sorted(missing)[0]} has no TRANS record", path)
    normalized_eta: dict[tuple[int, int], PathInSpace] = {}
    normalized_trans: dict[tuple[int, int], tuple[int, ...]] = {}
    for (x, y), p in eta.items():
        if x < y:
            normalized_eta[(x, y)] = p
            normalized_trans[(x, y)] = trans[(x, y)]
        else:
            last = len(p) - 1
            normalized_eta[(y, x)] = p.reversed()
            normalized_trans[(y, x)] = tuple(sorted(last - i for i in trans[(x, y)]))
    pool = VertexSet(tuple(v for pair in normalized_eta for v in pair))
    return GGFamily(pool=pool, eta=normalized_eta, trans=normalized_trans, D=d_value)


def load_gg_family(path: str | Path, g: MetricGraph) -> GGFamily:
    return parse_gg_family(_read(path), g, str(path))


def dump_gg_family(family: GGFamily) -> str:
    lines = [f"D {family.D!r}"]
    for pair in family.pairs():
        lines.append(f"PAIR {pair[0]} {pair[1]}")
        lines.append(" ".join(["ETA", *map(str, family.eta[pair].vertices)]))
        lines.append(" ".join(["TRANS", *map(str, family.trans[pair])]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Derived spaces
# ---------------------------------------------------------------------------


def dump_bowditch(bow: BowditchSpace) -> str:
    lines = [dump_graph(bow.graph).rstrip("\n")]
    lines.extend(f"BACKMAP {b} {ref.encode()}" for b, ref in enumerate(bow.backmap))
    return "\n".join(lines) + "\n"


def parse_backmap(text: str, path: str | None = None) -> tuple[BackRef, ...]:
    _, extra = parse_graph(text, path, merge_parallel=True)
    refs: dict[int, BackRef] = {}
    for number, tokens in extra:
        if tokens[0] != "BACKMAP" or len(tokens) != 3:
            raise GraphFormatError(f"unexpected record {tokens[0]!r}", path, number)
        b = _ints(tokens[1:2], path, number)[0]
        parts = tokens[2].split(":")
        try:
            if parts[0] == "X" and len(parts) == 2:
                refs[b] = BackRef(None, 0, int(parts[1]))
            elif parts[0] == "H" and len(parts) == 4:
                refs[b] = BackRef(int(parts[1]), int(parts[2]), int(parts[3]))
            else:
                raise ValueError(tokens[2])
        except ValueError as exc:
            raise GraphFormatError(f"bad BACKMAP target {tokens[2]!r}", path, number) from exc
    return tuple(refs[b] for b in sorted(refs))


def dump_tree_graded(space: TreeGradedSpace) -> str:
    lines = [dump_graph(space.graph).rstrip("\n")]
    for i, piece in enumerate(space.pieces):
        lines.append(" ".join(["PIECE", str(i), *map(str, piece.vertices)]))
        lines.append(f"MEMBER {i} {piece.member}")
    return "\n".join(lines) + "\n"


def parse_tree_graded(text: str, path: str | None = None) -> TreeGradedSpace:
    graph, extra = parse_graph(text, path)
    vertices: dict[int, tuple[int, ...]] = {}
    members: dict[int, int] = {}
    for number, tokens in extra:
        ids = _ints(tokens[1:], path, number)
        if tokens[0] == "PIECE" and ids:
            vertices[ids[0]] = ids[1:]
        elif tokens[0] == "MEMBER" and len(ids) == 2:
            members[ids[0]] = ids[1]
        else:
            raise GraphFormatError(f"unexpected record {tokens[0]!r}", path, number)
    pieces = tuple(
        Piece(VertexSet(vertices[i]), members.get(i, -1)) for i in sorted(vertices)
    )
    tree_edges = tuple(
        e for e in graph.edges if not any(e.u in p.vertices and e.v in p.vertices for p in pieces)
    )
    return TreeGradedSpace(graph=graph, pieces=pieces, tree_edges=tree_edges)


def load_tree_graded(path: str | Path) -> TreeGradedSpace:
    return parse_tree_graded(_read(path), str(path))


# ---------------------------------------------------------------------------
# Group configuration
# ---------------------------------------------------------------------------


def parse_group_config(text: str, path: str | None = None) -> tuple[GroupSpec, list[CosetSpec]]:
    """``key=value`` lines: ``family=``, ``genus=``, ``generators=``, ``rules=``, ``coset=``.

    After ``rules=`` every line of the form ``lhs->rhs`` is a rule.
    ``coset=aA`` or ``coset=aA:bab`` requests cosets (all, or one representative).
    """
    from relhyp.services.cayley import GroupSpecError, parse_group_expression

    values: dict[str, str] = {}
    rules: list[tuple[str, str]] = []
    cosets: list[CosetSpec] = []
    in_rules = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line and in_rules:
            lhs, rhs = (part.strip() for part in line.split("->", 1))
            rules.append((lhs, "" if rhs in ("", "1") else rhs))
            continue
        if "=" not in line:
            raise GraphFormatError(f"expected 'key=value', got {line!r}", path, number)
        key, value = (part.strip() for part in line.split("=", 1))
        in_rules = key == "rules"
        if key == "coset":
            letters, _, rep = value.partition(":")
            cosets.append(CosetSpec(subgroup=tuple(letters), representative=rep or None))
        elif key == "rules":
            if value:
                if "->" not in value:
                    raise GraphFormatError(f"expected 'lhs->rhs', got {value!r}", path, number)
                lhs, rhs = (part.strip() for part in value.split("->", 1))
                rules.append((lhs, "" if rhs in ("", "1") else rhs))
        elif key in ("family", "genus", "rank", "generators"):
            values[key] = value
        else:
            raise GraphFormatError(f"unknown key {key!r}", path, number)

    family = values.get("family")
    if family is None:
        raise GraphFormatError("missing 'family='", path)
    try:
        if family == "rewriting":
            spec: GroupSpec = RewritingSpec(
                generators=tuple(values.get("generators", "")), rules=tuple(rules)
            )
        elif family == "surface" and "genus" in values:
            spec = parse_group_expression(f"surface({values['genus']})")
        elif family in ("free", "free_abelian") and "rank" in values:
            spec = parse_group_expression(f"{family}({values['rank']})")
        else:
            spec = parse_group_expression(family)
    except (GroupSpecError, ValueError) as exc:
        raise GraphFormatError(str(exc), path) from exc
    return spec, cosets


def load_group_config(path: str | Path) -> tuple[GroupSpec, list[CosetSpec]]:
    return parse_group_config(_read(path), str(path))
