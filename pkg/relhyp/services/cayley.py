"""Cayley-graph balls and peripheral cosets for the built-in group families."""

from __future__ import annotations

import logging
import re
from collections import defaultdict

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from relhyp.core.errors import RelHypError
from relhyp.core.logging import EVENT_BALL_BUILT, EVENT_FAMILY_BUILT, log_event
from relhyp.core.settings import settings
from relhyp.models.graph import VertexSet
from relhyp.models.groups import (
    IDENTITY_LABEL,
    CayleyBall,
    CosetSpec,
    DirectProductSpec,
    FreeAbelianSpec,
    FreeProductSpec,
    FreeSpec,
    GroupSpec,
    RewritingSpec,
    SurfaceSpec,
)
from relhyp.models.peripherals import PeripheralFamily
from relhyp.services.metric_graph import MetricGraph
from relhyp.services.rewriting import (
    RewritingSystem,
    check_confluence,
    commutation_rules,
    free_abelian_system,
    free_system,
    surface_system,
    user_system,
)

logger = logging.getLogger(__name__)

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GroupSpecError(RelHypError):
    error_category = "input"


class BallSizeExceededError(RelHypError):
    error_category = "limits"


class SubgroupAlphabetError(RelHypError):
    error_category = "input"


# ---------------------------------------------------------------------------
# Word problems per family
# ---------------------------------------------------------------------------


def system_for(spec: GroupSpec) -> RewritingSystem:
    """Rewriting system solving the word problem of ``spec``.

    Product factors are renamed so their alphabets are disjoint: the right
    factor takes the next unused letters.
    """
    if isinstance(spec, FreeSpec):
        return free_system(spec.rank)
    if isinstance(spec, FreeAbelianSpec):
        return free_abelian_system(spec.rank)
    if isinstance(spec, SurfaceSpec):
        return surface_system(spec.genus)
    if isinstance(spec, RewritingSpec):
        return user_system(spec.generators, spec.rules)
    if isinstance(spec, FreeProductSpec | DirectProductSpec):
        left = system_for(spec.left)
        right = _rename_after(left, system_for(spec.right))
        gens = left.generators + right.generators
        rules = left.rules + right.rules
        if isinstance(spec, DirectProductSpec):
            if not (left.confluent and right.confluent):
                raise GroupSpecError("direct products need factors with confluent systems")
            rules = rules + tuple(commutation_rules(left.generators, right.generators))
        return RewritingSystem(gens, rules, confluent=left.confluent and right.confluent)
    raise GroupSpecError(f"unknown group family {spec!r}")  # pragma: no cover


def _rename_after(left: RewritingSystem, right: RewritingSystem) -> RewritingSystem:
    used = set(left.generators)
    free_letters = [ch for ch in _LETTERS if ch not in used]
    if len(right.generators) > len(free_letters):
        raise GroupSpecError("product has more than 26 generators")
    mapping: dict[str, str] = {}
    for g in right.generators:
        mapping[g] = free_letters.pop(0)
    return right.renamed(mapping)


def validate_spec(spec: GroupSpec, radius: int) -> RewritingSystem:
    """Build the system, checking user-supplied rules up to the ball's word length."""
    system = system_for(spec)
    if _contains_user_rules(spec):
        check_confluence(system, max_length=2 * radius + 2)
    return system


def _contains_user_rules(spec: GroupSpec) -> bool:
    if isinstance(spec, RewritingSpec):
        return True
    if isinstance(spec, FreeProductSpec | DirectProductSpec):
        return _contains_user_rules(spec.left) or _contains_user_rules(spec.right)
    return False


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------


class _ElementIndex:
    """Finds the vertex of an element: by normal form, or by Dehn equality in buckets."""

    def __init__(self, system: RewritingSystem) -> None:
        self._system = system
        self._by_form: dict[str, int] = {}
        self._buckets: dict[tuple[int, ...], list[tuple[str, int]]] = defaultdict(list)
        self._gens = {g: i for i, g in enumerate(system.generators)}

    def _abelian(self, word: str) -> tuple[int, ...]:
        counts = [0] * len(self._gens)
        for ch in word:
            counts[self._gens[ch.lower()]] += 1 if ch.islower() else -1
        return tuple(counts)

    def find(self, word: str) -> int | None:
        reduced = self._system.reduce(word)
        if self._system.confluent:
            return self._by_form.get(reduced)
        hit = self._by_form.get(reduced)
        if hit is not None:
            return hit
        for other, vid in self._buckets[self._abelian(reduced)]:
            if self._system.equal(reduced, other):
                return vid
        return None

    def add(self, word: str, vid: int) -> None:
        reduced = self._system.reduce(word)
        self._by_form[reduced] = vid
        if not self._system.confluent:
            self._buckets[self._abelian(reduced)].append((reduced, vid))


def build_ball(
    spec: GroupSpec,
    radius: int,
    *,
    max_radius: int | None = None,
    max_vertices: int | None = None,
) -> CayleyBall:
    """Breadth-first ball of ``radius`` around the identity (vertex 0)."""
    max_radius = settings.max_radius if max_radius is None else max_radius
    max_vertices = settings.max_ball_vertices if max_vertices is None else max_vertices
    if not 1 <= radius <= max_radius:
        raise GroupSpecError(f"radius must lie in 1..{max_radius}, got {radius}")

    system = validate_spec(spec, radius)
    alphabet = system.alphabet
    index = _ElementIndex(system)
    words: list[str] = [""]
    levels: list[int] = [0]
    index.add("", 0)
    letters: dict[tuple[int, int], str] = {}
    edges: list[tuple[int, int, float]] = []

    frontier = [0]
    for level in range(radius + 1):
        next_frontier: list[int] = []
        for v in frontier:
            base = words[v]
            for x in alphabet:
                candidate = base + x
                target = index.find(candidate)
                if target is None:
                    if level == radius:
                        continue
                    target = len(words)
                    if target >= max_vertices:
                        raise BallSizeExceededError(
                            f"ball of radius {radius} exceeds {max_vertices} vertices"
                        )
                    stored = system.reduce(candidate) if system.confluent else candidate
                    words.append(stored)
                    levels.append(level + 1)
                    index.add(candidate, target)
                    next_frontier.append(target)
                if target == v or (v, target) in letters:
                    continue
                letters[(v, target)] = x
                letters[(target, v)] = x.swapcase()
                edges.append((v, target, 1.0))
        frontier = next_frontier

    graph = MetricGraph(
        len(words),
        edges,
        labels=[w or IDENTITY_LABEL for w in words],
        merge_parallel=True,
    )
    log_event(
        logger, "info", EVENT_BALL_BUILT,
        family=spec.family, radius=radius, vertices=graph.vertex_count,
        edges=len(graph.edges),
    )
    return CayleyBall(
        radius=radius,
        graph=graph,
        words=tuple(words),
        levels=tuple(levels),
        alphabet=alphabet,
        edge_letters=letters,
    )


def find_vertex(spec: GroupSpec, ball: CayleyBall, word: str) -> int | None:
    """Vertex of the element represented by ``word``, or None outside the ball."""
    system = system_for(spec)
    if word == IDENTITY_LABEL:
        word = ""
    if system.confluent:
        form = system.reduce(word)
        return next((v for v, w in enumerate(ball.words) if w == form), None)
    return next((v for v, w in enumerate(ball.words) if system.equal(w, word)), None)


# ---------------------------------------------------------------------------
# Cosets
# ---------------------------------------------------------------------------


def _check_subgroup(ball: CayleyBall, subgroup: tuple[str, ...]) -> set[str]:
    letters = set(subgroup)
    unknown = letters - set(ball.alphabet)
    if unknown:
        raise SubgroupAlphabetError(
            f"subgroup letters {''.join(sorted(unknown))} are not generators of the group"
        )
    missing = {x.swapcase() for x in letters} - letters
    if missing:
        raise SubgroupAlphabetError(
            f"subgroup alphabet is not closed under inversion; missing {''.join(sorted(missing))}"
        )
    if not letters:
        raise SubgroupAlphabetError("subgroup alphabet is empty")
    return letters


def enumerate_cosets(ball: CayleyBall, subgroup: tuple[str, ...]) -> list[VertexSet]:
    """Every coset meeting the ball, as components of subgroup-labelled edges.

    Ordered by least vertex id, which is the coset's shortest representative.
    """
    letters = _check_subgroup(ball, subgroup)
    n = ball.vertex_count
    keep = [(u, v) for (u, v), x in ball.edge_letters.items() if u < v and x in letters]
    if keep:
        rows, cols = zip(*keep, strict=True)
        adj = sparse.csr_matrix((np.ones(len(keep)), (rows, cols)), shape=(n, n))
    else:
        adj = sparse.csr_matrix((n, n))
    _, labels = connected_components(adj, directed=False)
    groups: dict[int, list[int]] = defaultdict(list)
    for v, label in enumerate(labels.tolist()):
        groups[label].append(v)
    return sorted((VertexSet(tuple(vs)) for vs in groups.values()), key=lambda s: s.members[0])


def peripheral_cosets(
    spec: GroupSpec,
    ball: CayleyBall,
    coset_specs: list[CosetSpec],
    min_size: int | None = None,
) -> PeripheralFamily:
    """Family of coset-ball intersections, dropping members below ``min_size``."""
    min_size = settings.min_coset_size if min_size is None else min_size
    members: list[VertexSet] = []
    names: list[str] = []
    seen: set[tuple[int, ...]] = set()
    for cs in coset_specs:
        cosets = enumerate_cosets(ball, cs.subgroup)
        if cs.representative is not None:
            v = find_vertex(spec, ball, cs.representative)
            if v is None:
                raise GroupSpecError(f"representative {cs.representative!r} lies outside the ball")
            cosets = [c for c in cosets if v in c]
        tag = "".join(sorted(x for x in cs.subgroup if x.islower()))
        for coset in cosets:
            if len(coset) < min_size or coset.members in seen:
                continue
            seen.add(coset.members)
            members.append(coset)
            names.append(f"{ball.graph.label(coset.members[0])}<{tag}>")
    log_event(
        logger, "info", EVENT_FAMILY_BUILT,
        members=len(members), min_size=min_size,
        largest=max((len(m) for m in members), default=0),
    )
    return PeripheralFamily(members=tuple(members), coarse_connectivity_K=1.0, names=tuple(names))


# ---------------------------------------------------------------------------
# Family expressions
# ---------------------------------------------------------------------------

_ALIAS = re.compile(r"^(free|z|surface)(\d+)$")


def parse_group_expression(text: str) -> GroupSpec:
    """Parse ``free(2)``, ``free_abelian(2)``, ``free_product(z2,free1)``, ``surface(2)``...

    Shorthands: ``free<n>``, ``z<n>`` (free abelian) and ``surface<g>``.
    """
    expr = text.replace(" ", "")
    spec, rest = _parse_expr(expr, text)
    if rest:
        raise GroupSpecError(f"unexpected trailing text {rest!r} in group expression {text!r}")
    return spec


def _parse_expr(expr: str, original: str) -> tuple[GroupSpec, str]:
    m = re.match(r"^([a-z_]+\d*)", expr)
    if not m:
        raise GroupSpecError(f"cannot parse group expression {original!r}")
    head = m.group(1)
    rest = expr[m.end() :]
    alias = _ALIAS.match(head)
    if alias and not rest.startswith("("):
        kind, number = alias.group(1), int(alias.group(2))
        return _leaf(kind, number, original), rest
    if not rest.startswith("("):
        raise GroupSpecError(f"expected '(' after {head!r} in {original!r}")
    rest = rest[1:]
    if head in ("free_product", "direct_product"):
        left, rest = _parse_expr(rest, original)
        if not rest.startswith(","):
            raise GroupSpecError(f"{head} takes two factors in {original!r}")
        right, rest = _parse_expr(rest[1:], original)
        if not rest.startswith(")"):
            raise GroupSpecError(f"missing ')' in {original!r}")
        cls = FreeProductSpec if head == "free_product" else DirectProductSpec
        return cls(left=left, right=right), rest[1:]
    number_match = re.match(r"^(\d+)\)", rest)
    if not number_match:
        raise GroupSpecError(f"{head} expects an integer argument in {original!r}")
    number = int(number_match.group(1))
    kind = {"free": "free", "free_abelian": "z", "surface": "surface"}.get(head)
    if kind is None:
        raise GroupSpecError(f"unknown group family {head!r} in {original!r}")
    return _leaf(kind, number, original), rest[number_match.end() :]


def _leaf(kind: str, number: int, original: str) -> GroupSpec:
    try:
        if kind == "free":
            return FreeSpec(rank=number)
        if kind == "z":
            return FreeAbelianSpec(rank=number)
        return SurfaceSpec(genus=number)
    except ValueError as exc:
        raise GroupSpecError(f"invalid parameter in {original!r}: {exc}") from exc
