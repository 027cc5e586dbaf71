"""Acceptance protocols on reference models.

Covers:
  - horoball vertical rays and level-0 distances against a networkx oracle
  - trees with an empty family: zero Rips defect, infinite divergence through
    interior vertices, exact tree-graded approximation
  - Z^2 with an empty family: Rips defect growing with the radius
  - free group and free product cosets keep (alpha1) and BCP stable over
    radii 4..6; lines in Z^2 grow and exit with a violation
  - transient sets, coned-off traces and Bowditch traces of the free product
    agree on seeded pairs
  - guessing-geodesics audit of the free product: true geodesics pass, a hub
    detour fails the thin-triangle condition
  - Z^2 divergence fits linear growth; detours in a free group are blocked
  - tree-graded approximations of free product configurations with the
    identity plane
  - replaying every run command reproduces its report
"""

import json
from pathlib import Path
from typing import Any

import networkx as nx
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from relhyp.core.errors import EXIT_OK, EXIT_VIOLATION
from relhyp.main import main
from relhyp.models.graph import VertexSet
from relhyp.models.groups import CosetSpec, FreeAbelianSpec, FreeSpec
from relhyp.models.peripherals import EMPTY_FAMILY, PeripheralFamily
from relhyp.models.spaces import Configuration
from relhyp.models.transient import TransientParams
from relhyp.services.bowditch import bowditch_trace, build_bowditch, build_horoball
from relhyp.services.cayley import (
    build_ball,
    find_vertex,
    parse_group_expression,
    peripheral_cosets,
)
from relhyp.services.coned_off import (
    build_coned_off,
    check_rh2,
    coned_trace,
    coned_trace_vs_transient,
)
from relhyp.services.divergence import check_log_detour, div_function, div_point
from relhyp.services.guessing_geodesics import (
    geodesic_family,
    gg_condition_audit,
    hub_corrupted_family,
)
from relhyp.services.metric_graph import (
    MetricGraph,
    geodesic,
    interior_vertices,
    random_tree,
    to_networkx,
)
from relhyp.services.peripherals import check_alpha1
from relhyp.services.sampling import SampleSpec, classify_trend, sample_pairs
from relhyp.services.transient import check_relative_rips
from relhyp.services.tree_approx import build_tree_graded_approx, verify_tree_graded

A_COSETS = [CosetSpec(subgroup=("a", "A"))]
PLANE_COSETS = [CosetSpec(subgroup=("a", "A", "b", "B"))]
FREE_PRODUCT = parse_group_expression("free_product(z2,free1)")


def _load(path: Path) -> dict[str, Any]:
    return json.loads(path.read_text(encoding="utf-8"))  # type: ignore[no-any-return]


def _vertex(spec: Any, ball: Any, word: str) -> int:
    v = find_vertex(spec, ball, word)
    assert v is not None
    return v


@pytest.fixture(scope="module")
def free_product_r5() -> tuple[MetricGraph, PeripheralFamily]:
    ball = build_ball(FREE_PRODUCT, 5)
    return ball.graph, peripheral_cosets(FREE_PRODUCT, ball, PLANE_COSETS)


# ---------------------------------------------------------------------------
# Horoballs
# ---------------------------------------------------------------------------


@settings(max_examples=15, deadline=None)
@given(n=st.integers(min_value=2, max_value=12), seed=st.integers(min_value=0, max_value=10_000))
def test_horoball_vertical_rays(n: int, seed: int) -> None:
    ball = build_horoball(random_tree(n, seed), 3)
    for v in range(n):
        for level in range(4):
            assert ball.graph.distance(ball.vertex(v, 0), ball.vertex(v, level)) == (
                pytest.approx(level)
            )


@settings(max_examples=15, deadline=None)
@given(n=st.integers(min_value=2, max_value=12), seed=st.integers(min_value=0, max_value=10_000))
def test_horoball_distances_match_oracle(n: int, seed: int) -> None:
    ball = build_horoball(random_tree(n, seed), 2)
    oracle = dict(nx.all_pairs_dijkstra_path_length(to_networkx(ball.graph), weight="length"))
    for u in range(n):
        for v in range(n):
            assert ball.graph.distance(u, v) == pytest.approx(oracle[u][v])


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(n=st.integers(min_value=4, max_value=12), seed=st.integers(min_value=0, max_value=10_000))
def test_trees_have_zero_rips_defect(n: int, seed: int) -> None:
    g = random_tree(n, seed)
    report = check_relative_rips(
        g, EMPTY_FAMILY, 1.0, 1.0, SampleSpec(), pool=VertexSet(range(n))
    )
    assert report.constants["D"] == 0.0
    assert report.status == "ok"


@settings(max_examples=25, deadline=None)
@given(n=st.integers(min_value=3, max_value=20), seed=st.integers(min_value=0, max_value=10_000))
def test_tree_divergence_through_interior_is_infinite(n: int, seed: int) -> None:
    g = random_tree(n, seed)
    path = geodesic(g, 0, n - 1)
    assume(len(path.vertices) > 2)
    for c in path.vertices[1:-1]:
        assert div_point(g, 0, n - 1, c) == float("inf")


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(n=st.integers(min_value=4, max_value=14), seed=st.integers(min_value=0, max_value=10_000))
def test_tree_graded_approximation_of_a_tree_is_exact(n: int, seed: int) -> None:
    g = random_tree(n, seed)
    conf = Configuration(points=VertexSet((0, 1, 2, 3)))
    space, report = build_tree_graded_approx(g, EMPTY_FAMILY, conf)
    assert report.c_mul == pytest.approx(1.0)
    assert report.c_add == pytest.approx(0.0, abs=1e-9)
    assert verify_tree_graded(space).ok


# ---------------------------------------------------------------------------
# Radius-6 groups
# ---------------------------------------------------------------------------


@pytest.mark.slow
class TestRadiusSix:
    def test_free_group_cosets_are_isolated(self) -> None:
        spec = FreeSpec(rank=2)
        ball = build_ball(spec, 6)
        family = peripheral_cosets(spec, ball, A_COSETS)
        report = check_alpha1(ball.graph, family, 1.0)
        assert report.constants["B"] <= 1.0
        assert report.status == "ok"

    def test_lines_in_z2_overlap(self) -> None:
        spec = FreeAbelianSpec(rank=2)
        ball = build_ball(spec, 6)
        family = peripheral_cosets(spec, ball, A_COSETS)
        report = check_alpha1(ball.graph, family, 1.0)
        assert report.constants["B"] == pytest.approx(11.0)
        assert report.status == "violation"

    def test_cli_exit_codes(self, tmp_path: Path) -> None:
        free = ["check", "alpha1", "--family", "free2", "--radius", "6", "--coset", "a"]
        lines = ["check", "alpha1", "--family", "z2", "--radius", "6", "--coset", "a"]
        assert main([*free, "--out", str(tmp_path / "f.json")]) == EXIT_OK
        assert main([*lines, "--out", str(tmp_path / "z.json")]) == EXIT_VIOLATION


# ---------------------------------------------------------------------------
# Rips defect, (alpha1) and BCP across radii
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_z2_rips_defect_grows_with_the_radius() -> None:
    spec = FreeAbelianSpec(rank=2)
    values = [
        check_relative_rips(build_ball(spec, r).graph, EMPTY_FAMILY, 1.0, 2.0).constants["D"]
        for r in (3, 4, 5)
    ]
    # radius 3 leaves the unit ball as pool, where every canonical geodesic meets e
    assert values[0] == 0.0
    assert values[0] < values[1] <= values[2]


@pytest.mark.slow
class TestStabilizationAcrossRadii:
    @pytest.mark.parametrize(
        ("spec", "cosets"),
        [(FreeSpec(rank=2), A_COSETS), (FREE_PRODUCT, PLANE_COSETS)],
        ids=["free2", "free_product"],
    )
    def test_isolated_cosets_settle(self, spec: Any, cosets: list[CosetSpec]) -> None:
        values = []
        for radius in (4, 5, 6):
            ball = build_ball(spec, radius)
            report = check_alpha1(ball.graph, peripheral_cosets(spec, ball, cosets), 1.0)
            assert report.status == "ok"
            values.append(report.constants["B"])
        assert values == [1.0, 1.0, 1.0]
        assert classify_trend([4, 5, 6], values) == "stable"

    @pytest.mark.parametrize(
        ("spec", "cosets"),
        [(FreeSpec(rank=2), A_COSETS), (FREE_PRODUCT, PLANE_COSETS)],
        ids=["free2", "free_product"],
    )
    def test_penetration_constant_settles(self, spec: Any, cosets: list[CosetSpec]) -> None:
        values = []
        for radius in (4, 5, 6):
            ball = build_ball(spec, radius)
            coned = build_coned_off(ball.graph, peripheral_cosets(spec, ball, cosets))
            _, reports = check_rh2(coned)
            values.append(max(report.K for report in reports))
        # cosets meet only across bridges, so only a perturbed endpoint moves an exit
        assert max(values) <= 1.0
        assert classify_trend([4, 5, 6], values) == "stable"

    def test_z2_lines_grow(self, tmp_path: Path) -> None:
        out = tmp_path / "lines.json"
        argv = ["check", "alpha1", "--family", "z2", "--radii", "4,5,6", "--coset", "a"]
        assert main([*argv, "--out", str(out)]) == EXIT_VIOLATION
        report = _load(out)
        assert [p["constants"]["alpha1.B"] for p in report["series"]] == [7.0, 9.0, 11.0]
        trend = next(p for p in report["payloads"] if p.get("condition") == "stabilization")
        assert trend["details"]["trends"]["alpha1.B"] == "growing"


# ---------------------------------------------------------------------------
# Transient sets against coned-off and Bowditch traces
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_traces_follow_the_transient_sets_of_the_free_product() -> None:
    ball = build_ball(FREE_PRODUCT, 4)
    fam = peripheral_cosets(FREE_PRODUCT, ball, PLANE_COSETS)
    coned = build_coned_off(ball.graph, fam)
    bow = build_bowditch(ball.graph, fam, k=1.0, R=2.0)
    spec = SampleSpec(mode="sample", count=100, seed=7)
    pairs = sample_pairs(interior_vertices(ball.graph).members, spec)
    assert len(pairs) == 100
    for x, y in pairs:
        assert coned_trace_vs_transient(coned, x, y, 1.0, 2.0) <= 2.0
        assert set(coned_trace(coned, x, y)) <= set(bowditch_trace(bow, x, y))


# ---------------------------------------------------------------------------
# Guessing geodesics
# ---------------------------------------------------------------------------


@pytest.mark.slow
class TestGuessingGeodesicsOnTheFreeProduct:
    def test_true_geodesics_are_plausible(
        self, free_product_r5: tuple[MetricGraph, PeripheralFamily]
    ) -> None:
        g, fam = free_product_r5
        family = geodesic_family(g, fam, VertexSet(range(12)), TransientParams())
        audit = gg_condition_audit(g, fam, family, cap=10.0)
        assert audit.plausible
        assert audit.over_cap() == []

    def test_hub_detour_fails_thin_triangles(self) -> None:
        ball = build_ball(FREE_PRODUCT, 6)
        fam = peripheral_cosets(FREE_PRODUCT, ball, PLANE_COSETS)
        words = ("ccccca", "ccccc", "cccccb")
        pool = VertexSet(tuple(sorted(_vertex(FREE_PRODUCT, ball, w) for w in words)))
        base = geodesic_family(ball.graph, fam, pool, TransientParams())
        corrupted = hub_corrupted_family(ball.graph, base, None, 2.0)
        audit = gg_condition_audit(ball.graph, fam, corrupted, cap=10.0)
        assert not audit.plausible
        # the hub sits 11 steps from c^5, the farthest any ball vertex gets
        assert ("gg3", "D", 11.0) in audit.over_cap()


# ---------------------------------------------------------------------------
# Divergence baselines
# ---------------------------------------------------------------------------


@pytest.mark.slow
class TestDivergenceBaselines:
    def test_z2_fits_linear_growth(self) -> None:
        ball = build_ball(FreeAbelianSpec(rank=2), 12)
        report = div_function(ball.graph, 8)
        assert report.growth is not None
        assert report.growth.classification == "linear"
        residuals = report.growth.residuals
        assert residuals["exponential"] >= 2 * residuals["linear"]

    def test_free_group_detours_are_blocked(self) -> None:
        spec = FreeSpec(rank=2)
        ball = build_ball(spec, 6)
        axis = geodesic(
            ball.graph, _vertex(spec, ball, "AAAAAA"), _vertex(spec, ball, "aaaaaa")
        )
        report = check_log_detour(ball.graph, axis, samples=50, seed=0)
        assert report.samples > 0
        assert report.details["blocked"] == report.samples
        assert report.constants["C"] == 0.0


# ---------------------------------------------------------------------------
# Tree-graded approximation of the free product
# ---------------------------------------------------------------------------


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_free_product_configurations_with_the_identity_plane(
    free_product_r5: tuple[MetricGraph, PeripheralFamily], seed: int
) -> None:
    g, fam = free_product_r5
    rng = np.random.default_rng(seed)
    points = sorted(int(v) for v in rng.choice(g.vertex_count, size=3, replace=False))
    conf = Configuration(points=VertexSet(tuple(points)), peripheral_indices=(0,))
    space, report = build_tree_graded_approx(g, fam, conf)
    assert report.c_mul <= 3.0
    assert report.c_add <= 6.0
    assert verify_tree_graded(space).ok


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


@pytest.mark.slow
@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--family", "free2", "--radius", "2"],
        ["cosets", "--family", "free2", "--radius", "2", "--coset", "a"],
        ["coneoff", "--family", "free2", "--radius", "2", "--coset", "a"],
        ["bowditch", "--family", "free2", "--radius", "2", "--coset", "a"],
        ["divergence", "--family", "z2", "--radius", "3", "--n-max", "2"],
        ["treeapprox", "--family", "free2", "--radius", "3", "--coset", "a", "--seed", "1"],
        ["check", "alpha1", "--family", "free2", "--radius", "2", "--coset", "a"],
    ],
    ids=lambda argv: argv[0] if argv[0] != "check" else argv[1],
)
def test_replay_reproduces(tmp_path: Path, argv: list[str]) -> None:
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    code = main([*argv, "--out", str(first)])
    assert code in (EXIT_OK, EXIT_VIOLATION)
    assert main(["replay", str(first), "--out", str(second)]) == code
    a, b = _load(first), _load(second)
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b
