"""Tests for horoballs, approximation graphs and the Bowditch space.

Covers:
  - horoball sizes and the exact shortcut distance through levels
  - approximation graphs: nets, connection radius, disconnection witness
  - Bowditch vertex layout, back-map, default depth and distortion profile
  - RH1 four-point delta, traces and de-verticalized paths
"""

import math

import pytest
from relhyp.core.errors import ParameterError
from relhyp.models.graph import VertexSet
from relhyp.models.groups import CayleyBall
from relhyp.models.peripherals import PeripheralFamily
from relhyp.models.spaces import BackRef, BowditchSpace
from relhyp.services.bowditch import (
    NetDisconnectedError,
    bowditch_trace,
    build_approximation_graph,
    build_bowditch,
    build_horoball,
    check_rh1,
    default_depth,
    devertical,
    trace_vs_transient,
)
from relhyp.services.metric_graph import geodesic, path_graph

WHOLE_LINE = PeripheralFamily(members=(VertexSet(range(10)),))


@pytest.fixture()
def line_bowditch() -> BowditchSpace:
    """Path on ten vertices with one horoball of depth 3 over its 2-net."""
    return build_bowditch(path_graph(10), WHOLE_LINE, k=2.0, R=2.0, depth=3)


# ---------------------------------------------------------------------------
# Horoballs
# ---------------------------------------------------------------------------


class TestHoroball:
    def test_size(self) -> None:
        ball = build_horoball(path_graph(3), 2)
        assert ball.graph.vertex_count == 9
        assert len(ball.graph.edges) == 12

    def test_levels_shortcut_long_distances(self) -> None:
        ball = build_horoball(path_graph(11), 2)
        far = ball.graph.distance(ball.vertex(0, 0), ball.vertex(10, 0))
        assert far == pytest.approx(4 + 10 * math.exp(-2))

    def test_short_distances_stay_on_the_base(self) -> None:
        ball = build_horoball(path_graph(3), 2)
        assert ball.graph.distance(ball.vertex(0, 0), ball.vertex(2, 0)) == 2.0

    def test_locate(self) -> None:
        ball = build_horoball(path_graph(4), 2)
        assert ball.locate(ball.vertex(3, 2)) == (3, 2)

    def test_rejects_zero_depth(self) -> None:
        with pytest.raises(ParameterError):
            build_horoball(path_graph(3), 0)


class TestApproximationGraph:
    def test_net_and_edges(self) -> None:
        approx = build_approximation_graph(path_graph(10), VertexSet(range(10)), 2.0, 2.0)
        assert approx.net.members == (0, 2, 4, 6, 8)
        assert approx.graph.distance(0, 4) == 8.0
        assert approx.x_vertex(2) == 4

    def test_disconnected_net(self) -> None:
        with pytest.raises(NetDisconnectedError) as info:
            build_approximation_graph(
                path_graph(10), VertexSet(range(10)), 2.0, 1.0, member=3
            )
        assert info.value.witness == (0, 2)
        assert info.value.member == 3

    def test_rejects_non_positive_radius(self) -> None:
        with pytest.raises(ParameterError):
            build_approximation_graph(path_graph(3), VertexSet((0,)), 1.0, 0.0)

    def test_default_depth(self) -> None:
        approx = build_approximation_graph(path_graph(10), VertexSet(range(10)), 2.0, 2.0)
        assert default_depth([approx]) == 5


# ---------------------------------------------------------------------------
# Bowditch space
# ---------------------------------------------------------------------------


class TestBowditchSpace:
    def test_layout(self, line_bowditch: BowditchSpace) -> None:
        assert line_bowditch.graph.vertex_count == 25
        assert line_bowditch.backmap[9] == BackRef(None, 0, 9)
        assert line_bowditch.backmap[10] == BackRef(0, 1, 0)
        assert line_bowditch.backmap[24] == BackRef(0, 3, 8)
        assert line_bowditch.is_x_vertex(9)
        assert not line_bowditch.is_x_vertex(10)

    def test_horoball_shortcut(self, line_bowditch: BowditchSpace) -> None:
        assert line_bowditch.graph.distance(0, 8) == pytest.approx(2 + 8 * math.exp(-1))

    def test_truncation_error(self, line_bowditch: BowditchSpace) -> None:
        assert line_bowditch.truncation_error == pytest.approx(8 * math.exp(-3))

    def test_distortion_profile_is_monotone(self, line_bowditch: BowditchSpace) -> None:
        profile = line_bowditch.distortion
        assert profile
        bounds = [m for _, m in profile]
        assert bounds == sorted(bounds)
        assert bounds[-1] == 9.0

    def test_empty_family_keeps_the_ambient_graph(self) -> None:
        bow = build_bowditch(path_graph(5), PeripheralFamily(), depth=2)
        assert bow.graph.vertex_count == 5


class TestChecks:
    def test_rh1_on_free_group_cosets(
        self, free2_ball: CayleyBall, free2_cosets: PeripheralFamily
    ) -> None:
        bow = build_bowditch(free2_ball.graph, free2_cosets, k=1.0, R=1.0, depth=2)
        report = check_rh1(bow, pool=VertexSet(range(17)))
        assert report.condition == "rh1"
        assert report.mode == "exhaustive"
        assert report.details["depth"] == 2
        assert report.witnesses[0].note == "four-point quadruple"

    def test_rh1_small_pool(self, line_bowditch: BowditchSpace) -> None:
        report = check_rh1(line_bowditch, pool=VertexSet((0, 1, 2)))
        assert report.status == "no-admissible-pairs"

    def test_trace_leaves_the_ambient_graph(self, line_bowditch: BowditchSpace) -> None:
        assert bowditch_trace(line_bowditch, 0, 8) == (0, 8)

    def test_trace_against_transient_set(self, line_bowditch: BowditchSpace) -> None:
        gap = trace_vs_transient(line_bowditch, WHOLE_LINE, 0, 8, 1.0, 2.0)
        assert gap == 2.0

    def test_devertical(self, line_bowditch: BowditchSpace) -> None:
        path, K = devertical(line_bowditch, geodesic(line_bowditch.graph, 0, 8))
        assert path.vertices == tuple(range(9))
        assert K == 1
        assert path.quasi_constants == (1.0, 1.0)

    def test_devertical_needs_ambient_endpoints(self, line_bowditch: BowditchSpace) -> None:
        with pytest.raises(ParameterError):
            devertical(line_bowditch, geodesic(line_bowditch.graph, 10, 0))
