"""Tests for transient hulls, tree realization and tree-graded approximations.

Covers:
  - transient hulls of point configurations and configuration validation
  - exact realization of tree metrics, distortion of non-tree metrics
  - embedding constants of a hull map
  - approximations with and without a collapsed peripheral member; hull
    vertices inside a member map into its piece
  - tree-graded verification (shared vertices, cycles outside pieces)
"""

import pytest
from relhyp.core.errors import ParameterError
from relhyp.models.graph import VertexSet
from relhyp.models.peripherals import EMPTY_FAMILY, PeripheralFamily
from relhyp.models.spaces import Configuration, Piece, TreeGradedSpace
from relhyp.models.transient import TransientParams
from relhyp.services.metric_graph import MetricGraph, cycle_graph, path_graph
from relhyp.services.tree_approx import (
    TreeRealizationError,
    approximation_sensitivity,
    build_tree_graded_approx,
    measure_embedding,
    realize_tree_metric,
    transient_hull,
    verify_tree_graded,
)

SQUARE = [
    [0.0, 1.0, 2.0, 1.0],
    [1.0, 0.0, 1.0, 2.0],
    [2.0, 1.0, 0.0, 1.0],
    [1.0, 2.0, 1.0, 0.0],
]
MIDDLE = PeripheralFamily(members=(VertexSet((3, 4, 5)),))


# ---------------------------------------------------------------------------
# Hulls
# ---------------------------------------------------------------------------


class TestTransientHull:
    def test_points_on_a_path(self) -> None:
        conf = Configuration(points=VertexSet((0, 4)))
        assert transient_hull(path_graph(5), EMPTY_FAMILY, conf) == VertexSet(range(5))

    def test_deep_vertices_are_left_out(self) -> None:
        conf = Configuration(points=VertexSet((0, 8)))
        hull = transient_hull(path_graph(9), MIDDLE, conf, TransientParams(mu=1.0, c=0.5))
        assert hull.members == (0, 1, 2, 6, 7, 8)

    def test_empty_configuration(self) -> None:
        with pytest.raises(ParameterError, match="at least one"):
            transient_hull(path_graph(3), EMPTY_FAMILY, Configuration(points=VertexSet(())))

    def test_unknown_member(self) -> None:
        conf = Configuration(points=VertexSet((0,)), peripheral_indices=(2,))
        with pytest.raises(ParameterError, match="member 2"):
            transient_hull(path_graph(3), MIDDLE, conf)


# ---------------------------------------------------------------------------
# Tree realization
# ---------------------------------------------------------------------------


class TestRealizeTreeMetric:
    def test_collinear_points(self) -> None:
        tree = realize_tree_metric([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
        assert tree.position == (0, 1, 2)
        assert tree.defect == 0.0
        assert tree.graph.distance(0, 2) == 3.0

    def test_tripod_gets_a_branch_point(self) -> None:
        tree = realize_tree_metric([[0, 2, 2], [2, 0, 2], [2, 2, 0]])
        assert tree.graph.vertex_count == 4
        assert tree.position == (0, 1, 3)
        assert tree.defect == 0.0

    def test_square_is_distorted(self) -> None:
        assert realize_tree_metric(SQUARE).defect == 2.0

    def test_square_over_tolerance(self) -> None:
        with pytest.raises(TreeRealizationError) as info:
            realize_tree_metric(SQUARE, tolerance=0.5)
        assert info.value.quadruple == (1, 3, 0, 2)
        assert info.value.defect == 2.0

    def test_needs_a_point(self) -> None:
        with pytest.raises(ParameterError):
            realize_tree_metric([])


class TestMeasureEmbedding:
    def test_identity(self) -> None:
        g = path_graph(4)
        report = measure_embedding(g, g, {v: v for v in range(4)})
        assert (report.c_mul, report.c_add, report.pairs) == (1.0, 0.0, 6)

    def test_folded_map(self) -> None:
        g = path_graph(3)
        report = measure_embedding(g, g, {0: 0, 1: 1, 2: 0})
        assert report.c_mul == 1.0
        assert report.c_add == 2.0
        assert report.witnesses[1].vertices == (0, 2)

    def test_single_point(self) -> None:
        report = measure_embedding(path_graph(2), path_graph(2), {0: 0})
        assert report.pairs == 0
        assert report.witnesses == []


# ---------------------------------------------------------------------------
# Tree-graded approximation
# ---------------------------------------------------------------------------


class TestTreeGradedApprox:
    def test_plain_path(self) -> None:
        conf = Configuration(points=VertexSet((0, 2, 4)))
        space, report = build_tree_graded_approx(path_graph(5), EMPTY_FAMILY, conf)
        assert space.pieces == ()
        assert len(space.tree_edges) == 4
        assert (report.c_mul, report.c_add, report.pairs) == (1.0, 0.0, 10)
        assert verify_tree_graded(space).ok

    def test_member_becomes_a_piece(self) -> None:
        conf = Configuration(points=VertexSet((0, 8)))
        space, report = build_tree_graded_approx(
            path_graph(9), MIDDLE, conf, TransientParams(mu=1.0, c=0.5)
        )
        assert [piece.member for piece in space.pieces] == [0]
        assert report.pairs == 15
        assert report.tree_defect == 0.0
        assert (report.c_mul, report.c_add) == (1.0, 0.0)
        assert verify_tree_graded(space).ok

    def test_member_vertices_of_the_hull_land_in_the_piece(self) -> None:
        g = MetricGraph(
            8,
            [(0, 1, 1.0), (1, 3, 1.0), (3, 2, 1.0), (2, 0, 1.0),
             (0, 4, 1.0), (1, 5, 1.0), (3, 6, 1.0), (2, 7, 1.0)],
        )
        square = PeripheralFamily(members=(VertexSet((0, 1, 2, 3)),))
        conf = Configuration(points=VertexSet((4, 5, 6, 7)))
        space, report = build_tree_graded_approx(g, square, conf)
        assert [piece.member for piece in space.pieces] == [0]
        assert all(report.mapping[v] in space.pieces[0].vertices for v in range(4))
        assert report.tree_defect == 0.0
        assert (report.c_mul, report.c_add) == (2.0, 0.0)
        assert verify_tree_graded(space).ok

    def test_configuration_limit(self) -> None:
        conf = Configuration(points=VertexSet((0, 1, 2)))
        with pytest.raises(ParameterError, match="limit is 2"):
            build_tree_graded_approx(path_graph(3), EMPTY_FAMILY, conf, n_max=2)

    def test_sensitivity_grid(self) -> None:
        conf = Configuration(points=VertexSet((0, 8)))
        grid = [TransientParams(mu=1.0, c=0.5), TransientParams(mu=0.0, c=1.5)]
        results = approximation_sensitivity(path_graph(9), MIDDLE, conf, grid)
        assert [params for params, _ in results] == grid
        assert all(report is not None for _, report in results)


class TestVerifyTreeGraded:
    def test_cycle_inside_a_piece(self) -> None:
        space = TreeGradedSpace(cycle_graph(4), (Piece(VertexSet(range(4)), 0),))
        assert verify_tree_graded(space).ok

    def test_cycle_outside_pieces(self) -> None:
        verdict = verify_tree_graded(TreeGradedSpace(cycle_graph(4), ()))
        assert verdict.rule == "T2"
        assert verdict.cycle == (0, 1, 2, 3)

    def test_pieces_sharing_two_vertices(self) -> None:
        g = MetricGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        pieces = (Piece(VertexSet((0, 1)), 0), Piece(VertexSet((0, 1, 2)), 1))
        verdict = verify_tree_graded(TreeGradedSpace(g, pieces))
        assert verdict.rule == "T1"
        assert verdict.pieces == (0, 1)
