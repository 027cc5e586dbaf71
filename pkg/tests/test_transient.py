"""Tests for deep/transient decompositions and the checks built on them.

Covers:
  - decomposition of a path crossing one member, degenerate paths and families
  - relative Rips constant on trees and cycles
  - the RH3 pair condition on free-group cosets, empty samples and strict mode
  - triangle classification (case C, case P, neither) and the RH0 sigma
  - stability of transient sets under detours
"""

import pytest
from relhyp.core.errors import ParameterError
from relhyp.models.graph import VertexSet
from relhyp.models.groups import CayleyBall
from relhyp.models.peripherals import EMPTY_FAMILY, PeripheralFamily
from relhyp.models.transient import CaseC, CaseP, DeepComponent, Neither, TransientParams
from relhyp.services.metric_graph import cycle_graph, geodesic, path_from_vertices, path_graph
from relhyp.services.transient import (
    EndpointMismatchError,
    NoAdmissiblePairsError,
    check_relative_rips,
    check_rh0,
    check_rh3,
    check_rh3_cond2,
    check_transient_stability,
    classify_triangle_atg,
    decompose,
    quasi_geodesic_pairs,
    triangle,
)

WHOLE_CYCLE = PeripheralFamily(members=(VertexSet(range(12)),))


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------


class TestDecompose:
    def test_path_through_member(self) -> None:
        g = path_graph(9)
        fam = PeripheralFamily(members=(VertexSet((3, 4, 5)),))
        dec = decompose(g, fam, geodesic(g, 0, 8), TransientParams(mu=1.0, c=0.5))
        assert dec.deep_components == (DeepComponent(0, 3, 5),)
        assert dec.transient == (0, 1, 2, 6, 7, 8)
        assert dec.member_of(4) == 0
        assert dec.member_of(0) is None

    def test_large_collar_leaves_everything_transient(self) -> None:
        g = path_graph(9)
        fam = PeripheralFamily(members=(VertexSet((3, 4, 5)),))
        dec = decompose(g, fam, geodesic(g, 0, 8), TransientParams(mu=0.0, c=1.5))
        assert dec.deep_components == ()
        assert len(dec.transient) == 9

    def test_empty_family(self) -> None:
        g = path_graph(4)
        dec = decompose(g, EMPTY_FAMILY, geodesic(g, 0, 3))
        assert dec.transient_vertices() == VertexSet(range(4))

    def test_short_path(self) -> None:
        g = path_graph(4)
        fam = PeripheralFamily(members=(VertexSet((0, 1)),))
        dec = decompose(g, fam, geodesic(g, 0, 1), TransientParams(mu=5.0, c=0.0))
        assert dec.transient == (0, 1)


# ---------------------------------------------------------------------------
# Relative Rips and RH3
# ---------------------------------------------------------------------------


class TestRelativeRips:
    def test_tree_triangles_are_thin(self) -> None:
        report = check_relative_rips(path_graph(6), EMPTY_FAMILY, 1.0, 2.0,
                                     pool=VertexSet(range(6)))
        assert report.constant("D") == 0.0
        assert report.samples == 20

    def test_cycle_triangles_are_fat(self) -> None:
        report = check_relative_rips(cycle_graph(12), EMPTY_FAMILY, 1.0, 2.0,
                                     pool=VertexSet((0, 4, 8)))
        assert report.constant("D") == 2.0
        assert report.witnesses[0].vertices[:3] == (0, 4, 8)

    def test_negative_radius(self) -> None:
        with pytest.raises(ParameterError):
            check_relative_rips(path_graph(3), EMPTY_FAMILY, 1.0, -1.0)


class TestRH3:
    def test_coset_pairs(self, free2_ball: CayleyBall, free2_cosets: PeripheralFamily) -> None:
        report = check_rh3_cond2(free2_ball.graph, free2_cosets, 1.0, 2.0, 1.0,
                                 pool=VertexSet(range(17)))
        assert report.status == "ok"
        assert report.constant("K") <= 2.0
        assert report.details["missing_entrance"] == 0

    def test_no_pairs_near_a_member(self) -> None:
        g = path_graph(10)
        fam = PeripheralFamily(members=(VertexSet((9,)),))
        report = check_rh3_cond2(g, fam, 1.0, 2.0, 1.0, pool=VertexSet((0, 1)))
        assert report.status == "no-admissible-pairs"
        with pytest.raises(NoAdmissiblePairsError):
            check_rh3_cond2(g, fam, 1.0, 2.0, 1.0, pool=VertexSet((0, 1)), strict=True)

    def test_rejects_negative_k(self) -> None:
        with pytest.raises(ParameterError):
            check_rh3_cond2(path_graph(3), EMPTY_FAMILY, 1.0, 2.0, -1.0)

    def test_grid_of_radii(self) -> None:
        g = path_graph(8)
        fam = PeripheralFamily(members=(VertexSet((2, 3, 4)),))
        reports = check_rh3(g, fam, R_values=(2.0, 4.0), pool=VertexSet(range(8)))
        assert [r.condition for r in reports] == [
            "alpha1", "rh3_cond2_R2", "rips_R2", "rh3_cond2_R4", "rips_R4"
        ]


# ---------------------------------------------------------------------------
# Triangles and RH0
# ---------------------------------------------------------------------------


class TestTriangles:
    def test_tripod_is_case_c(self) -> None:
        g = path_graph(5)
        klass = classify_triangle_atg(g, EMPTY_FAMILY, triangle(g, 0, 2, 4), 0.0, 0.0)
        assert klass == CaseC(center=2, sigma=0.0)

    def test_cycle_triangle_center(self) -> None:
        g = cycle_graph(12)
        klass = classify_triangle_atg(g, EMPTY_FAMILY, triangle(g, 0, 4, 8), 2.0, 0.0)
        assert klass == CaseC(center=2, sigma=2.0)

    def test_cycle_triangle_inside_member(self) -> None:
        g = cycle_graph(12)
        klass = classify_triangle_atg(g, WHOLE_CYCLE, triangle(g, 0, 4, 8), 1.0, 0.0)
        assert isinstance(klass, CaseP)
        assert klass.member == 0
        assert klass.entrances == (0, 4, 8)
        assert klass.max_gap == 0.0

    def test_neither(self) -> None:
        g = cycle_graph(12)
        klass = classify_triangle_atg(g, EMPTY_FAMILY, triangle(g, 0, 4, 8), 1.0, 0.0)
        assert klass == Neither()

    def test_negative_sigma(self) -> None:
        g = path_graph(3)
        with pytest.raises(ParameterError):
            classify_triangle_atg(g, EMPTY_FAMILY, triangle(g, 0, 1, 2), -1.0, 0.0)

    def test_rh0_prefers_peripheral_case(self) -> None:
        g = cycle_graph(12)
        report = check_rh0(g, WHOLE_CYCLE, 2.0, pool=VertexSet((0, 4, 8)))
        assert report.constant("sigma") == 0.0
        assert report.details["case_P"] == 1

    def test_rh0_without_peripherals(self) -> None:
        report = check_rh0(cycle_graph(12), EMPTY_FAMILY, 2.0, pool=VertexSet((0, 4, 8)))
        assert report.constant("sigma") == 2.0
        assert report.details["case_C"] == 1


# ---------------------------------------------------------------------------
# Stability
# ---------------------------------------------------------------------------


class TestStability:
    def test_detour_moves_transient_set(self) -> None:
        g = cycle_graph(6)
        short = path_from_vertices(g, [0, 1, 2, 3])
        other = path_from_vertices(g, [0, 5, 4, 3])
        report = check_transient_stability(g, EMPTY_FAMILY, TransientParams(), [(short, other)])
        assert report.constant("M") == 1.0
        assert report.constant("t") == 1.0

    def test_endpoints_must_match(self) -> None:
        g = path_graph(4)
        with pytest.raises(EndpointMismatchError):
            check_transient_stability(
                g, EMPTY_FAMILY, TransientParams(), [(geodesic(g, 0, 3), geodesic(g, 0, 2))]
            )

    def test_single_geodesic_pairs_with_itself(self) -> None:
        g = path_graph(5)
        pairs = quasi_geodesic_pairs(g, [(0, 4)])
        assert len(pairs) == 1
        assert pairs[0][0] == pairs[0][1]
