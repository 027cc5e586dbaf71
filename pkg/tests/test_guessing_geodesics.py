"""Tests for the guessed-geodesics audit.

Covers:
  - geodesic families are plausible on a line and on free-group cosets
  - a hub-corrupted family on a line with a long spur exceeds the cap; only
    pairs whose hub detour doubles their length are rerouted
  - with an empty peripheral family only gg6 is vacuous; gg4 catches
    stretches with no transient point
  - family validation and the comparison with near-geodesic transient sets
"""

from itertools import combinations

import pytest
from relhyp.models.graph import VertexSet
from relhyp.models.groups import CayleyBall
from relhyp.models.peripherals import EMPTY_FAMILY, PeripheralFamily
from relhyp.models.transient import GGFamily, GGFamilyError, TransientParams
from relhyp.services.guessing_geodesics import (
    geodesic_family,
    gg_compare,
    gg_condition_audit,
    hub_corrupted_family,
)
from relhyp.services.metric_graph import MetricGraph, geodesic, path_graph

POOL = VertexSet((0, 5, 10, 15, 20))
HUB = 50


def _line_with_spur() -> MetricGraph:
    """Path 0..20 with a 30-edge spur hanging from vertex 10 and ending at 50."""
    edges = [(i, i + 1, 1.0) for i in range(20)]
    edges.append((10, 21, 1.0))
    edges.extend((i, i + 1, 1.0) for i in range(21, 50))
    return MetricGraph(51, edges)


# ---------------------------------------------------------------------------
# Audit
# ---------------------------------------------------------------------------


class TestAudit:
    def test_geodesic_family_on_a_line_is_plausible(self) -> None:
        g = _line_with_spur()
        audit = gg_condition_audit(g, EMPTY_FAMILY, geodesic_family(g, EMPTY_FAMILY, POOL))
        assert audit.plausible
        assert audit.over_cap() == []
        assert [r.condition for r in audit.reports] == ["gg1", "gg2", "gg3", "gg4", "gg5", "gg6"]

    def test_empty_family_only_gg6_is_vacuous(self) -> None:
        g = _line_with_spur()
        audit = gg_condition_audit(g, EMPTY_FAMILY, geodesic_family(g, EMPTY_FAMILY, POOL))
        assert "vacuous" not in audit.report("gg4").details
        assert audit.report("gg4").samples > 0
        assert audit.report("gg4").constant("D") == 0.0
        assert audit.report("gg6").details["vacuous"] == "empty family"
        assert audit.report("gg6").status == "no-admissible-pairs"

    def test_endpoints_only_transient_sets_fail_between_condition(self) -> None:
        g = path_graph(20)
        pool = VertexSet(range(20))
        eta = {(x, y): geodesic(g, x, y) for x, y in combinations(range(20), 2)}
        trans = {pair: (0, len(path) - 1) for pair, path in eta.items()}
        family = GGFamily(pool=pool, eta=eta, trans=trans)
        audit = gg_condition_audit(g, EMPTY_FAMILY, family, cap=10.0)
        gg4 = audit.report("gg4")
        assert not audit.plausible
        assert gg4.constant("D") == 17.0
        assert gg4.witnesses[0].vertices == (0, 19, 1, 18)
        assert any(condition == "gg4" for condition, _, _ in audit.over_cap())

    def test_hub_family_exceeds_cap(self) -> None:
        g = _line_with_spur()
        base = geodesic_family(g, EMPTY_FAMILY, POOL)
        corrupted = hub_corrupted_family(g, base, HUB, 10.0)
        audit = gg_condition_audit(g, EMPTY_FAMILY, corrupted, cap=10.0)
        assert not audit.plausible
        assert audit.report("gg2").constant("D") == 30.0
        assert any(condition == "gg2" for condition, _, _ in audit.over_cap())

    def test_hub_only_replaces_long_pairs(self) -> None:
        g = _line_with_spur()
        base = geodesic_family(g, EMPTY_FAMILY, POOL)
        corrupted = hub_corrupted_family(g, base, HUB, 10.0)
        assert corrupted.eta[(0, 5)] == base.eta[(0, 5)]
        assert HUB in corrupted.eta[(0, 10)].vertices

    def test_hub_skips_pairs_without_a_doubling_detour(self) -> None:
        g = _line_with_spur()
        base = geodesic_family(g, EMPTY_FAMILY, POOL)
        corrupted = hub_corrupted_family(g, base, 20, 5.0)
        assert corrupted.eta[(10, 20)] == base.eta[(10, 20)]
        assert corrupted.eta[(5, 15)].length == 20.0
        assert corrupted.eta[(0, 10)].length == 30.0

    def test_default_hub_is_farthest_from_the_pool(self) -> None:
        g = _line_with_spur()
        base = geodesic_family(g, EMPTY_FAMILY, POOL)
        corrupted = hub_corrupted_family(g, base, None, 10.0)
        assert corrupted.eta == hub_corrupted_family(g, base, HUB, 10.0).eta

    def test_coset_family_is_plausible(
        self, free2_ball: CayleyBall, free2_cosets: PeripheralFamily
    ) -> None:
        g = free2_ball.graph
        family = geodesic_family(g, free2_cosets, VertexSet(range(5)), TransientParams())
        audit = gg_condition_audit(g, free2_cosets, family)
        assert audit.plausible
        assert audit.report("gg5").constant("B") == 1.0


# ---------------------------------------------------------------------------
# Validation and comparison
# ---------------------------------------------------------------------------


class TestFamilyValidation:
    def test_pool_too_small(self) -> None:
        g = path_graph(3)
        family = geodesic_family(g, EMPTY_FAMILY, VertexSet((0, 2)))
        with pytest.raises(GGFamilyError, match="at least 3"):
            gg_condition_audit(g, EMPTY_FAMILY, family)

    def test_missing_pair(self) -> None:
        g = path_graph(3)
        eta = {(0, 1): geodesic(g, 0, 1), (0, 2): geodesic(g, 0, 2)}
        trans = {(0, 1): (0, 1), (0, 2): (0, 1, 2)}
        family = GGFamily(pool=VertexSet((0, 1, 2)), eta=eta, trans=trans)
        with pytest.raises(GGFamilyError, match=r"\(1, 2\)"):
            gg_condition_audit(g, EMPTY_FAMILY, family)

    def test_trans_must_hold_endpoints(self) -> None:
        g = path_graph(3)
        family = geodesic_family(g, EMPTY_FAMILY, VertexSet((0, 1, 2)))
        broken = GGFamily(
            pool=family.pool, eta=family.eta, trans={**family.trans, (0, 2): (0, 1)}
        )
        with pytest.raises(GGFamilyError, match="both endpoints"):
            gg_condition_audit(g, EMPTY_FAMILY, broken)


class TestCompare:
    def test_geodesic_family_matches_geodesics(self) -> None:
        g = _line_with_spur()
        family = geodesic_family(g, EMPTY_FAMILY, POOL)
        report = gg_compare(g, EMPTY_FAMILY, family, TransientParams(), [geodesic(g, 0, 10)])
        assert report.constant("L_plus_c") == 0.0

    def test_hub_family_is_far_from_geodesics(self) -> None:
        g = _line_with_spur()
        corrupted = hub_corrupted_family(g, geodesic_family(g, EMPTY_FAMILY, POOL), HUB, 10.0)
        report = gg_compare(g, EMPTY_FAMILY, corrupted, TransientParams(), [geodesic(g, 0, 10)])
        assert report.constant("L_plus_c") == 30.0
