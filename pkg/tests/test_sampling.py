"""Tests for the seeded samplers, the sup tracker and trend classification."""

import pytest
from relhyp.core.errors import ParameterError
from relhyp.services.metric_graph import cycle_graph, path_graph
from relhyp.services.sampling import (
    EXHAUSTIVE,
    MissingSeedError,
    SampleSpec,
    SupTracker,
    auto_spec,
    classify_trend,
    geodesic_variants,
    sample_pairs,
    sample_triples,
    subsample,
)


class TestSampleSpec:
    def test_sample_mode_needs_seed(self) -> None:
        with pytest.raises(MissingSeedError):
            SampleSpec(mode="sample")

    def test_unknown_mode(self) -> None:
        with pytest.raises(ParameterError):
            SampleSpec(mode="random", seed=1)

    def test_recorded_seed_only_when_sampling(self) -> None:
        assert SampleSpec(seed=5).recorded_seed is None
        assert SampleSpec(mode="sample", seed=5).recorded_seed == 5

    def test_auto_policy(self) -> None:
        assert auto_spec(10, limit=40) is EXHAUSTIVE
        spec = auto_spec(100, limit=40)
        assert spec.mode == "sample"
        assert spec.seed == 0


class TestSamplers:
    def test_exhaustive_pairs(self) -> None:
        assert sample_pairs([3, 1, 2, 1], EXHAUSTIVE) == [(1, 2), (1, 3), (2, 3)]

    def test_small_pool_is_enumerated_even_when_sampling(self) -> None:
        spec = SampleSpec(mode="sample", count=10, seed=1)
        assert len(sample_pairs(range(4), spec)) == 6

    def test_sampled_pairs_are_seeded(self) -> None:
        spec = SampleSpec(mode="sample", count=15, seed=7)
        first = sample_pairs(range(50), spec)
        assert first == sample_pairs(range(50), spec)
        assert len(first) == 15
        assert all(x < y for x, y in first)

    def test_triples(self) -> None:
        assert sample_triples([0, 1, 2, 3], EXHAUSTIVE)[0] == (0, 1, 2)
        assert sample_triples([0, 1], EXHAUSTIVE) == []

    def test_subsample_keeps_id_order(self) -> None:
        picked = subsample(range(100), 10, 3)
        assert len(picked) == 10
        assert picked == sorted(picked)
        assert subsample([4, 2], 10, None) == [2, 4]


class TestGeodesicVariants:
    def test_path_graph_has_one_geodesic(self) -> None:
        assert len(geodesic_variants(path_graph(6), 0, 5, count=3)) == 1

    def test_cycle_detours_through_the_other_side(self) -> None:
        paths = geodesic_variants(cycle_graph(6), 0, 3, count=3)
        assert paths[0].vertices == (0, 1, 2, 3)
        assert any(4 in p.vertices for p in paths[1:])


class TestAggregation:
    def test_sup_tracker_keeps_first_maximum(self) -> None:
        tracker = SupTracker("B")
        tracker.offer(1.0, (0, 1))
        tracker.offer(2.0, (2, 3))
        tracker.offer(2.0, (4, 5))
        assert tracker.value == 2.0
        assert tracker.witness is not None
        assert tracker.witness.vertices == (2, 3)
        assert tracker.items == 3

    def test_empty_tracker(self) -> None:
        tracker = SupTracker("M")
        assert tracker.value == 0.0
        assert tracker.witnesses() == []

    @pytest.mark.parametrize(
        ("values", "expected"),
        [
            ([0.0, 2.0, 2.5], "stable"),
            ([0.0, 2.0, 4.0], "growing"),
            ([0.0, 0.0, 1.5], "inconclusive"),
            ([3.0], "inconclusive"),
        ],
    )
    def test_trend(self, values: list[float], expected: str) -> None:
        radii = [2, 4, 6][: len(values)]
        assert classify_trend(radii, values) == expected
