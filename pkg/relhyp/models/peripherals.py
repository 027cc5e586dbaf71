"""Peripheral family: the candidate peripheral sets of an ambient graph."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field

from relhyp.models.graph import VertexSet


@dataclass(frozen=True)
class PeripheralFamily:
    """Indexed vertex subsets, each ``coarse_connectivity_K``-coarsely connected.

    ``names`` are optional human-readable tags (coset representatives for
    Cayley balls) carried into reports.
    """

    members: tuple[VertexSet, ...] = ()
    coarse_connectivity_K: float = 1.0
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[VertexSet]:
        return iter(self.members)

    def __getitem__(self, index: int) -> VertexSet:
        return self.members[index]

    def name(self, index: int) -> str:
        if self.names is not None:
            return self.names[index]
        return f"P{index}"

    def subfamily(self, indices: list[int]) -> PeripheralFamily:
        """Family restricted to ``indices`` (re-indexed from 0 in the given order)."""
        return PeripheralFamily(
            members=tuple(self.members[i] for i in indices),
            coarse_connectivity_K=self.coarse_connectivity_K,
            names=None if self.names is None else tuple(self.names[i] for i in indices),
        )


EMPTY_FAMILY = PeripheralFamily()
