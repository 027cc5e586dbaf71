"""Group presentations, coset requests and generated Cayley balls.

Generators are single lowercase letters; the formal inverse of a letter is
its uppercase form.  The empty word (the identity) is labelled ``"1"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

if TYPE_CHECKING:
    from relhyp.services.metric_graph import MetricGraph

IDENTITY_LABEL = "1"


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True)


class FreeSpec(_Spec):
    family: Literal["free"] = "free"
    rank: int = Field(ge=1, le=26)


class FreeAbelianSpec(_Spec):
    family: Literal["free_abelian"] = "free_abelian"
    rank: int = Field(ge=1, le=26)


class SurfaceSpec(_Spec):
    family: Literal["surface"] = "surface"
    genus: int = Field(ge=2, le=13)


class RewritingSpec(_Spec):
    """Explicit generators and length-nonincreasing rules ``lhs -> rhs``."""

    family: Literal["rewriting"] = "rewriting"
    generators: tuple[str, ...]
    rules: tuple[tuple[str, str], ...] = ()

    @field_validator("generators")
    @classmethod
    def _lowercase_letters(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        for g in v:
            if len(g) != 1 or not g.islower():
                raise ValueError(f"generator {g!r} must be a single lowercase letter")
        if len(set(v)) != len(v):
            raise ValueError("generators must be distinct")
        if not v:
            raise ValueError("at least one generator is required")
        return v


class FreeProductSpec(_Spec):
    family: Literal["free_product"] = "free_product"
    left: GroupSpec
    right: GroupSpec


class DirectProductSpec(_Spec):
    family: Literal["direct_product"] = "direct_product"
    left: GroupSpec
    right: GroupSpec


GroupSpec = Annotated[
    FreeSpec | FreeAbelianSpec | SurfaceSpec | RewritingSpec | FreeProductSpec | DirectProductSpec,
    Field(discriminator="family"),
]

FreeProductSpec.model_rebuild()
DirectProductSpec.model_rebuild()


class CosetSpec(_Spec):
    """Left cosets of the subgroup generated by ``subgroup`` letters.

    ``representative=None`` asks for every coset meeting the ball.
    """

    subgroup: tuple[str, ...]
    representative: str | None = None


@dataclass(frozen=True)
class CayleyBall:
    """A ball around the identity; vertex ids follow BFS level order.

    ``edge_letters[(u, v)]`` is the letter ``x`` with ``word(u)·x = word(v)``;
    both orientations are stored.
    """

    radius: int
    graph: MetricGraph
    words: tuple[str, ...]
    levels: tuple[int, ...]
    alphabet: tuple[str, ...]
    edge_letters: dict[tuple[int, int], str] = field(compare=False, repr=False)

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    def word(self, v: int) -> str:
        return self.words[v]

    def letter(self, u: int, v: int) -> str | None:
        return self.edge_letters.get((u, v))
