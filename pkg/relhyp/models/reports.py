"""Pydantic models for audit outcomes and the top-level run report.

Every payload carries a ``kind`` literal so a :class:`Report` can hold a
mixed, discriminated list.  Constants are always finite: unbounded
behaviour is reported through violation witnesses instead.
"""

from __future__ import annotations

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field

Verdict = Literal["pass", "plausible", "violation", "stable", "growing", "inconclusive"]
CheckStatus = Literal["ok", "violation", "no-admissible-pairs"]
GrowthClass = Literal[
    "linear", "superlinear-subexponential", "exponential-compatible", "inconclusive"
]

VERDICTS: tuple[str, ...] = ("pass", "plausible", "violation", "stable", "growing", "inconclusive")


class Witness(BaseModel):
    """Vertices (and optional member indices) achieving or violating a bound."""

    model_config = ConfigDict(frozen=True)

    symbol: str
    value: float
    vertices: tuple[int, ...] = ()
    members: tuple[int, ...] = ()
    note: str = ""


class ConstantsReport(BaseModel):
    kind: Literal["constants"] = "constants"
    condition: str
    constants: dict[str, float] = Field(default_factory=dict)
    witnesses: list[Witness] = Field(default_factory=list)
    violations: list[Witness] = Field(default_factory=list)
    samples: int = Field(default=0, ge=0)
    status: CheckStatus = "ok"
    seed: int | None = None
    mode: str = "exhaustive"
    details: dict[str, Any] = Field(default_factory=dict)

    def constant(self, symbol: str) -> float:
        return self.constants[symbol]

    def witness_for(self, symbol: str) -> Witness | None:
        for w in self.witnesses:
            if w.symbol == symbol:
                return w
        return None


class BCPOutcome(BaseModel):
    pair: int
    clause1: float = 0.0
    clause2: float = 0.0
    error: str | None = None


class BCPReport(BaseModel):
    """Bounded coset penetration over a list of standard-path pairs.

    ``clause1_K`` is a supremum: the longest unmatched penetration, so clause 1
    holds for every K strictly above it.  ``clause2_K`` is the least K for
    clause 2 and ``K`` the larger of the two.  ``violations`` lists clause-1
    failures that no K below ``cap`` fixes.
    """

    kind: Literal["bcp"] = "bcp"
    K: float = 0.0
    clause1_K: float = 0.0
    clause2_K: float = 0.0
    cap: float | None = None
    L: float | None = None
    pairs: int = 0
    outcomes: list[BCPOutcome] = Field(default_factory=list)
    witnesses: list[Witness] = Field(default_factory=list)
    violations: list[Witness] = Field(default_factory=list)
    precondition_failures: list[str] = Field(default_factory=list)
    seed: int | None = None

    @property
    def status(self) -> CheckStatus:
        return "violation" if self.violations else "ok"


class DivergenceRecord(BaseModel):
    n: int
    div_sup: float | None = None
    triple: tuple[int, int, int] | None = None
    infinite_count: int = 0
    samples: int = 0


class GrowthFit(BaseModel):
    classification: GrowthClass
    residuals: dict[str, float] = Field(default_factory=dict)
    parameters: dict[str, list[float]] = Field(default_factory=dict)


class DivergenceReport(BaseModel):
    kind: Literal["divergence"] = "divergence"
    delta: float
    gamma: float
    closed_ball: bool = False
    margin: int = 0
    records: list[DivergenceRecord] = Field(default_factory=list)
    growth: GrowthFit | None = None
    seed: int | None = None
    mode: str = "exhaustive"

    def finite_series(self) -> tuple[list[int], list[float]]:
        ns = [r.n for r in self.records if r.div_sup is not None]
        values = [r.div_sup for r in self.records if r.div_sup is not None]
        return ns, values  # type: ignore[return-value]


class EmbeddingReport(BaseModel):
    """Distortion of the hull-to-tree map: ``d_T <= C_mul d + C_add`` and back."""

    kind: Literal["embedding"] = "embedding"
    mapping: dict[int, int] = Field(default_factory=dict)
    c_mul: float = 1.0
    c_add: float = 0.0
    pairs: int = 0
    witnesses: list[Witness] = Field(default_factory=list)
    tree_defect: float = 0.0


Payload = Annotated[
    ConstantsReport | BCPReport | DivergenceReport | EmbeddingReport,
    Field(discriminator="kind"),
]


class SeriesPoint(BaseModel):
    """One radius of a multi-radius protocol."""

    radius: int
    constants: dict[str, float]


class Report(BaseModel):
    """Everything a run produced; ``config`` re-runs it exactly."""

    command: str
    check: str | None = None
    config: dict[str, Any]
    payloads: list[Payload] = Field(default_factory=list)
    series: list[SeriesPoint] = Field(default_factory=list)
    verdict: Verdict
    exit_code: int
    wall_time: float = 0.0

    def deterministic_dump(self) -> dict[str, Any]:
        """JSON-ready dict without the wall-time field."""
        return self.model_dump(mode="json", exclude={"wall_time"})
