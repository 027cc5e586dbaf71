"""What a command handler hands back to the runner."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from relhyp.models.reports import (
    BCPReport,
    ConstantsReport,
    DivergenceReport,
    EmbeddingReport,
    Payload,
    Verdict,
)
from relhyp.models.run_config import RunConfig
from relhyp.services.sampling import SampleSpec


@dataclass
class CommandResult:
    """Payloads for the report, an optional verdict override and files to write.

    ``artifacts`` maps an output path to its text; ``csv`` is written to
    ``--csv`` when given.
    """

    payloads: list[Payload] = field(default_factory=list)
    verdict: Verdict | None = None
    artifacts: dict[str, str] = field(default_factory=dict)
    csv: str | None = None


def sample_spec(config: RunConfig) -> SampleSpec | None:
    """``None`` lets each checker pick exhaustive or seeded sampling by pool size."""
    if config.mode == "sample":
        return SampleSpec(mode="sample", count=config.count, seed=config.seed)
    return None


def has_violation(payloads: Sequence[Payload]) -> bool:
    for p in payloads:
        if isinstance(p, ConstantsReport) and p.status == "violation":
            return True
        if isinstance(p, BCPReport) and p.violations:
            return True
    return False


def flatten_constants(payloads: Sequence[Payload]) -> dict[str, float]:
    """One ``name.symbol`` entry per measured constant, for radius series."""
    out: dict[str, float] = {}
    for p in payloads:
        if isinstance(p, ConstantsReport):
            out.update({f"{p.condition}.{s}": v for s, v in p.constants.items()})
        elif isinstance(p, BCPReport):
            name = "bcp" if p.L is None else f"bcp_L{p.L:g}"
            out[f"{name}.K"] = p.K
        elif isinstance(p, EmbeddingReport):
            out["embedding.c_mul"] = p.c_mul
            out["embedding.c_add"] = p.c_add
        elif isinstance(p, DivergenceReport):
            _, values = p.finite_series()
            if values:
                out["divergence.last"] = values[-1]
    return out
